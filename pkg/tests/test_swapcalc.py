import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quditswap.catbell import bell_state
from quditswap.core import zeta
from quditswap.statevec import inner_product, project_onto
from quditswap.swapcalc import (CatFragment, Register, SwapOutcome,
                                UnsupportedConfigurationError, bell_measure,
                                sample_outcome, to_statevector,
                                verify_swap_identity)


def two_bell_register(d, a_labels, b_labels):
    return Register(d, (CatFragment(d, (1, 2), a_labels),
                        CatFragment(d, (3, 4), b_labels)))


def cat_bell_register(d, cat_labels, bell_labels):
    n = len(cat_labels)
    return Register(d, (CatFragment(d, tuple(range(1, n + 1)), cat_labels),
                        CatFragment(d, (n + 1, n + 2), bell_labels)))


def test_fragment_normalizes_labels():
    fragment = CatFragment(3, (0, 1), (-1, 5))
    assert fragment.labels == (2, 2)
    assert fragment.black_node == 0 and fragment.is_bell


def test_fragment_validation():
    with pytest.raises(ValueError):
        CatFragment(2, (0,), (0,))
    with pytest.raises(ValueError):
        CatFragment(2, (0, 0), (1, 1))
    with pytest.raises(ValueError):
        CatFragment(2, (0, 1), (1,))


def test_register_validation():
    fragment = CatFragment(2, (0, 1), (0, 0))
    with pytest.raises(ValueError):
        Register(2, (fragment, CatFragment(2, (1, 2), (0, 0))))
    with pytest.raises(ValueError):
        Register(2, (fragment, CatFragment(3, (2, 3), (0, 0))))
    register = Register(2, (fragment,), phase_power=5)
    assert register.phase_power == 1


def test_bell_bell_worked_example():
    # d=2 all-zero Bell pair, outcome (1,1): both fragments flip, phase -1
    register = two_bell_register(2, (0, 0), (0, 0))
    outcome, after = bell_measure(register, (1, 4), outcome=SwapOutcome(1, 1))
    assert outcome == (1, 1)
    by_particles = {f.particles: f.labels for f in after.fragments}
    assert by_particles[(1, 4)] == (1, 1)
    assert by_particles[(3, 2)] == (1, 1)
    assert zeta(2, after.phase_power) == pytest.approx(-1)
    assert after.scale_exponent == 2
    assert float(after.branch_probability()) == pytest.approx(0.25)

    # the dense engine agrees, amplitude for amplitude
    before = to_statevector(register)
    probability, post = project_onto(before, bell_state(2, (1, 4), (1, 1)))
    assert probability == pytest.approx(0.25, abs=1e-12)
    amp = inner_product(bell_state(2, (3, 2), (1, 1)), post)
    assert amp == pytest.approx(zeta(2, after.phase_power), abs=1e-12)


def test_black_node_worked_example():
    register = cat_bell_register(2, (0, 0, 0), (0, 0))
    outcome, after = bell_measure(register, (1, 5), outcome=SwapOutcome(1, 0))
    by_particles = {f.particles: f.labels for f in after.fragments}
    assert by_particles[(4, 2, 3)] == (1, 0, 0)
    assert by_particles[(1, 5)] == (1, 0)
    assert after.phase_power == 0


def test_white_node_worked_example():
    register = cat_bell_register(3, (1, 2, 0), (2, 1))
    outcome, after = bell_measure(register, (4, 3), outcome=SwapOutcome(0, 0))
    by_particles = {f.particles: f.labels for f in after.fragments}
    assert by_particles[(1, 2, 5)] == (1, 2, 1)
    assert by_particles[(4, 3)] == (2, 0)
    assert after.phase_power == 0


def test_unsupported_configurations():
    register = two_bell_register(2, (0, 0), (1, 1))
    with pytest.raises(UnsupportedConfigurationError):
        bell_measure(register, (1, 2), outcome=SwapOutcome(0, 0))  # same fragment
    with pytest.raises(UnsupportedConfigurationError):
        bell_measure(register, (2, 4), outcome=SwapOutcome(0, 0))  # white first
    with pytest.raises(UnsupportedConfigurationError):
        bell_measure(register, (1, 3), outcome=SwapOutcome(0, 0))  # black second
    cats = Register(2, (CatFragment(2, (1, 2, 3), (0, 0, 0)),
                        CatFragment(2, (4, 5, 6), (0, 0, 0))))
    with pytest.raises(UnsupportedConfigurationError):
        bell_measure(cats, (1, 5), outcome=SwapOutcome(0, 0))  # cat-cat


def test_verify_identity_exhaustive_small():
    for d in (2, 3):
        for labels in itertools.product(range(d), repeat=4):
            deviation = verify_swap_identity("bell", d, (labels[:2], labels[2:]))
            assert deviation < 1e-9
    for d in (2, 3):
        for flat in itertools.product(range(d), repeat=5):
            cat, bell = flat[:3], flat[3:]
            assert verify_swap_identity("black", d, (cat, bell)) < 1e-9
            for m in (2, 3):
                assert verify_swap_identity("white", d, (cat, bell), m=m) < 1e-9


def test_verify_identity_rule_aliases():
    assert verify_swap_identity("i", 2, ((0, 1), (1, 0))) < 1e-12
    assert verify_swap_identity("ii", 2, ((0, 1, 1), (1, 0))) < 1e-12
    assert verify_swap_identity("iii", 2, ((0, 1, 1), (1, 0)), m=2) < 1e-12
    with pytest.raises(ValueError):
        verify_swap_identity("iv", 2, ((0, 0), (0, 0)))
    with pytest.raises(ValueError):
        verify_swap_identity("white", 2, ((0, 0, 0), (0, 0)))  # missing m


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 4), min_size=6, max_size=6),
       st.integers(2, 4))
def test_verify_identity_random_d5_n4(flat, m):
    cat, bell = tuple(flat[:4]), tuple(flat[4:])
    assert verify_swap_identity("black", 5, (cat, bell)) < 1e-9
    assert verify_swap_identity("white", 5, (cat, bell), m=m) < 1e-9


def test_born_uniformity():
    rng = np.random.default_rng(17)
    for d in (2, 3):
        for _ in range(3):
            cat = tuple(int(x) for x in rng.integers(0, d, 3))
            bell = tuple(int(x) for x in rng.integers(0, d, 2))
            register = cat_bell_register(d, cat, bell)
            before = to_statevector(register)
            for pair in ((1, 5), (4, 2), (4, 3)):
                for k, l in itertools.product(range(d), repeat=2):
                    _, after = bell_measure(register, pair,
                                            outcome=SwapOutcome(k, l))
                    reference = after.fragment_of(pair[0]).to_state()
                    probability, _ = project_onto(before, reference)
                    assert probability == pytest.approx(1 / d**2, abs=1e-9)


@given(st.integers(2, 5), st.tuples(st.integers(0, 15), st.integers(0, 15)),
       st.tuples(st.integers(0, 15), st.integers(0, 15)),
       st.tuples(st.integers(0, 15), st.integers(0, 15)))
def test_label_conservation_bell_rule(d, a_labels, b_labels, outcome):
    register = two_bell_register(d, a_labels, b_labels)
    _, after = bell_measure(register, (1, 4), outcome=SwapOutcome(*outcome))
    by_particles = {f.particles: f.labels for f in after.fragments}
    measured, residual = by_particles[(1, 4)], by_particles[(3, 2)]
    # black and white label sums are separately conserved
    assert (measured[0] + residual[0]) % d == (a_labels[0] + b_labels[0]) % d
    assert (measured[1] + residual[1]) % d == (a_labels[1] + b_labels[1]) % d


@given(st.integers(2, 5), st.lists(st.integers(0, 15), min_size=3, max_size=5),
       st.tuples(st.integers(0, 15), st.integers(0, 15)),
       st.tuples(st.integers(0, 15), st.integers(0, 15)))
def test_black_node_conservation_black_rule(d, cat, bell, outcome):
    register = cat_bell_register(d, tuple(cat), bell)
    n = len(cat)
    _, after = bell_measure(register, (1, n + 2), outcome=SwapOutcome(*outcome))
    measured = after.fragment_of(1).labels
    residual = after.fragment_of(n + 1).labels
    assert (measured[0] + residual[0]) % d == (cat[0] + bell[0]) % d


def test_sample_outcome_deterministic_and_uniform():
    first = [sample_outcome(3, rng=seed) for seed in range(10)]
    second = [sample_outcome(3, rng=seed) for seed in range(10)]
    assert first == second

    rng = np.random.default_rng(123)
    counts = np.zeros((2, 2), dtype=int)
    draws = 40000
    for _ in range(draws):
        k, l = sample_outcome(2, rng=rng)
        counts[k, l] += 1
    assert np.all(np.abs(counts / draws - 0.25) < 0.01)

    rng = np.random.default_rng(7)
    seen = {sample_outcome(3, rng=rng) for _ in range(10000)}
    assert len(seen) == 9


def test_cross_engine_agreement_random_sequences():
    from cross_engine import run_cross_engine_sequence

    rng = np.random.default_rng(2024)
    total_steps = 0
    for _ in range(40):
        d = int(rng.integers(2, 4))
        total_steps += run_cross_engine_sequence(d, rng)
    assert total_steps > 60
