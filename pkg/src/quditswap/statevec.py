"""Dense state-vector engine for qudit registers: the brute-force oracle.

States are flat complex arrays over an explicit ordered tuple of particle
ids, big-endian (the first listed particle is the most significant base-d
digit, matching left-to-right ket notation). All operations are pure; input
states are never mutated.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .core import MAX_AMPLITUDES, pack_index, unpack_index, validate_dimension

# Outcomes below this probability are excluded from sampling and flagged as
# absent post-states (avoids renormalizing an orthogonal branch).
PROB_FLOOR = 1e-12


@dataclass(frozen=True)
class StateVector:
    """Pure state of len(particles) qudits, each of dimension d.

    amps has length d**n indexed by pack_index over the particle ordering.
    Treated as immutable: operations return fresh arrays.
    """

    d: int
    particles: tuple[int, ...]
    amps: np.ndarray

    def __post_init__(self):
        validate_dimension(self.d)
        object.__setattr__(self, "particles", tuple(self.particles))
        if len(set(self.particles)) != len(self.particles):
            raise ValueError(f"duplicate particle ids in {self.particles}")
        size = self.d ** len(self.particles)
        if size > MAX_AMPLITUDES:
            raise ValueError(
                f"state of {len(self.particles)} dimension-{self.d} qudits needs "
                f"{size} amplitudes, above the {MAX_AMPLITUDES} cap"
            )
        amps = np.asarray(self.amps, dtype=complex)
        if amps.shape != (size,):
            raise ValueError(f"expected {size} amplitudes, got shape {amps.shape}")
        object.__setattr__(self, "amps", amps)

    @property
    def n(self) -> int:
        return len(self.particles)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def axis_of(self, particle: int) -> int:
        try:
            return self.particles.index(particle)
        except ValueError:
            raise ValueError(f"particle {particle} not in state {self.particles}") from None

    def tensorized(self) -> np.ndarray:
        """Amplitudes reshaped to one axis of length d per particle."""
        return self.amps.reshape([self.d] * self.n)


class MeasurementOutcome(NamedTuple):
    labels: tuple[int, ...]
    probability: float


def basis_state(d: int, particles, digits) -> StateVector:
    """Computational basis vector |digits[0], digits[1], ...>."""
    particles = tuple(particles)
    digits = tuple(digits)
    if len(digits) != len(particles):
        raise ValueError(f"{len(particles)} particles but {len(digits)} digits")
    amps = np.zeros(d ** len(particles), dtype=complex)
    amps[pack_index(d, digits)] = 1.0
    return StateVector(d, particles, amps)


def hadamard_matrix(d: int) -> np.ndarray:
    """Generalized Hadamard H[i, j] = zeta^(i*j) / sqrt(d)."""
    validate_dimension(d)
    ij = np.outer(np.arange(d), np.arange(d))
    return np.exp(2j * np.pi * ij / d) / np.sqrt(d)


def apply_hadamard(state: StateVector, particle: int) -> StateVector:
    """Apply the generalized Hadamard to one qudit."""
    axis = state.axis_of(particle)
    t = state.tensorized()
    t = np.moveaxis(np.tensordot(hadamard_matrix(state.d), t, axes=(1, axis)), 0, axis)
    return StateVector(state.d, state.particles, t.reshape(-1))


def apply_shift(state: StateVector, particle: int, power: int = 1) -> StateVector:
    """Apply the mod-d adder |j> -> |j + power> to one qudit."""
    axis = state.axis_of(particle)
    t = np.roll(state.tensorized(), power % state.d, axis=axis)
    return StateVector(state.d, state.particles, t.reshape(-1))


def apply_controlled_shift(state: StateVector, control: int, target: int,
                           exponent: int = 1) -> StateVector:
    """Apply |i>|j> -> |i>|j + exponent*i> with the given control/target."""
    if control == target:
        raise ValueError("control and target must be distinct particles")
    caxis = state.axis_of(control)
    taxis = state.axis_of(target)
    d = state.d
    t = state.tensorized().copy()
    sub_taxis = taxis - 1 if taxis > caxis else taxis
    for i in range(d):
        sl = [slice(None)] * state.n
        sl[caxis] = i
        t[tuple(sl)] = np.roll(t[tuple(sl)], (exponent * i) % d, axis=sub_taxis)
    return StateVector(state.d, state.particles, t.reshape(-1))


def tensor(a: StateVector, b: StateVector) -> StateVector:
    """Tensor product; particle lists concatenate, amplitudes Kronecker."""
    if a.d != b.d:
        raise ValueError(f"dimension mismatch: {a.d} vs {b.d}")
    overlap = set(a.particles) & set(b.particles)
    if overlap:
        raise ValueError(f"particle sets overlap: {sorted(overlap)}")
    return StateVector(a.d, a.particles + b.particles, np.kron(a.amps, b.amps))


def permute_to(state: StateVector, particles) -> StateVector:
    """Reorder the particle listing (same physical state, permuted axes)."""
    particles = tuple(particles)
    if sorted(particles) != sorted(state.particles):
        raise ValueError(f"{particles} is not a permutation of {state.particles}")
    perm = [state.axis_of(p) for p in particles]
    t = np.transpose(state.tensorized(), perm)
    return StateVector(state.d, particles, t.reshape(-1))


def inner_product(a: StateVector, b: StateVector) -> complex:
    """<a|b> over a shared particle set (orderings may differ)."""
    if set(a.particles) != set(b.particles):
        raise ValueError("states are over different particle sets")
    return complex(np.vdot(a.amps, permute_to(b, a.particles).amps))


def project_onto(state: StateVector, reference: StateVector):
    """Project a particle subset of `state` onto the unit state `reference`.

    Returns (probability, post) where post is the renormalized residual on
    the complementary particles (None when probability < PROB_FLOOR; a
    zero-particle state when the reference covers everything).
    """
    if reference.d != state.d:
        raise ValueError(f"dimension mismatch: {state.d} vs {reference.d}")
    missing = set(reference.particles) - set(state.particles)
    if missing:
        raise ValueError(f"reference particles {sorted(missing)} not in state")
    if abs(reference.norm() - 1.0) > 1e-9:
        raise ValueError("reference state must have unit norm")

    ref_axes = list(range(reference.n))
    state_axes = [state.axis_of(p) for p in reference.particles]
    residual = np.tensordot(reference.tensorized().conj(), state.tensorized(),
                            axes=(ref_axes, state_axes)).reshape(-1)
    probability = float(np.sum(np.abs(residual) ** 2))
    if probability < PROB_FLOOR:
        return probability, None
    rest = tuple(p for p in state.particles if p not in reference.particles)
    post = StateVector(state.d, rest, residual / np.sqrt(probability))
    return probability, post


def _basis_family(d: int, particles, kind: str):
    """Yield (labels, reference StateVector) over a measurement basis."""
    from .catbell import cat_state  # local import: catbell builds on this module

    n = len(particles)
    for index in range(d**n):
        labels = unpack_index(d, n, index)
        yield labels, cat_state(d, particles, labels)


def measure_in_basis(state: StateVector, particles, basis: str, rng):
    """Projective measurement of a particle subset in the Bell or cat basis.

    Enumerates every basis state, Born-samples an outcome with the seeded
    generator, and returns (MeasurementOutcome, post). The subset ordering
    fixes the basis: its first particle is the black node.
    """
    particles = tuple(particles)
    basis = basis.lower()
    if basis == "bell":
        if len(particles) != 2:
            raise ValueError("bell basis requires exactly 2 particles")
    elif basis == "cat":
        if len(particles) < 2:
            raise ValueError("cat basis requires at least 2 particles")
    else:
        raise ValueError(f"unknown basis {basis!r}")

    rng = np.random.default_rng(rng)
    outcomes = []
    total = 0.0
    for labels, reference in _basis_family(state.d, particles, basis):
        probability, post = project_onto(state, reference)
        total += probability
        if post is not None:
            outcomes.append((labels, probability, post))
    if abs(total - 1.0) > 1e-9:
        raise RuntimeError(f"basis probabilities sum to {total}, not 1")

    r = rng.random() * total
    acc = 0.0
    for labels, probability, post in outcomes:
        acc += probability
        if r < acc:
            return MeasurementOutcome(labels, probability), post
    labels, probability, post = outcomes[-1]
    return MeasurementOutcome(labels, probability), post
