"""Symbolic entanglement swapping over Z_d labels.

A Bell measurement on two particles drawn from different entangled
fragments collapses the pair into a Bell state and leaves the survivors in
one rewritten fragment. Three measured-pair configurations are supported,
each a closed-form rewrite certified against the dense engine:

  bell-bell    A = Psi(u1,u2) on (1,2), B = Psi(v1,v2) on (3,4), pair (1,4):
               measured (u1+k, v2+l) on (1,4), residual (v1-k, u2-l) on
               (3,2), phase zeta^(+kl).
  black-node   cat Psi(u1..un) on (1..n), Bell Psi(v,v') on (s,s'),
               pair (1, s'): measured (u1-k, v'+l) on (1,s'), residual cat
               (v+k, u2-l, ..., un-l) on (s,2..n), phase zeta^(-kl).
  white-node   Bell Psi(v,v') on (s,s'), cat Psi(u1..un), pair (s, m) for a
               white node m: measured (v-k, um-l) on (s,m), residual cat
               keeps its ordering with s' in slot m and labels
               (u1+k, ..., v'+l at m, ...), phase zeta^(+kl).

The measured pair is always (black node, white node) of two distinct
fragments. Amplitudes stay (1/sqrt(d))^scale * zeta^phase exactly, so the
engine tracks both as integers and never touches floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import NamedTuple

import numpy as np

from .catbell import cat_state
from .core import validate_dimension, zeta
from .statevec import StateVector, permute_to, tensor


class UnsupportedConfigurationError(ValueError):
    """The measured pair does not match a supported swap configuration."""


class SwapOutcome(NamedTuple):
    k: int
    l: int


@dataclass(frozen=True)
class CatFragment:
    """One entangled block: ordered particles, labels (u1, ..., un) mod d.

    The first particle is the black node carrying the phase label u1; a
    Bell state is the two-particle case.
    """

    d: int
    particles: tuple[int, ...]
    labels: tuple[int, ...]

    def __post_init__(self):
        validate_dimension(self.d)
        object.__setattr__(self, "particles", tuple(self.particles))
        object.__setattr__(self, "labels",
                           tuple(int(u) % self.d for u in self.labels))
        if len(self.particles) < 2:
            raise ValueError("a fragment holds at least 2 particles")
        if len(set(self.particles)) != len(self.particles):
            raise ValueError(f"duplicate particle ids in {self.particles}")
        if len(self.labels) != len(self.particles):
            raise ValueError(f"{len(self.particles)} particles but "
                             f"{len(self.labels)} labels")

    @property
    def black_node(self) -> int:
        return self.particles[0]

    @property
    def is_bell(self) -> bool:
        return len(self.particles) == 2

    def to_state(self) -> StateVector:
        return cat_state(self.d, self.particles, self.labels)


@dataclass(frozen=True)
class Register:
    """Disjoint fragments plus the accumulated global phase and scale.

    phase_power is an exponent of zeta; scale_exponent counts powers of
    1/sqrt(d) picked up by measurements (two per Bell measurement), so the
    surviving branch has amplitude (1/sqrt(d))^scale * zeta^phase relative
    to the initial state.
    """

    d: int
    fragments: tuple[CatFragment, ...]
    phase_power: int = 0
    scale_exponent: int = 0

    def __post_init__(self):
        validate_dimension(self.d)
        object.__setattr__(self, "fragments", tuple(self.fragments))
        object.__setattr__(self, "phase_power", int(self.phase_power) % self.d)
        seen: set[int] = set()
        for fragment in self.fragments:
            if fragment.d != self.d:
                raise ValueError("fragment dimension differs from register")
            overlap = seen & set(fragment.particles)
            if overlap:
                raise ValueError(f"fragments share particles {sorted(overlap)}")
            seen |= set(fragment.particles)

    @property
    def particles(self) -> tuple[int, ...]:
        return tuple(p for f in self.fragments for p in f.particles)

    def fragment_of(self, particle: int) -> CatFragment:
        for fragment in self.fragments:
            if particle in fragment.particles:
                return fragment
        raise ValueError(f"particle {particle} not in register")

    def branch_probability(self) -> Fraction:
        return Fraction(1, self.d**self.scale_exponent)


def sample_outcome(d: int, rng=None) -> SwapOutcome:
    """Uniform draw of (k, l) from Z_d x Z_d; deterministic given a seed."""
    validate_dimension(d)
    rng = np.random.default_rng(rng)
    k, l = rng.integers(0, d, size=2)
    return SwapOutcome(int(k), int(l))


def bell_measure(register: Register, pair, outcome: SwapOutcome | None = None,
                 rng=None):
    """Bell-measure a (black node, white node) pair from distinct fragments.

    Returns (outcome, new register): the measured pair becomes a Bell
    fragment, the survivors one rewritten fragment, and the register phase
    and scale advance per the matching rule. The outcome is forced when
    given, otherwise drawn uniformly.
    """
    p, q = pair
    frag_p = register.fragment_of(p)
    frag_q = register.fragment_of(q)
    if frag_p is frag_q:
        raise UnsupportedConfigurationError(
            f"pair ({p}, {q}) lies inside a single fragment")
    if p != frag_p.black_node:
        raise UnsupportedConfigurationError(
            f"particle {p} is not its fragment's black node")
    if q == frag_q.black_node:
        raise UnsupportedConfigurationError(
            f"particle {q} must be a white node, not a black node")

    d = register.d
    if outcome is None:
        outcome = sample_outcome(d, rng)
    k, l = int(outcome[0]) % d, int(outcome[1]) % d
    outcome = SwapOutcome(k, l)

    if frag_p.is_bell and frag_q.is_bell:
        u1, u2 = frag_p.labels
        v1, v2 = frag_q.labels
        measured = CatFragment(d, (p, q), (u1 + k, v2 + l))
        residual = CatFragment(d, (frag_q.particles[0], frag_p.particles[1]),
                               (v1 - k, u2 - l))
        phase = k * l
    elif not frag_p.is_bell and frag_q.is_bell:
        u = frag_p.labels
        v, vp = frag_q.labels
        s = frag_q.particles[0]
        measured = CatFragment(d, (p, q), (u[0] - k, vp + l))
        residual = CatFragment(d, (s,) + frag_p.particles[1:],
                               (v + k,) + tuple(ui - l for ui in u[1:]))
        phase = -k * l
    elif frag_p.is_bell and not frag_q.is_bell:
        v, vp = frag_p.labels
        sp = frag_p.particles[1]
        u = frag_q.labels
        m = frag_q.particles.index(q)
        measured = CatFragment(d, (p, q), (v - k, u[m] - l))
        parts = list(frag_q.particles)
        labels = list(u)
        parts[m] = sp
        labels[0] = u[0] + k
        labels[m] = vp + l
        residual = CatFragment(d, tuple(parts), tuple(labels))
        phase = k * l
    else:
        raise UnsupportedConfigurationError(
            "measuring across two fragments of 3+ particles is not supported")

    rest = tuple(f for f in register.fragments
                 if f is not frag_p and f is not frag_q)
    after = Register(d, rest + (measured, residual),
                     register.phase_power + phase,
                     register.scale_exponent + 2)
    return outcome, after


def to_statevector(register: Register) -> StateVector:
    """Unit-norm dense state of the register: fragment tensor times zeta^phase."""
    if not register.fragments:
        raise ValueError("register holds no fragments")
    state = register.fragments[0].to_state()
    for fragment in register.fragments[1:]:
        state = tensor(state, fragment.to_state())
    return StateVector(register.d, state.particles,
                       state.amps * zeta(register.d, register.phase_power))


_RULE_ALIASES = {
    "i": "bell", "bell": "bell",
    "ii": "black", "black": "black",
    "iii": "white", "white": "white",
}


def verify_swap_identity(rule: str, d: int, labels, m: int | None = None) -> float:
    """Check one swap rewrite against the dense engine.

    Builds the two-fragment product state, then reassembles it as the
    outcome sum (1/d per branch, engine phase included) and returns the
    maximum absolute amplitude deviation.

    labels is a pair of label tuples: (bell, bell) for rule "bell" (alias
    "i"), (cat, bell) for rules "black"/"white" (aliases "ii"/"iii"). Rule
    "white" also needs the measured white-node position m in 2..n.
    """
    try:
        rule = _RULE_ALIASES[str(rule).lower()]
    except KeyError:
        raise ValueError(f"unknown rule {rule!r}") from None
    labels_a, labels_b = labels

    if rule == "bell":
        if len(labels_a) != 2 or len(labels_b) != 2:
            raise ValueError("rule bell takes two Bell label pairs")
        frag_a = CatFragment(d, (1, 2), labels_a)
        frag_b = CatFragment(d, (3, 4), labels_b)
        pair = (1, 4)
    else:
        n = len(labels_a)
        if n < 3:
            raise ValueError("cat rules need a cat of 3+ particles")
        if len(labels_b) != 2:
            raise ValueError("second label tuple must be a Bell pair")
        frag_a = CatFragment(d, tuple(range(1, n + 1)), labels_a)
        frag_b = CatFragment(d, (n + 1, n + 2), labels_b)
        if rule == "black":
            pair = (1, n + 2)
        else:
            if m is None or not 2 <= m <= n:
                raise ValueError("rule white needs a white-node position m in 2..n")
            pair = (n + 1, m)

    register = Register(d, (frag_a, frag_b))
    lhs = to_statevector(register)
    rhs = np.zeros_like(lhs.amps)
    for k, l in product(range(d), repeat=2):
        _, after = bell_measure(register, pair, outcome=SwapOutcome(k, l))
        scale = float(d) ** (-(after.scale_exponent - register.scale_exponent) / 2)
        rhs = rhs + scale * permute_to(to_statevector(after), lhs.particles).amps
    return float(np.max(np.abs(lhs.amps - rhs)))
