"""Generalized Bell and cat states over qudits.

A cat state on n particles with labels (u1, ..., un) is

    (1/sqrt(d)) sum_j zeta^(j*u1) |j, j+u2, ..., j+un>

with every label and every addition mod d. The first particle (black node)
carries the phase label u1; the others (white nodes) carry offsets. A Bell
state is the n = 2 case. For each n the d^n label tuples form an
orthonormal basis.
"""

from __future__ import annotations

import math

import numpy as np

from .core import pack_index, unpack_index, validate_dimension, zeta
from .statevec import (StateVector, apply_controlled_shift, apply_hadamard,
                       basis_state, inner_product, permute_to, project_onto,
                       tensor)


def cat_state(d: int, particles, labels) -> StateVector:
    """Closed-form cat state |Psi(u1, ..., un)> on the given particles."""
    validate_dimension(d)
    particles = tuple(particles)
    labels = tuple(int(u) % d for u in labels)
    n = len(particles)
    if n < 2:
        raise ValueError("a cat state needs at least 2 particles")
    if len(labels) != n:
        raise ValueError(f"{n} particles but {len(labels)} labels")
    amps = np.zeros(d**n, dtype=complex)
    scale = 1.0 / math.sqrt(d)
    for j in range(d):
        digits = (j,) + tuple((j + u) % d for u in labels[1:])
        amps[pack_index(d, digits)] = scale * zeta(d, j * labels[0])
    return StateVector(d, particles, amps)


def bell_state(d: int, particles, labels) -> StateVector:
    """Two-particle case |Psi(u1, u2)> = (1/sqrt(d)) sum_j zeta^(j*u1)|j, j+u2>."""
    particles = tuple(particles)
    if len(particles) != 2:
        raise ValueError("a Bell state has exactly 2 particles")
    return cat_state(d, particles, labels)


def cat_via_circuit(d: int, particles, digits) -> StateVector:
    """Build the cat state by circuit: Hadamard on the first qudit of
    |u1, ..., un>, then a controlled shift from it onto each of the others.

    Agrees with cat_state(d, particles, digits) amplitude for amplitude.
    """
    particles = tuple(particles)
    digits = tuple(int(u) % d for u in digits)
    if len(particles) < 2:
        raise ValueError("a cat state needs at least 2 particles")
    state = basis_state(d, particles, digits)
    state = apply_hadamard(state, particles[0])
    for target in particles[1:]:
        state = apply_controlled_shift(state, particles[0], target)
    return state


def expand_basis_in_bell(d: int, digits) -> list[tuple[complex, tuple[int, int]]]:
    """Expand |j, k> = (1/sqrt(d)) sum_u zeta^(-j*u) |Psi(u, k-j)>.

    Returns the d (coefficient, (u1, u2)) terms.
    """
    validate_dimension(d)
    j, k = (int(x) % d for x in digits)
    scale = 1.0 / math.sqrt(d)
    return [(scale * zeta(d, -j * u), (u, (k - j) % d)) for u in range(d)]


def expand_basis_in_cat(d: int, digits) -> list[tuple[complex, tuple[int, ...]]]:
    """Expand |u1, ..., un> = (1/sqrt(d)) sum_j zeta^(-j*u1) |Psi(j, u2-u1, ..., un-u1)>."""
    validate_dimension(d)
    digits = tuple(int(u) % d for u in digits)
    if len(digits) < 2:
        raise ValueError("need at least 2 digits")
    u1 = digits[0]
    offsets = tuple((u - u1) % d for u in digits[1:])
    scale = 1.0 / math.sqrt(d)
    return [(scale * zeta(d, -j * u1), (j,) + offsets) for j in range(d)]


def identify_cat(state: StateVector, tol: float = 1e-9):
    """Match a state against the cat basis over its own particle ordering.

    Returns (labels, overlap) for the unique basis state with unit fidelity.
    Raises ValueError when the state is not a cat state up to global phase.
    """
    d, n = state.d, state.n
    hits = []
    for index in range(d**n):
        labels = unpack_index(d, n, index)
        amp = inner_product(cat_state(d, state.particles, labels), state)
        if abs(amp) ** 2 > 0.5:
            hits.append((labels, amp))
    if len(hits) != 1 or abs(abs(hits[0][1]) - 1.0) > tol:
        raise ValueError("state does not match a single cat basis state")
    return hits[0]


def grow_cat(cat: StateVector, bell: StateVector, measured: int | None = None,
             rng=None):
    """Extend an (n-1)-particle cat by one particle using a Bell pair.

    A controlled shift runs from the cat's last particle onto the Bell
    particle that is kept; the other Bell particle (`measured`, default the
    second) is then read out in the computational basis. The survivors form
    an n-particle cat whose labels are found by exhaustive projection.

    Returns (observed digit, post StateVector, cat labels).
    """
    if cat.d != bell.d:
        raise ValueError(f"dimension mismatch: {cat.d} vs {bell.d}")
    if len(bell.particles) != 2:
        raise ValueError("bell argument must hold exactly 2 particles")
    if measured is None:
        measured = bell.particles[1]
    if measured not in bell.particles:
        raise ValueError(f"measured particle {measured} is not in the Bell pair")
    kept = bell.particles[0] if measured == bell.particles[1] else bell.particles[1]

    joint = tensor(cat, bell)
    joint = apply_controlled_shift(joint, cat.particles[-1], kept)

    d = joint.d
    rng = np.random.default_rng(rng)
    branches = []
    for y in range(d):
        probability, post = project_onto(joint, basis_state(d, (measured,), (y,)))
        if post is not None:
            branches.append((y, probability, post))
    total = sum(p for _, p, _ in branches)
    if abs(total - 1.0) > 1e-9:
        raise RuntimeError(f"readout probabilities sum to {total}, not 1")

    r = rng.random() * total
    acc = 0.0
    chosen = branches[-1]
    for branch in branches:
        acc += branch[1]
        if r < acc:
            chosen = branch
            break
    y, _, post = chosen

    post = permute_to(post, cat.particles + (kept,))
    labels, _ = identify_cat(post)
    return y, post, labels
