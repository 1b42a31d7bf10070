"""Shared test utilities: random model generators and the exhaustive
first-harmonic search used to confirm the 4/pi bound."""

from __future__ import annotations

import itertools
import math

import numpy as np

from bellsim.lhv import LhvModel, SimpleFunctionSpec

PAIRING_CHOICES = ("correlated", "anti-correlated")


def random_spec(rng, max_intervals: int = 16) -> SimpleFunctionSpec:
    """Random piecewise-sign response with 1..max_intervals intervals."""
    k = int(rng.integers(1, max_intervals + 1))
    while True:
        bps = np.sort(rng.uniform(0.0, math.pi, k - 1))
        margin_ok = k == 1 or (
            bps[0] > 1e-9
            and bps[-1] < math.pi - 1e-9
            and (k == 2 or np.min(np.diff(bps)) > 1e-9)
        )
        if margin_ok:
            break
    first = int(rng.choice((-1, 1)))
    return SimpleFunctionSpec(breakpoints=tuple(float(b) for b in bps), first_sign=first)


def random_model(
    rng,
    pairing: str | None = None,
    max_atoms: int = 24,
    max_intervals: int = 12,
) -> LhvModel:
    """Random mixture model; pairing is drawn uniformly unless given."""
    if pairing is None:
        pairing = PAIRING_CHOICES[int(rng.integers(0, 2))]
    n = int(rng.integers(1, max_atoms + 1))
    weights = rng.uniform(0.1, 1.0, n)
    weights /= weights.sum()
    atoms = tuple(
        (float(w), random_spec(rng, max_intervals=max_intervals)) for w in weights
    )
    return LhvModel(atoms=atoms, pairing=pairing)


def _cell_integrals(n_cells: int) -> np.ndarray:
    """Per-cell integrals ``int exp(-2 i t) / sqrt(pi) dt`` on a uniform grid."""
    edges = np.linspace(0.0, math.pi, n_cells + 1)
    ex = np.exp(-2j * edges)
    return 1j * (ex[1:] - ex[:-1]) / (2.0 * math.sqrt(math.pi))


def first_harmonic_max_dp(
    n_cells: int = 256, max_blocks: int = 8, n_phases: int = 2048
) -> tuple[float, float]:
    """Exact max of ``|f_1|`` over grid-aligned sign patterns, by phase sweep.

    For each probe phase ``u`` the best pattern maximizing ``Re(conj(u) f_1)``
    with at most ``max_blocks`` constant blocks is found by dynamic
    programming over cells (state: current sign, blocks used).  The sweep
    includes the exact optimal phases of the half-period square wave, so the
    returned ``best`` attains the true grid optimum; ``upper`` bounds the
    phase-discretization slack via ``best / cos(pi / n_phases)``.

    Returns ``(best, upper)`` with ``best <= max|f_1| <= upper`` over the
    grid-aligned family.
    """
    cell = _cell_integrals(n_cells)
    phis = np.concatenate(
        [
            2.0 * math.pi * np.arange(n_phases) / n_phases,
            [math.pi / 2.0, -math.pi / 2.0],
        ]
    )
    # W[p, j] = Re(conj(u_p) * cell_j)
    w = np.real(np.exp(-1j * phis)[:, None] * cell[None, :])
    n_ph = phis.size
    neg = -np.inf
    dp = np.full((n_ph, 2, max_blocks + 1), neg)
    dp[:, 0, 1] = w[:, 0]
    dp[:, 1, 1] = -w[:, 0]
    for j in range(1, n_cells):
        switched = np.full_like(dp, neg)
        switched[:, 0, 1:] = dp[:, 1, :-1]
        switched[:, 1, 1:] = dp[:, 0, :-1]
        best_prev = np.maximum(dp, switched)
        best_prev[:, 0, :] += w[:, j, None]
        best_prev[:, 1, :] += -w[:, j, None]
        dp = best_prev
    best = float(np.max(dp))
    upper = best / math.cos(math.pi / n_phases)
    return best, upper


def first_harmonic_max_brute(n_cells: int, max_blocks: int) -> float:
    """True max of ``|f_1|`` over all grid-aligned patterns, by enumeration.

    Exponential in ``n_cells``; only usable for small grids, as an oracle
    validating the dynamic program.
    """
    cell = _cell_integrals(n_cells)
    best = 0.0
    for signs in itertools.product((1.0, -1.0), repeat=n_cells):
        blocks = 1 + sum(a != b for a, b in zip(signs, signs[1:]))
        if blocks > max_blocks:
            continue
        best = max(best, abs(np.dot(signs, cell)))
    return float(best)
