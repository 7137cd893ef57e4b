"""Shared generators for randomized tests (all seeded by the caller)."""

import numpy as np

from spinsense import SpinJ, SpinOperator, SpinState


def random_state(j: SpinJ, rng: np.random.Generator) -> SpinState:
    v = rng.normal(size=j.dim) + 1j * rng.normal(size=j.dim)
    return SpinState(j, v / np.linalg.norm(v))


def random_hermitian(j: SpinJ, rng: np.random.Generator, norm: float | None = None) -> SpinOperator:
    a = rng.normal(size=(j.dim, j.dim)) + 1j * rng.normal(size=(j.dim, j.dim))
    h = (a + a.conj().T) / 2.0
    if norm is not None:
        h *= norm / np.max(np.abs(np.linalg.eigvalsh(h)))
    return SpinOperator(j, h, "H")


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(a)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_symmetric_state(
    j: SpinJ, rng: np.random.Generator, min_gap: int = 1, real: bool = False
) -> SpinState:
    """Random state with equal amplitudes on +-m, on shells spaced >= min_gap.

    The gap is measured between signed occupied levels, so a shell m also
    keeps distance 2m between its own two levels.
    """
    jmax = j.twice_j // 2
    while True:
        shells = [m for m in range(jmax + 1) if rng.random() < 0.6]
        if not shells:
            continue
        signed = sorted({s for m in shells for s in (m, -m)})
        if len(signed) == 1 or min(b - a for a, b in zip(signed, signed[1:])) >= min_gap:
            break
    amps = np.zeros(j.dim, dtype=complex)
    for m in shells:
        a = rng.normal() + (0.0 if real else 1j * rng.normal())
        amps[j.index_of(2 * m)] = a
        if m > 0:
            amps[j.index_of(-2 * m)] = a
    n = np.linalg.norm(amps)
    if n == 0:
        amps[j.index_of(0)] = 1.0
        n = 1.0
    return SpinState(j, amps / n)
