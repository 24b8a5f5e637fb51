"""Synthetic degradations: additive Gaussian noise and row jitter.

Randomness comes from NumPy's PCG64 bit generator seeded with an explicit
integer, which is portable and stable across platforms and NumPy versions.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .grid import ImageGrid


@dataclass(frozen=True)
class DegradationSpec:
    noise_sigma: float = 0.0
    jitter_amplitude: int = 0
    seed: int = 0

    def __post_init__(self):
        if self.noise_sigma < 0:
            raise ValueError(f"noise_sigma must be >= 0, got {self.noise_sigma}")
        if self.jitter_amplitude < 0 or int(self.jitter_amplitude) != self.jitter_amplitude:
            raise ValueError(
                f"jitter_amplitude must be a non-negative integer, got {self.jitter_amplitude}"
            )
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed}")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "DegradationSpec":
        return cls(**d)


def _rng(seed: int, stream: int) -> np.random.Generator:
    # one independent stream per degradation type
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, stream])))


def add_gaussian_noise(u: ImageGrid, sigma: float, seed: int) -> ImageGrid:
    """Return ``u + delta`` with ``delta`` i.i.d. N(0, sigma^2). No clamping."""
    if sigma < 0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")
    if sigma == 0:
        return u
    delta = _rng(seed, 0).normal(0.0, sigma, size=u.shape)
    return u.with_values(u.values + delta)


def shift_row(row: np.ndarray, s: int) -> np.ndarray:
    """Displace a row by ``s`` pixels (positive = right), replicating edges."""
    n = row.size
    idx = np.clip(np.arange(n) - s, 0, n - 1)
    return row[idx]


def jitter_rows(u: ImageGrid, J: int, seed: int) -> ImageGrid:
    """Shift every row horizontally by an independent integer in [-J, J]."""
    M, N = u.shape
    if J < 0:
        raise ValueError(f"jitter amplitude must be >= 0, got {J}")
    if J >= N:
        raise ValueError(f"jitter amplitude {J} must be smaller than the row length {N}")
    if J == 0:
        return u
    shifts = row_shifts(M, J, seed)
    out = np.empty_like(u.values)
    for i, s in enumerate(shifts):
        out[i] = shift_row(u.values[i], int(s))
    return u.with_values(out)


def row_shifts(M: int, J: int, seed: int) -> np.ndarray:
    """The per-row displacements drawn by :func:`jitter_rows`."""
    return _rng(seed, 1).integers(-J, J + 1, size=M)


def degrade(u: ImageGrid, spec: DegradationSpec) -> ImageGrid:
    """Jitter first, then add noise (the combined experiment's order)."""
    out = jitter_rows(u, spec.jitter_amplitude, spec.seed)
    return add_gaussian_noise(out, spec.noise_sigma, spec.seed)
