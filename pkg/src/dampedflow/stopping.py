"""High-frequency Fourier energy and the relative denoising efficiency (RDE).

The transform is the unnormalized forward 2-D DFT (DC coefficient equals
the pixel sum) in the usual FFT layout, so high frequencies sit in the
middle of the coefficient matrix. The high-frequency block for a ratio
``rho`` is the 1-based inclusive index range
``[floor(rho*M), M - floor(rho*M)] x [floor(rho*N), N - floor(rho*N)]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import ImageGrid


class StoppingConfigError(ValueError):
    pass


@dataclass(frozen=True)
class StoppingConfig:
    rho: float = 0.2
    tol: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.rho < 0.5:
            raise StoppingConfigError(f"rho must lie in (0, 0.5), got {self.rho}")
        if not self.tol > 0:
            raise StoppingConfigError(f"tol must be positive, got {self.tol}")


def band_bounds(M: int, N: int, rho: float) -> tuple[slice, slice]:
    """0-based slices selecting the high-frequency block.

    Raises :class:`StoppingConfigError` when the block is empty or would
    contain the DC coefficient.
    """
    fm = math.floor(rho * M)
    fn = math.floor(rho * N)
    if fm < 1 or fn < 1:
        raise StoppingConfigError(
            f"high-frequency block is empty for a {M}x{N} grid with rho={rho}; "
            "need floor(rho*M) >= 1 and floor(rho*N) >= 1"
        )
    if fm == 1 and fn == 1:
        raise StoppingConfigError(
            f"high-frequency block for a {M}x{N} grid with rho={rho} contains "
            "the DC coefficient; use a larger grid or rho"
        )
    return slice(fm - 1, M - fm), slice(fn - 1, N - fn)


def dft2_magnitudes(u: ImageGrid) -> np.ndarray:
    """Moduli of the unnormalized 2-D DFT of ``u``."""
    return np.abs(np.fft.fft2(u.values))


def _high_freq_energy(mag: np.ndarray, rho: float) -> float:
    rows, cols = band_bounds(mag.shape[0], mag.shape[1], rho)
    return float(mag[rows, cols].sum())


def high_freq_energy(u: ImageGrid, cfg: StoppingConfig) -> float:
    """Sum of DFT moduli over the high-frequency block."""
    return _high_freq_energy(dft2_magnitudes(u), cfg.rho)


def rde_array(u: np.ndarray, rho: float) -> float:
    mag = np.abs(np.fft.fft2(u))
    peak = float(mag.max())
    if peak == 0.0:
        # identically zero image: nothing left to remove
        band_bounds(u.shape[0], u.shape[1], rho)
        return 0.0
    return _high_freq_energy(mag, rho) / peak


def rde(u: ImageGrid, cfg: StoppingConfig) -> float:
    """High-frequency energy divided by the largest DFT modulus.

    Invariant under nonzero rescaling of ``u``. The zero image gives 0.
    """
    return rde_array(u.values, cfg.rho)
