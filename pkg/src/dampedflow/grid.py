"""Image grids, column-stacked flattening and Neumann ghost sampling."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class ShapeError(ValueError):
    """Raised when a flat vector does not fit the requested grid shape."""


@dataclass(frozen=True)
class ImageGrid:
    """An M x N intensity field sampled with uniform spacing ``h``.

    Values are stored as float64. Integer input (e.g. 8-bit images) is
    promoted on construction.
    """

    values: np.ndarray
    h: float = 1.0

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        if values.ndim != 2:
            raise ShapeError(f"image must be 2-D, got shape {values.shape}")
        if values.shape[0] < 2 or values.shape[1] < 2:
            raise ShapeError(f"image must be at least 2x2, got {values.shape}")
        if not self.h > 0:
            raise ValueError(f"grid step h must be positive, got {self.h}")
        if not np.all(np.isfinite(values)):
            bad = np.argwhere(~np.isfinite(values))[0]
            raise ValueError(f"non-finite intensity at pixel {tuple(bad)}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "h", float(self.h))

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    @property
    def M(self) -> int:
        return self.values.shape[0]

    @property
    def N(self) -> int:
        return self.values.shape[1]

    def with_values(self, values) -> "ImageGrid":
        return ImageGrid(values, self.h)


def vec(u: ImageGrid | np.ndarray) -> np.ndarray:
    """Stack the columns of ``u`` into a vector of length M*N.

    The first M entries are column 0, the next M are column 1, and so on,
    so pixel (i, j) lands at index ``i + j*M`` (0-based).
    """
    values = u.values if isinstance(u, ImageGrid) else np.asarray(u)
    return values.ravel(order="F").copy()


def array(w, M: int, N: int, h: float = 1.0) -> ImageGrid:
    """Inverse of :func:`vec`."""
    w = np.asarray(w, dtype=np.float64)
    if w.ndim != 1 or w.size != M * N:
        raise ShapeError(
            f"vector of shape {w.shape} cannot be arranged as a {M}x{N} grid"
        )
    return ImageGrid(w.reshape((M, N), order="F"), h)


def flat_index(i: int, j: int, M: int) -> int:
    """Position of pixel (i, j) inside ``vec`` output (0-based)."""
    return i + j * M


def neumann_sample(u: ImageGrid, i: int, j: int) -> float:
    """Read ``u`` at 1-based index (i, j), allowing one ghost layer.

    Ghost indices 0 and M+1 (resp. N+1) replicate the nearest interior
    pixel, which gives a zero normal derivative for one-sided differences.
    """
    M, N = u.shape
    if not (0 <= i <= M + 1 and 0 <= j <= N + 1):
        raise IndexError(
            f"index ({i}, {j}) outside ghost band [0, {M + 1}] x [0, {N + 1}]"
        )
    ii = min(max(i, 1), M)
    jj = min(max(j, 1), N)
    return float(u.values[ii - 1, jj - 1])
