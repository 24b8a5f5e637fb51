"""Built-in test images."""

from __future__ import annotations

import numpy as np

from .grid import ImageGrid

# Side of the square inside the 205x205 test image. Not given with the
# original experiment; 150 px reproduces its reported intensity drop.
SQUARE_SIDE = 150


def square_indicator(size: int = 205, side: int = SQUARE_SIDE, value: float = 255.0) -> ImageGrid:
    """``value`` times the indicator of a centred square, on the unit domain."""
    if not 0 < side <= size:
        raise ValueError(f"square side {side} must lie in (0, {size}]")
    u = np.zeros((size, size))
    a = (size - side) // 2
    u[a : a + side, a : a + side] = value
    return ImageGrid(u, 1.0 / size)


def smooth_phantom(size: int = 128) -> ImageGrid:
    """Piecewise-smooth test scene on the unit square, intensities in [0, 255].

    A few Gaussian blobs over a linear background; root-mean-square
    intensity is close to that of a natural photograph, so sigma=20 noise
    is roughly a 15% perturbation.
    """
    x = (np.arange(size) + 0.5) / size
    X, Y = np.meshgrid(x, x, indexing="ij")
    u = 90.0 + 40.0 * X
    for cx, cy, r, a in [
        (0.30, 0.30, 0.12, 110.0),
        (0.70, 0.35, 0.09, -60.0),
        (0.55, 0.72, 0.15, 95.0),
        (0.22, 0.75, 0.07, 70.0),
    ]:
        u = u + a * np.exp(-((X - cx) ** 2 + (Y - cy) ** 2) / (2 * r * r))
    return ImageGrid(np.clip(u, 0.0, 255.0), 1.0 / size)


def random_smooth_image(M: int, N: int, seed: int, amplitude: float = 1.0, modes: int = 3) -> ImageGrid:
    """Random low-frequency cosine series on the unit square.

    Cosines satisfy the Neumann condition, so the image has no artificial
    boundary layer.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    h = 1.0 / max(M, N)
    x = (np.arange(M) + 0.5) * h
    y = (np.arange(N) + 0.5) * h
    u = np.zeros((M, N))
    for p in range(modes + 1):
        for r in range(modes + 1):
            if p == r == 0:
                continue
            w = rng.normal() / (1 + p * p + r * r)
            u += w * np.outer(np.cos(np.pi * p * x), np.cos(np.pi * r * y))
    return ImageGrid(amplitude * u, h)
