import numpy as np
import pytest

from dampedflow.grid import ImageGrid, neumann_sample


@pytest.fixture
def rng():
    return np.random.default_rng(20190503)


def random_grid(rng, M, N, scale=255.0):
    return ImageGrid(rng.uniform(0.0, scale, (M, N)), 1.0 / max(M, N))


def stencil_oracle(u: ImageGrid, eps: float) -> np.ndarray:
    """Pixel-by-pixel evaluation of the five-point divergence stencil.

    Works in 1-based indices with ghost replication for both the image and
    the coefficient field, reading every value through ``neumann_sample``.
    """
    M, N = u.shape
    h = u.h

    def c(i, j):
        i, j = min(max(i, 1), M), min(max(j, 1), N)
        dx = neumann_sample(u, i + 1, j) - neumann_sample(u, i, j)
        dy = neumann_sample(u, i, j + 1) - neumann_sample(u, i, j)
        return 1.0 / (eps + np.sqrt(dx * dx + dy * dy) / h)

    def s(i, j):
        return neumann_sample(u, i, j)

    out = np.zeros((M, N))
    for i in range(1, M + 1):
        for j in range(1, N + 1):
            val = (
                c(i - 1, j) * s(i - 1, j)
                + c(i, j - 1) * s(i, j - 1)
                - (2 * c(i, j) + c(i - 1, j) + c(i, j - 1)) * s(i, j)
                + c(i, j) * s(i, j + 1)
                + c(i, j) * s(i + 1, j)
            )
            out[i - 1, j - 1] = val / (h * h)
    return out
