"""Nonlinear spatial operator shared by the TV and level-set curvature flows.

The operator is ``F(u) = b(u) * div(c(u) grad u)`` where

* ``c = 1 / (eps + |grad u|)`` uses forward differences,
* ``b = |grad u|**q`` uses central differences (``q = 0`` is TV flow,
  ``q = 1`` is level-set mean curvature flow).

Neumann boundaries are realized by replicating the outermost pixel, so
forward differences across the last row/column vanish and the divergence
stencil is conservative.

The ``*_array`` helpers work on bare ndarrays and are what the time
integrator calls; the public functions accept :class:`ImageGrid`.
"""

from __future__ import annotations

import numpy as np

from .grid import ImageGrid


class NonFiniteError(FloatingPointError):
    """A non-finite value appeared while evaluating the operator."""


def _check_eps(eps):
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")


def _check_q(q):
    if not 0.0 <= q <= 2.0:
        raise ValueError(f"mobility exponent q must lie in [0, 2], got {q}")


def forward_differences(u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Forward differences along rows and columns, zero on the far edges."""
    dx = np.zeros_like(u)
    dy = np.zeros_like(u)
    dx[:-1, :] = u[1:, :] - u[:-1, :]
    dy[:, :-1] = u[:, 1:] - u[:, :-1]
    return dx, dy


def coefficients_array(u: np.ndarray, h: float, eps: float) -> np.ndarray:
    dx, dy = forward_differences(u)
    return 1.0 / (eps + np.sqrt(dx * dx + dy * dy) / h)


def mobility_array(u: np.ndarray, h: float, q: float) -> np.ndarray:
    if q == 0:
        return np.ones_like(u)
    p = np.pad(u, 1, mode="edge")
    gx = p[2:, 1:-1] - p[:-2, 1:-1]
    gy = p[1:-1, 2:] - p[1:-1, :-2]
    grad = np.sqrt(gx * gx + gy * gy) / (2.0 * h)
    if q == 1:
        return grad
    return grad**q


def divergence_array(u: np.ndarray, h: float, c: np.ndarray) -> np.ndarray:
    """Five-point ``div(c grad u)`` with zero flux through the boundary."""
    dx, dy = forward_differences(u)
    fx = c * dx
    fy = c * dy
    out = fx + fy
    out[1:, :] -= fx[:-1, :]
    out[:, 1:] -= fy[:, :-1]
    out /= h * h
    return out


def apply_F_array(u: np.ndarray, h: float, eps: float, q: float) -> np.ndarray:
    c = coefficients_array(u, h, eps)
    out = divergence_array(u, h, c)
    if q != 0:
        out *= mobility_array(u, h, q)
    return out


def _raise_if_nonfinite(arr: np.ndarray, what: str):
    if not np.all(np.isfinite(arr)):
        i, j = np.argwhere(~np.isfinite(arr))[0]
        raise NonFiniteError(f"non-finite {what} at pixel ({i}, {j})")


def coefficients(u: ImageGrid, eps: float) -> np.ndarray:
    """Regularized inverse gradient magnitude ``1/(eps + |grad u|)``.

    Every entry lies in ``(0, 1/eps]``; a flat neighbourhood gives exactly
    ``1/eps``.
    """
    _check_eps(eps)
    return coefficients_array(u.values, u.h, eps)


def mobility(u: ImageGrid, q: float) -> np.ndarray:
    """Pointwise factor ``|grad u|**q`` from central differences.

    ``q = 0`` returns an all-ones field (``0**0`` is taken as 1).
    """
    _check_q(q)
    return mobility_array(u.values, u.h, q)


def apply_F(u: ImageGrid, eps: float, q: float) -> ImageGrid:
    """Evaluate ``b(u) * div(c(u) grad u)`` without assembling a matrix."""
    _check_eps(eps)
    _check_q(q)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        out = apply_F_array(u.values, u.h, eps, q)
    _raise_if_nonfinite(out, "operator value")
    return u.with_values(out)


def diagonal_magnitude_array(c: np.ndarray, h: float) -> np.ndarray:
    """|diagonal| of the assembled ``G``, i.e. the sum of its edge weights.

    Off-diagonal magnitudes in a row sum to the same value, since ``G``
    has zero row sums.
    """
    d = np.zeros_like(c)
    d[:-1, :] += c[:-1, :]
    d[1:, :] += c[:-1, :]
    d[:, :-1] += c[:, :-1]
    d[:, 1:] += c[:, :-1]
    return d / (h * h)


def gershgorin_bound_array(u: np.ndarray, h: float, eps: float, q: float) -> float:
    b_max = float(mobility_array(u, h, q).max())
    if b_max == 0.0:
        return 0.0
    c = coefficients_array(u, h, eps)
    return b_max * float(2.0 * diagonal_magnitude_array(c, h).max())


def gershgorin_bound(u: ImageGrid, eps: float, q: float) -> float:
    """Upper bound on the largest eigenvalue of ``-F = -B G``.

    Computed as ``b_max`` times the largest Gershgorin row sum of ``-G``.
    """
    _check_eps(eps)
    _check_q(q)
    bound = gershgorin_bound_array(u.values, u.h, eps, q)
    if not np.isfinite(bound):
        raise NonFiniteError("non-finite Gershgorin bound")
    return bound


def tv_energy_array(u: np.ndarray, h: float) -> float:
    dx, dy = forward_differences(u)
    return h * float(np.hypot(dx, dy).sum())


def tv_energy(u: ImageGrid) -> float:
    """Discrete total variation ``h**2 * sum |grad u|`` (forward differences)."""
    return tv_energy_array(u.values, u.h)
