"""Explicit operator assembly and dense spectral checks.

``G`` is the matrix of ``u -> div(c grad u)`` in column-stacked ordering,
``F = B G`` adds the mobility, and ``A`` is the one-step iteration matrix
of the symplectic scheme acting on the stacked state ``(u; v)``::

    A = [[I + dt^2 F, dt (1 - dt eta) I],
         [dt F,       (1 - dt eta) I   ]]

These are meant for small grids and serve as the reference for the
matrix-free operator in :mod:`dampedflow.operators`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .flow import FlowConfig
from .grid import ImageGrid, flat_index
from .operators import (
    coefficients_array,
    diagonal_magnitude_array,
    mobility_array,
)

DENSE_BUDGET = 400

OVERDAMPED = "overdamped"
UNDERDAMPED = "underdamped"
CRITICAL = "critical"


class SpectralBudgetError(ValueError):
    pass


@dataclass(frozen=True)
class SparseOperator:
    """COO triples of a square matrix plus a tag naming what it represents."""

    rows: np.ndarray
    cols: np.ndarray
    vals: np.ndarray
    dim: int
    kind: str  # "G", "F" or "A"

    def to_scipy(self) -> sp.csr_matrix:
        return sp.csr_matrix((self.vals, (self.rows, self.cols)), shape=(self.dim, self.dim))

    def to_dense(self) -> np.ndarray:
        return self.to_scipy().toarray()

    def matvec(self, x) -> np.ndarray:
        return self.to_scipy() @ np.asarray(x, dtype=np.float64)


def _edge_list(M: int, N: int):
    """Flat indices of vertically and horizontally adjacent pixel pairs.

    Each pair (p, p') carries the coefficient of its first pixel, which is
    where the forward difference between them is taken.
    """
    I, J = np.meshgrid(np.arange(M), np.arange(N), indexing="ij")
    down = (I[:-1, :], J[:-1, :], I[1:, :], J[1:, :])
    right = (I[:, :-1], J[:, :-1], I[:, 1:], J[:, 1:])
    a, b, wi, wj = [], [], [], []
    for i0, j0, i1, j1 in (down, right):
        a.append(flat_index(i0, j0, M).ravel())
        b.append(flat_index(i1, j1, M).ravel())
        wi.append(i0.ravel())
        wj.append(j0.ravel())
    return np.concatenate(a), np.concatenate(b), np.concatenate(wi), np.concatenate(wj)


def assemble_G(u: ImageGrid, eps: float) -> SparseOperator:
    """Assemble ``G`` as a weighted graph Laplacian over the pixel grid.

    Each forward-difference edge contributes its coefficient (over h^2) to
    the two off-diagonal positions and subtracts it from both diagonal
    entries. Edges leaving the grid do not exist, which is exactly the
    zero-flux Neumann treatment of the matrix-free stencil.
    """
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    M, N = u.shape
    c = coefficients_array(u.values, u.h, eps)
    a, b, wi, wj = _edge_list(M, N)
    w = c[wi, wj] / (u.h * u.h)
    rows = np.concatenate([a, b, a, b])
    cols = np.concatenate([b, a, a, b])
    vals = np.concatenate([w, w, -w, -w])
    m = sp.coo_matrix((vals, (rows, cols)), shape=(M * N, M * N)).tocsr()
    m.sum_duplicates()
    m = m.tocoo()
    return SparseOperator(m.row, m.col, m.data, M * N, "G")


def assemble_F(u: ImageGrid, eps: float, q: float) -> SparseOperator:
    G = assemble_G(u, eps)
    b = mobility_array(u.values, u.h, q).ravel(order="F")
    return SparseOperator(G.rows, G.cols, G.vals * b[G.rows], G.dim, "F")


def assemble_A(u: ImageGrid, cfg: FlowConfig, dt: float) -> SparseOperator:
    """The 2MN x 2MN one-step matrix for state ordering ``(u; v)``."""
    F = assemble_F(u, cfg.eps, cfg.exponent).to_scipy()
    n = F.shape[0]
    damp = 1.0 - dt * cfg.damping(dt)
    I = sp.identity(n, format="csr")
    A = sp.bmat(
        [[I + dt * dt * F, dt * damp * I], [dt * F, damp * I]], format="coo"
    )
    return SparseOperator(A.row, A.col, A.data, 2 * n, "A")


def closed_form_mu(kappa, dt: float, eta: float) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalue pairs of ``A`` for modes where ``-F`` has eigenvalue ``kappa``."""
    kappa = np.asarray(kappa, dtype=np.float64)
    s = dt * kappa + eta
    root = np.sqrt((s * s - 4.0 * kappa).astype(complex))
    return 1.0 - 0.5 * dt * (s + root), 1.0 - 0.5 * dt * (s - root)


def damping_regimes(kappa, dt: float, eta: float, rtol: float = 1e-12) -> list[str]:
    kappa = np.asarray(kappa, dtype=np.float64)
    s = dt * kappa + eta
    disc = s * s - 4.0 * kappa
    scale = np.maximum(s * s, 4.0 * np.abs(kappa))
    out = []
    for d, sc in zip(disc, scale):
        if abs(d) <= rtol * sc:
            out.append(CRITICAL)
        elif d > 0:
            out.append(OVERDAMPED)
        else:
            out.append(UNDERDAMPED)
    return out


def mode_stiffness(u: ImageGrid, eps: float, q: float) -> np.ndarray:
    """Eigenvalues of ``-F`` via the symmetric form ``-B^1/2 G B^1/2``."""
    G = assemble_G(u, eps).to_dense()
    sb = np.sqrt(mobility_array(u.values, u.h, q).ravel(order="F"))
    S = -(sb[:, None] * G * sb[None, :])
    return np.clip(np.linalg.eigvalsh(S), 0.0, None)


@dataclass
class SpectralReport:
    lambda_max_negG: float
    gershgorin_bound: float
    b_max: float
    dt: float
    eta: float
    mu_magnitudes: list = field(default_factory=list)
    regimes: list = field(default_factory=list)
    max_mu_abs: float = 0.0

    @property
    def regime_counts(self) -> dict:
        return {r: self.regimes.count(r) for r in (OVERDAMPED, UNDERDAMPED, CRITICAL)}

    def to_dict(self) -> dict:
        return {
            "lambda_max_negG": self.lambda_max_negG,
            "gershgorin_bound": self.gershgorin_bound,
            "max_mu_abs": self.max_mu_abs,
            "regime_counts": self.regime_counts,
            "b_max": self.b_max,
            "dt": self.dt,
            "eta": self.eta,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def verify_spectrum(u: ImageGrid, cfg: FlowConfig, dt: float) -> SpectralReport:
    """Dense spectra of ``-G`` and ``A`` for one image and step size.

    Reports only; nothing is asserted here.
    """
    M, N = u.shape
    if M * N > DENSE_BUDGET:
        raise SpectralBudgetError(
            f"{M}x{N} grid has {M * N} unknowns; dense verification is limited "
            f"to {DENSE_BUDGET} (e.g. crop to 20x20)"
        )
    q = cfg.exponent
    eta = cfg.damping(dt)
    G = assemble_G(u, cfg.eps).to_dense()
    lam = np.linalg.eigvalsh(-G)
    c = coefficients_array(u.values, u.h, cfg.eps)
    gersh = float(2.0 * diagonal_magnitude_array(c, u.h).max())
    b_max = float(mobility_array(u.values, u.h, q).max())
    kappa = mode_stiffness(u, cfg.eps, q)
    mu = np.linalg.eigvals(assemble_A(u, cfg, dt).to_dense())
    mags = np.abs(mu)
    return SpectralReport(
        lambda_max_negG=float(lam.max()),
        gershgorin_bound=gersh,
        b_max=b_max,
        dt=dt,
        eta=eta,
        mu_magnitudes=sorted(mags.tolist(), reverse=True),
        regimes=damping_regimes(kappa, dt, eta),
        max_mu_abs=float(mags.max()),
    )
