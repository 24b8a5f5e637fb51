import json

import numpy as np
import pytest
from conftest import random_grid
from scipy.optimize import linear_sum_assignment

from dampedflow.flow import FixedStep, FlowConfig, FlowState, SafeguardedStep, choose_dt, step
from dampedflow.grid import ImageGrid, vec
from dampedflow.operators import apply_F, mobility
from dampedflow.spectral import (
    CRITICAL,
    OVERDAMPED,
    UNDERDAMPED,
    SpectralBudgetError,
    assemble_A,
    assemble_F,
    assemble_G,
    closed_form_mu,
    damping_regimes,
    mode_stiffness,
    verify_spectrum,
)


def match_error(a, b):
    cost = np.abs(np.subtract.outer(a, b))
    r, c = linear_sum_assignment(cost)
    return cost[r, c].max()


# -- assembly ----------------------------------------------------------------

def test_assemble_G_constant_2x2():
    G = assemble_G(ImageGrid(np.full((2, 2), 3.0), 1.0), 1.0).to_dense()
    expected = [[-2, 1, 1, 0], [1, -2, 0, 1], [1, 0, -2, 1], [0, 1, 1, -2]]
    np.testing.assert_array_equal(G, expected)


def test_assemble_G_hand_example():
    # c = [[1/2, 1], [1/2, 1]]; flat order (0,0), (1,0), (0,1), (1,1)
    G = assemble_G(ImageGrid([[0.0, 1.0], [0.0, 1.0]], 1.0), 1.0).to_dense()
    expected = [
        [-1.0, 0.5, 0.5, 0.0],
        [0.5, -1.0, 0.0, 0.5],
        [0.5, 0.0, -1.5, 1.0],
        [0.0, 0.5, 1.0, -1.5],
    ]
    np.testing.assert_allclose(G, expected, rtol=1e-15)


@pytest.mark.parametrize("shape", [(2, 2), (3, 5), (6, 4)])
def test_G_structure(rng, shape):
    u = random_grid(rng, *shape)
    G = assemble_G(u, 0.1).to_dense()
    np.testing.assert_array_equal(G, G.T)
    np.testing.assert_allclose(G.sum(axis=1), 0.0, atol=1e-12 * np.abs(G).max())
    off = np.abs(G).sum(axis=1) - np.abs(np.diag(G))
    np.testing.assert_allclose(np.abs(np.diag(G)), off, rtol=1e-13)
    assert np.all(np.diag(G) <= 0)
    assert np.linalg.eigvalsh(G).max() <= 1e-10 * np.abs(G).max()


def test_G_sparsity(rng):
    M, N = 5, 6
    G = assemble_G(random_grid(rng, M, N), 0.5)
    # diagonal + two entries per interior edge
    edges = (M - 1) * N + M * (N - 1)
    assert G.to_scipy().nnz == M * N + 2 * edges


def test_F_rows_scaled_by_mobility(rng):
    u = random_grid(rng, 4, 5)
    G = assemble_G(u, 0.2).to_dense()
    F = assemble_F(u, 0.2, 1.0).to_dense()
    b = vec(ImageGrid(mobility(u, 1.0)))
    np.testing.assert_allclose(F, b[:, None] * G, rtol=1e-15)


@pytest.mark.parametrize("q", [0.0, 1.0])
def test_F_matvec_is_operator(rng, q):
    u = random_grid(rng, 7, 5)
    got = assemble_F(u, 0.05, q).matvec(vec(u))
    ref = vec(apply_F(u, 0.05, q))
    assert np.linalg.norm(got - ref) <= 1e-12 * np.linalg.norm(ref)


# -- iteration matrix ----------------------------------------------------------

@pytest.mark.parametrize("kind", ["tvf", "mcf"])
@pytest.mark.parametrize("order", [1, 2])
def test_A_reproduces_one_step(rng, kind, order):
    u = random_grid(rng, 5, 4)
    v = u.with_values(rng.normal(size=u.shape))
    cfg = FlowConfig(kind=kind, order=order, eta=3.0 if order == 2 else None, eps=0.1, dt_policy=FixedStep(2e-3))
    s1 = step(FlowState(u, v), cfg)
    w = assemble_A(u, cfg, 2e-3).matvec(np.concatenate([vec(u), vec(v)]))
    ref = np.concatenate([vec(s1.u), vec(s1.v)])
    assert np.linalg.norm(w - ref) <= 1e-12 * np.linalg.norm(ref)


def test_A_with_vanishing_F():
    u = ImageGrid(np.full((3, 3), 8.0), 1 / 3)
    cfg = FlowConfig(kind="mcf", eta=20.0, dt_policy=FixedStep(0.01))
    mu = np.sort(np.linalg.eigvals(assemble_A(u, cfg, 0.01).to_dense()).real)
    np.testing.assert_allclose(mu, [0.8] * 9 + [1.0] * 9, rtol=1e-14)


@pytest.mark.parametrize("q", [0.0, 1.0])
def test_closed_form_matches_dense_eigenvalues(rng, q):
    u = random_grid(rng, 4, 3, scale=1.0)
    cfg = FlowConfig(kind="tvf" if q == 0 else "mcf", eta=2.0, eps=0.5, dt_policy=SafeguardedStep(1.0))
    dt = choose_dt(FlowState.initial(u), cfg)
    dense = np.linalg.eigvals(assemble_A(u, cfg, dt).to_dense())
    kappa = mode_stiffness(u, cfg.eps, q)
    lo, hi = closed_form_mu(kappa, dt, cfg.eta)
    assert match_error(dense, np.concatenate([lo, hi])) <= 1e-9


def test_closed_form_2x2_hand_kappa():
    # constant-image G on 2x2 with eps=h=1 has -G spectrum {0, 2, 2, 4}
    u = ImageGrid(np.full((2, 2), 3.0), 1.0)
    kappa = mode_stiffness(u, 1.0, 0.0)
    np.testing.assert_allclose(np.sort(kappa), [0, 2, 2, 4], atol=1e-14)


def test_damping_regimes_classification():
    dt, eta = 0.1, 2.0
    # disc = (dt k + eta)^2 - 4k
    # pick the exact critical stiffness: (0.1 k + 2)^2 = 4k  ->  k = 100 +- sqrt(...)
    k_crit = ((4 - 0.4) - np.sqrt((4 - 0.4) ** 2 - 4 * 0.01 * 4)) / (2 * 0.01)
    assert damping_regimes([k_crit], dt, eta) == [CRITICAL]
    assert damping_regimes([0.0], dt, eta) == [OVERDAMPED]
    assert damping_regimes([10.0], dt, eta) == [UNDERDAMPED]


def test_underdamped_magnitude():
    dt, eta = 0.05, 4.0
    lo, hi = closed_form_mu(np.array([50.0, 200.0]), dt, eta)
    np.testing.assert_allclose(np.abs(lo), np.sqrt(1 - eta * dt), rtol=1e-14)
    np.testing.assert_allclose(np.abs(hi), np.sqrt(1 - eta * dt), rtol=1e-14)


# -- verify_spectrum ---------------------------------------------------------

@pytest.mark.parametrize("kind", ["tvf", "mcf"])
def test_verify_spectrum_report(rng, kind):
    u = random_grid(rng, 6, 6, scale=10.0)
    cfg = FlowConfig(kind=kind, eta=3.0, eps=0.1, dt_policy=SafeguardedStep(1.0))
    dt = choose_dt(FlowState.initial(u), cfg)
    rep = verify_spectrum(u, cfg, dt)
    assert rep.max_mu_abs <= 1 + 1e-10
    assert 0 <= rep.lambda_max_negG <= rep.gershgorin_bound * (1 + 1e-12)
    assert sum(rep.regime_counts.values()) == 36
    assert len(rep.mu_magnitudes) == 72
    kappa = mode_stiffness(u, cfg.eps, cfg.exponent)
    lo, hi = closed_form_mu(kappa, dt, cfg.eta)
    for k, reg, a, b in zip(kappa, rep.regimes, lo, hi):
        if reg == UNDERDAMPED:
            assert abs(abs(a) - np.sqrt(1 - cfg.eta * dt)) <= 1e-10
        elif reg == OVERDAMPED:
            # the kernel of -F (constants, or zero mobility) keeps mu = 1
            top = 1 + 1e-12 if k == 0 else 1
            assert -1 < a.real < top and -1 < b.real < top
    data = json.loads(rep.to_json())
    assert set(data) == {"lambda_max_negG", "gershgorin_bound", "max_mu_abs", "regime_counts", "b_max", "dt", "eta"}
    assert set(data["regime_counts"]) == {OVERDAMPED, UNDERDAMPED, CRITICAL}


def test_verify_spectrum_budget():
    u = ImageGrid(np.zeros((21, 20)))
    cfg = FlowConfig(kind="tvf", eta=1.0)
    with pytest.raises(SpectralBudgetError, match="20x20"):
        verify_spectrum(u, cfg, 0.01)
    verify_spectrum(ImageGrid(np.zeros((20, 20))), cfg, 0.01)
