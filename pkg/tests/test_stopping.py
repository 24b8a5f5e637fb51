import math

import numpy as np
import pytest
from conftest import random_grid
from hypothesis import given, settings
from hypothesis import strategies as st

from dampedflow.grid import ImageGrid
from dampedflow.phantoms import smooth_phantom
from dampedflow.stopping import (
    StoppingConfig,
    StoppingConfigError,
    dft2_magnitudes,
    high_freq_energy,
    rde,
)


def naive_dft(u):
    M, N = u.shape
    out = np.zeros((M, N), dtype=complex)
    for p in range(M):
        for r in range(N):
            s = 0j
            for i in range(M):
                for j in range(N):
                    s += u[i, j] * np.exp(-2j * np.pi * (p * i / M + r * j / N))
            out[p, r] = s
    return out


def block_energy_oracle(mag, rho):
    """Sum over 1-based (i, j) in the inclusive high-frequency intervals."""
    M, N = mag.shape
    fm, fn = math.floor(rho * M), math.floor(rho * N)
    total = 0.0
    for i in range(1, M + 1):
        for j in range(1, N + 1):
            if fm <= i <= M - fm and fn <= j <= N - fn:
                total += mag[i - 1, j - 1]
    return total


def test_dft_constant_image():
    n, a = 6, 3.5
    mag = dft2_magnitudes(ImageGrid(np.full((n, n), a)))
    assert mag[0, 0] == pytest.approx(n * n * a)
    mag[0, 0] = 0
    assert np.abs(mag).max() < 1e-12


def test_dft_impulse_is_flat():
    u = np.zeros((5, 7))
    u[2, 3] = 1.0
    np.testing.assert_allclose(dft2_magnitudes(ImageGrid(u)), 1.0, rtol=1e-13)


@pytest.mark.parametrize("shape", [(4, 4), (2, 3), (5, 8), (8, 8), (7, 6)])
def test_dft_matches_naive(rng, shape):
    u = rng.normal(size=shape)
    np.testing.assert_allclose(dft2_magnitudes(ImageGrid(u)), np.abs(naive_dft(u)), atol=1e-10)


def test_hfe_constant_is_zero():
    assert high_freq_energy(ImageGrid(np.full((10, 10), 9.0)), StoppingConfig(0.2, 1.0)) == 0.0


def test_hfe_impulse_counts_block():
    u = np.zeros((8, 8))
    u[0, 0] = 1.0
    g = ImageGrid(u)
    cfg = StoppingConfig(0.25, 1.0)
    assert high_freq_energy(g, cfg) == pytest.approx(25.0)
    assert high_freq_energy(g, cfg) == pytest.approx(block_energy_oracle(np.abs(naive_dft(u)), 0.25))


def test_hfe_checkerboard():
    u = np.fromfunction(lambda i, j: (-1.0) ** (i + j), (8, 8))
    mag = np.abs(naive_dft(u))
    e = high_freq_energy(ImageGrid(u), StoppingConfig(0.25, 1.0))
    assert e == pytest.approx(block_energy_oracle(mag, 0.25), abs=1e-9)
    assert e == pytest.approx(64.0, abs=1e-9)  # all energy in the Nyquist bin


@pytest.mark.parametrize("shape,rho", [((10, 10), 0.2), ((12, 7), 0.3), ((8, 9), 0.25)])
def test_hfe_matches_block_oracle(rng, shape, rho):
    u = rng.normal(size=shape)
    e = high_freq_energy(ImageGrid(u), StoppingConfig(rho, 1.0))
    assert e == pytest.approx(block_energy_oracle(np.abs(naive_dft(u)), rho), rel=1e-12)


@pytest.mark.parametrize("shape,rho", [((4, 4), 0.2), ((3, 20), 0.3), ((5, 5), 0.2)])
def test_hfe_rejects_degenerate_block(shape, rho):
    with pytest.raises(StoppingConfigError):
        high_freq_energy(ImageGrid(np.zeros(shape)), StoppingConfig(rho, 1.0))


@pytest.mark.parametrize("rho,tol", [(0.0, 1.0), (0.5, 1.0), (0.2, 0.0)])
def test_stopping_config_validation(rho, tol):
    with pytest.raises(StoppingConfigError):
        StoppingConfig(rho, tol)


def test_rde_constant_is_zero():
    assert rde(ImageGrid(np.full((10, 10), 3.0)), StoppingConfig()) == 0.0


def test_rde_zero_image_is_zero():
    assert rde(ImageGrid(np.zeros((10, 10))), StoppingConfig()) == 0.0


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.01, 1e4), st.booleans())
def test_rde_scale_invariant(seed, a, negate):
    u = random_grid(np.random.default_rng(seed), 10, 12)
    a = -a if negate else a
    cfg = StoppingConfig(0.2, 1.0)
    assert rde(u.with_values(a * u.values), cfg) == pytest.approx(rde(u, cfg), rel=1e-12)


def test_rde_noise_exceeds_ramp(rng):
    n = 32
    noise = ImageGrid(rng.normal(size=(n, n)))
    ramp = ImageGrid(np.add.outer(np.arange(n), np.arange(n)).astype(float))
    cfg = StoppingConfig(0.2, 1.0)
    assert rde(noise, cfg) > rde(ramp, cfg)


def test_rde_noisy_phantom_exceeds_clean(rng):
    clean = smooth_phantom(64)
    noisy = clean.with_values(clean.values + rng.normal(0, 20, clean.shape))
    cfg = StoppingConfig(0.2, 1.0)
    assert rde(noisy, cfg) > 10 * rde(clean, cfg)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_hfe_subadditive(seed):
    rng = np.random.default_rng(seed)
    u, w = rng.normal(size=(2, 9, 11))
    cfg = StoppingConfig(0.2, 1.0)
    assert high_freq_energy(ImageGrid(u + w), cfg) <= (
        high_freq_energy(ImageGrid(u), cfg) + high_freq_energy(ImageGrid(w), cfg)
    ) * (1 + 1e-12)
