"""Damped second-order total variation and level-set curvature flows for images."""

__version__ = "0.1.0"

from .grid import ImageGrid, ShapeError, array, neumann_sample, vec
from .operators import apply_F, coefficients, gershgorin_bound, mobility, tv_energy
from .stopping import StoppingConfig, dft2_magnitudes, high_freq_energy, rde
from .flow import (
    FixedStep,
    FlowConfig,
    FlowDivergenceError,
    FlowState,
    MetricsTrace,
    SafeguardedStep,
    choose_dt,
    energies,
    run,
    step,
)
from .degrade import DegradationSpec, add_gaussian_noise, degrade, jitter_rows
from .spectral import SparseOperator, SpectralReport, assemble_A, assemble_F, assemble_G, verify_spectrum
from .pgm import load_image, write_image
from .phantoms import random_smooth_image, smooth_phantom, square_indicator

__all__ = [
    "__version__",
    "ImageGrid",
    "ShapeError",
    "array",
    "neumann_sample",
    "vec",
    "apply_F",
    "coefficients",
    "gershgorin_bound",
    "mobility",
    "tv_energy",
    "StoppingConfig",
    "dft2_magnitudes",
    "high_freq_energy",
    "rde",
    "FixedStep",
    "FlowConfig",
    "FlowDivergenceError",
    "FlowState",
    "MetricsTrace",
    "SafeguardedStep",
    "choose_dt",
    "energies",
    "run",
    "step",
    "DegradationSpec",
    "add_gaussian_noise",
    "degrade",
    "jitter_rows",
    "SparseOperator",
    "SpectralReport",
    "assemble_A",
    "assemble_F",
    "assemble_G",
    "verify_spectrum",
    "load_image",
    "write_image",
    "random_smooth_image",
    "smooth_phantom",
    "square_indicator",
]
