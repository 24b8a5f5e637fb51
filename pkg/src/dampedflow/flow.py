"""Symplectic Euler integration of damped first- and second-order flows.

One step of the scheme, with ``F`` evaluated at the current image::

    v <- (1 - eta*dt) * v + dt * F(u)
    u <- u + dt * v

Setting ``eta = 1/dt`` makes the velocity memoryless and the update
collapses to explicit gradient descent ``u <- u + dt**2 * F(u)``; this is
how the first-order flows are run.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .grid import ImageGrid
from .operators import apply_F_array, gershgorin_bound_array, tv_energy_array
from .stopping import StoppingConfig, band_bounds, rde_array

DIVERGENCE_LIMIT = 1e10

FLOW_KINDS = ("tvf", "mcf", "general")


class FlowDivergenceError(FloatingPointError):
    """The iteration produced non-finite or exploding intensities."""

    def __init__(self, k: int, max_abs: float):
        self.k = k
        self.max_abs = max_abs
        super().__init__(f"flow diverged at iteration {k}: max |u| = {max_abs:.6g}")


@dataclass(frozen=True)
class FixedStep:
    dt: float

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"time step must be positive, got {self.dt}")


@dataclass(frozen=True)
class SafeguardedStep:
    """Step ``min(dt_max, 1/eta, 1/sqrt(bound))`` with a Gershgorin bound."""

    dt_max: float

    def __post_init__(self):
        if not self.dt_max > 0:
            raise ValueError(f"dt_max must be positive, got {self.dt_max}")


StepPolicy = Union[FixedStep, SafeguardedStep]


@dataclass(frozen=True)
class FlowConfig:
    """Parameters of a flow run.

    ``kind`` selects the mobility exponent: ``"tvf"`` (q=0), ``"mcf"``
    (q=1) or ``"general"`` with an explicit ``q`` in [0, 2]. For
    ``order=1`` the damping is forced to ``1/dt`` and ``eta`` is ignored.
    ``stop=None`` disables the RDE test so exactly ``max_iters`` steps run.
    """

    kind: str = "tvf"
    order: int = 2
    eta: Optional[float] = None
    eps: float = 1e-16
    dt_policy: StepPolicy = field(default_factory=lambda: FixedStep(0.003))
    max_iters: int = 100_000
    stop: Optional[StoppingConfig] = field(default_factory=StoppingConfig)
    q: Optional[float] = None
    stride: int = 1

    def __post_init__(self):
        if self.kind not in FLOW_KINDS:
            raise ValueError(f"unknown flow kind {self.kind!r}; expected one of {FLOW_KINDS}")
        if self.kind == "general":
            if self.q is None or not 0.0 <= self.q <= 2.0:
                raise ValueError(f"general flow needs q in [0, 2], got {self.q}")
        elif self.q is not None and self.q != self.exponent:
            raise ValueError(f"q={self.q} contradicts flow kind {self.kind!r}")
        if self.order not in (1, 2):
            raise ValueError(f"order must be 1 or 2, got {self.order}")
        if self.order == 2 and (self.eta is None or not self.eta > 0):
            raise ValueError(f"second-order flow needs eta > 0, got {self.eta}")
        if not self.eps > 0:
            raise ValueError(f"eps must be positive, got {self.eps}")
        if self.max_iters < 0:
            raise ValueError(f"max_iters must be >= 0, got {self.max_iters}")
        if self.stride < 1:
            raise ValueError(f"stride must be >= 1, got {self.stride}")

    @property
    def exponent(self) -> float:
        if self.kind == "tvf":
            return 0.0
        if self.kind == "mcf":
            return 1.0
        return float(self.q)

    def damping(self, dt: float) -> float:
        return 1.0 / dt if self.order == 1 else float(self.eta)

    def to_dict(self) -> dict:
        policy = self.dt_policy
        return {
            "kind": self.kind,
            "q": self.q,
            "order": self.order,
            "eta": self.eta,
            "eps": self.eps,
            "dt_policy": (
                {"fixed": policy.dt}
                if isinstance(policy, FixedStep)
                else {"safeguarded": policy.dt_max}
            ),
            "max_iters": self.max_iters,
            "stop": None if self.stop is None else {"rho": self.stop.rho, "tol": self.stop.tol},
            "stride": self.stride,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FlowConfig":
        d = dict(d)
        pol = d.pop("dt_policy")
        policy = FixedStep(pol["fixed"]) if "fixed" in pol else SafeguardedStep(pol["safeguarded"])
        stop = d.pop("stop")
        return cls(
            dt_policy=policy,
            stop=None if stop is None else StoppingConfig(**stop),
            **d,
        )


@dataclass(frozen=True)
class FlowState:
    u: ImageGrid
    v: ImageGrid
    k: int = 0
    t: float = 0.0
    last_dt: float = 0.0  # 0 until the first step

    @classmethod
    def initial(cls, u0: ImageGrid) -> "FlowState":
        return cls(u0, u0.with_values(np.zeros(u0.shape)))


@dataclass
class MetricsTrace:
    """Per-iteration diagnostics recorded by :func:`run`."""

    k: list = field(default_factory=list)
    t: list = field(default_factory=list)
    dt: list = field(default_factory=list)
    rde: list = field(default_factory=list)
    tv: list = field(default_factory=list)
    kinetic: list = field(default_factory=list)
    entropy: list = field(default_factory=list)
    converged: bool = False

    COLUMNS = ("k", "t", "dt", "rde", "tv", "kinetic", "entropy")

    def append(self, k, t, dt, rde, tv, kinetic):
        self.k.append(k)
        self.t.append(t)
        self.dt.append(dt)
        self.rde.append(rde)
        self.tv.append(tv)
        self.kinetic.append(kinetic)
        self.entropy.append(kinetic + tv)

    def __len__(self):
        return len(self.k)

    @property
    def t_times_tv(self) -> np.ndarray:
        return np.asarray(self.t) * np.asarray(self.tv)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(self.COLUMNS)
            for row in zip(*(getattr(self, c) for c in self.COLUMNS)):
                w.writerow([str(row[0])] + [f"{x:.17g}" for x in row[1:]])

    @classmethod
    def from_csv(cls, path) -> "MetricsTrace":
        trace = cls()
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            for rec in reader:
                trace.k.append(int(rec["k"]))
                for c in cls.COLUMNS[1:]:
                    getattr(trace, c).append(float(rec[c]))
        return trace


def kinetic_energy(v: np.ndarray, h: float) -> float:
    return 0.5 * h * h * float(np.sum(v * v))


def energies(state: FlowState) -> tuple[float, float, float]:
    """``(tv, kinetic, entropy)`` with kinetic ``0.5 * h^2 * sum(v^2)``."""
    tv = tv_energy_array(state.u.values, state.u.h)
    kin = kinetic_energy(state.v.values, state.u.h)
    return tv, kin, tv + kin


def _choose_dt(u: np.ndarray, h: float, cfg: FlowConfig) -> float:
    policy = cfg.dt_policy
    if isinstance(policy, FixedStep):
        return policy.dt
    dt = policy.dt_max
    if cfg.order == 2:
        dt = min(dt, 1.0 / cfg.eta)
    bound = gershgorin_bound_array(u, h, cfg.eps, cfg.exponent)
    if bound > 0:
        dt = min(dt, 1.0 / math.sqrt(bound))
    return dt


def choose_dt(state: FlowState, cfg: FlowConfig) -> float:
    """Time step for the next iteration.

    A fixed policy returns its step unchanged. The safeguarded policy keeps
    ``dt <= 1/eta`` and ``dt**2 * b_max * lambda_max <= 1`` where
    ``b_max * lambda_max`` is over-estimated by the Gershgorin bound of
    ``-F``; a zero bound drops the spectral term.
    """
    return _choose_dt(state.u.values, state.u.h, cfg)


def _advance(u, v, h, dt, cfg):
    eta = cfg.damping(dt)
    F = apply_F_array(u, h, cfg.eps, cfg.exponent)
    v_new = (1.0 - eta * dt) * v + dt * F
    u_new = u + dt * v_new
    return u_new, v_new


def _check_divergence(u: np.ndarray, k: int):
    m = float(np.max(np.abs(u)))
    if not m <= DIVERGENCE_LIMIT:  # also catches NaN
        raise FlowDivergenceError(k, m)


def step(state: FlowState, cfg: FlowConfig, dt: Optional[float] = None) -> FlowState:
    """Advance one symplectic Euler step (velocity first, then position)."""
    if dt is None:
        dt = choose_dt(state, cfg)
    h = state.u.h
    u_new, v_new = _advance(state.u.values, state.v.values, h, dt, cfg)
    _check_divergence(u_new, state.k + 1)
    return FlowState(
        ImageGrid(u_new, h), ImageGrid(v_new, h), state.k + 1, state.t + dt, dt
    )


def run(u0: ImageGrid, cfg: FlowConfig, callback=None) -> tuple[FlowState, MetricsTrace]:
    """Iterate until the RDE drops to ``cfg.stop.tol`` or ``max_iters`` steps.

    Hitting ``max_iters`` is not an error; ``trace.converged`` tells the
    two outcomes apart. ``callback(k, u)`` is called after every step if
    given.
    """
    h = u0.h
    u = u0.values.copy()
    v = np.zeros_like(u)
    stop = cfg.stop
    if stop is not None:
        band_bounds(u.shape[0], u.shape[1], stop.rho)

    def measure():
        return rde_array(u, stop.rho) if stop is not None else float("nan")

    trace = MetricsTrace()
    k, t, dt = 0, 0.0, 0.0
    r = measure()
    trace.append(k, t, dt, r, tv_energy_array(u, h), kinetic_energy(v, h))
    converged = stop is not None and r <= stop.tol
    while not converged and k < cfg.max_iters:
        dt = _choose_dt(u, h, cfg)
        u, v = _advance(u, v, h, dt, cfg)
        k += 1
        t += dt
        _check_divergence(u, k)
        r = measure()
        converged = stop is not None and r <= stop.tol
        if callback is not None:
            callback(k, u)
        if k % cfg.stride == 0 or converged or k == cfg.max_iters:
            trace.append(k, t, dt, r, tv_energy_array(u, h), kinetic_energy(v, h))
    trace.converged = converged
    state = FlowState(ImageGrid(u, h), ImageGrid(v, h), k, t, dt)
    return state, trace
