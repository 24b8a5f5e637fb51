"""Command-line driver.

Subcommands::

    dampedflow evolve  IN.pgm OUT.pgm --flow tvf --order 2 --dt 0.003 [...]
    dampedflow degrade IN.pgm OUT.pgm --sigma 20 --jitter 4 --seed 7
    dampedflow verify  IN.pgm --flow mcf --dt 0.01 --eps 0.01 [--output R.json]
    dampedflow square  OUT.pgm [--size 205 --side 150]
    dampedflow replay  RUN.manifest.json [--output O.pgm --metrics M.csv]

Exit codes: 0 success, 1 runtime failure (divergence, I/O, bad image),
2 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Optional

from . import __version__
from .degrade import DegradationSpec, degrade
from .flow import FixedStep, FlowConfig, FlowDivergenceError, FlowState, SafeguardedStep, choose_dt, run
from .pgm import PGMError, load_image, write_image
from .phantoms import SQUARE_SIDE, square_indicator
from .spectral import SpectralBudgetError, verify_spectrum
from .stopping import StoppingConfig, StoppingConfigError

log = logging.getLogger("dampedflow")

EXIT_OK, EXIT_RUNTIME, EXIT_USAGE = 0, 1, 2

# damping defaults: eta = 1 / (factor * dt), as in the denoising experiments
ETA_FACTOR = {"tvf": 50.0, "mcf": 10.0}


class UsageError(Exception):
    pass


@dataclass
class RunManifest:
    command: str
    input: Optional[str]
    output: str
    metrics: Optional[str] = None
    flow: Optional[dict] = None
    degradation: Optional[dict] = None
    h: Optional[float] = None
    size: Optional[int] = None
    side: Optional[int] = None
    wall_clock_s: float = 0.0
    iterations: int = 0
    converged: Optional[bool] = None

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RunManifest":
        return cls(**json.loads(text))

    def save(self, path):
        Path(path).write_text(self.to_json() + "\n")

    @classmethod
    def load(cls, path) -> "RunManifest":
        return cls.from_json(Path(path).read_text())


def default_manifest_path(output) -> Path:
    p = Path(output)
    return p.with_name(p.stem + ".manifest.json")


def parse_flow(text: str) -> tuple[str, Optional[float]]:
    text = text.strip().lower()
    if text in ("tvf", "mcf"):
        return text, None
    if text.startswith("q="):
        try:
            q = float(text[2:])
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad exponent in {text!r}") from None
        if not 0.0 <= q <= 2.0:
            raise argparse.ArgumentTypeError(f"exponent must lie in [0, 2], got {q}")
        return "general", q
    raise argparse.ArgumentTypeError(f"unknown flow {text!r}; use tvf, mcf or q=<val>")


def positive_float(text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not x > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return x


def build_flow_config(args) -> FlowConfig:
    kind, q = args.flow
    if args.order == 1 and args.eta is not None:
        raise UsageError("--eta cannot be combined with --order 1 (damping is fixed to 1/dt)")
    eta = args.eta
    if args.order == 2 and eta is None:
        exponent = {"tvf": 0.0, "mcf": 1.0}.get(kind, q)
        eta = 1.0 / ((ETA_FACTOR["tvf"] if exponent == 0 else ETA_FACTOR["mcf"]) * args.dt)
    policy = SafeguardedStep(args.dt) if args.safeguard else FixedStep(args.dt)
    try:
        stop = StoppingConfig(args.rho, args.tol) if args.rho is not None else None
        return FlowConfig(
            kind=kind,
            q=q,
            order=args.order,
            eta=eta,
            eps=args.eps,
            dt_policy=policy,
            max_iters=args.max_iters,
            stop=stop,
            stride=args.stride,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _add_flow_args(p, with_stop=True):
    p.add_argument("--flow", type=parse_flow, default=("tvf", None), help="tvf, mcf or q=<val>")
    p.add_argument("--order", type=int, choices=(1, 2), default=2)
    p.add_argument("--dt", type=positive_float, default=0.003, help="time step (upper bound with --safeguard)")
    p.add_argument("--eta", type=positive_float, default=None, help="damping; default 1/(50 dt) for tvf, 1/(10 dt) otherwise")
    p.add_argument("--eps", type=positive_float, default=1e-16)
    p.add_argument("--safeguard", action="store_true", help="shrink dt to the contraction bound each step")
    p.add_argument("--h", type=positive_float, default=None, help="grid step; default 1/max(M, N)")
    if with_stop:
        p.add_argument("--rho", type=float, default=0.2)
        p.add_argument("--tol", type=positive_float, default=1.0)
        p.add_argument("--max-iters", type=int, default=100_000)
        p.add_argument("--metrics", default=None, help="CSV file for per-iteration metrics")
        p.add_argument("--stride", type=int, default=1, help="record every n-th iteration")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dampedflow", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evolve", help="run a flow on a PGM image")
    p.add_argument("input")
    p.add_argument("output")
    _add_flow_args(p)
    p.add_argument("--manifest", default=None)

    p = sub.add_parser("degrade", help="add Gaussian noise and/or row jitter")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--sigma", type=float, default=0.0)
    p.add_argument("--jitter", type=int, nargs="?", const=4, default=0, help="max row shift in pixels (bare flag: 4)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--h", type=positive_float, default=None)
    p.add_argument("--manifest", default=None)

    p = sub.add_parser("verify", help="dense spectral report for a small image")
    p.add_argument("input")
    _add_flow_args(p, with_stop=False)
    p.add_argument("--output", default=None, help="JSON report path (default: stdout)")

    p = sub.add_parser("square", help="write the square indicator test image")
    p.add_argument("output")
    p.add_argument("--size", type=int, default=205)
    p.add_argument("--side", type=int, default=SQUARE_SIDE)
    p.add_argument("--manifest", default=None)

    p = sub.add_parser("replay", help="repeat a run from its manifest")
    p.add_argument("manifest")
    p.add_argument("--output", default=None)
    p.add_argument("--metrics", default=None)
    return parser


def _evolve(input_path, output, metrics, cfg: FlowConfig, h) -> RunManifest:
    u0 = load_image(input_path, h)
    start = time.perf_counter()
    state, trace = run(u0, cfg)
    elapsed = time.perf_counter() - start
    write_image(state.u, output)
    if metrics:
        trace.to_csv(metrics)
    log.info("evolve: %d iterations, converged=%s, %.2fs", state.k, trace.converged, elapsed)
    return RunManifest(
        command="evolve",
        input=str(input_path),
        output=str(output),
        metrics=None if metrics is None else str(metrics),
        flow=cfg.to_dict(),
        h=u0.h,
        wall_clock_s=elapsed,
        iterations=state.k,
        converged=trace.converged,
    )


def _degrade(input_path, output, spec: DegradationSpec, h) -> RunManifest:
    u = load_image(input_path, h)
    if spec.jitter_amplitude >= u.N:
        raise UsageError(f"--jitter {spec.jitter_amplitude} must be smaller than the image width {u.N}")
    start = time.perf_counter()
    write_image(degrade(u, spec), output)
    return RunManifest(
        command="degrade",
        input=str(input_path),
        output=str(output),
        degradation=spec.to_dict(),
        h=u.h,
        wall_clock_s=time.perf_counter() - start,
    )


def _square(output, size, side) -> RunManifest:
    try:
        u = square_indicator(size, side)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    write_image(u, output)
    return RunManifest(command="square", input=None, output=str(output), size=size, side=side, h=u.h)


def _replay(m: RunManifest, output=None, metrics=None) -> RunManifest:
    output = output or m.output
    if m.command == "evolve":
        return _evolve(m.input, output, metrics or m.metrics, FlowConfig.from_dict(m.flow), m.h)
    if m.command == "degrade":
        return _degrade(m.input, output, DegradationSpec.from_dict(m.degradation), m.h)
    if m.command == "square":
        return _square(output, m.size, m.side)
    raise UsageError(f"manifest has unknown command {m.command!r}")


def _dispatch(args) -> int:
    if args.command == "evolve":
        cfg = build_flow_config(args)
        manifest = _evolve(args.input, args.output, args.metrics, cfg, args.h)
    elif args.command == "degrade":
        try:
            spec = DegradationSpec(args.sigma, args.jitter, args.seed)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        manifest = _degrade(args.input, args.output, spec, args.h)
    elif args.command == "square":
        manifest = _square(args.output, args.size, args.side)
    elif args.command == "replay":
        manifest = _replay(RunManifest.load(args.manifest), args.output, args.metrics)
        if args.output is None:
            # same outputs as the original run; keep its manifest untouched
            return EXIT_OK
        args.manifest = None
    else:  # verify
        args.rho, args.tol, args.max_iters, args.stride = None, 1.0, 0, 1
        cfg = build_flow_config(args)
        u = load_image(args.input, args.h)
        dt = choose_dt(FlowState.initial(u), cfg)
        report = verify_spectrum(u, cfg, dt)
        text = report.to_json()
        if args.output:
            Path(args.output).write_text(text + "\n")
        else:
            print(text)
        return EXIT_OK
    manifest.save(args.manifest or default_manifest_path(manifest.output))
    return EXIT_OK


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return _dispatch(args)
    except (UsageError, StoppingConfigError, SpectralBudgetError) as exc:
        print(f"dampedflow {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FlowDivergenceError as exc:
        print(f"dampedflow {args.command}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (PGMError, OSError, ValueError) as exc:
        print(f"dampedflow {args.command}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
