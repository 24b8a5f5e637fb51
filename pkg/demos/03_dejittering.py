"""
Removing row jitter
===================

Each row of a square indicator is displaced horizontally by a random
integer in [-4, 4]. The level-set curvature flow straightens the ragged
vertical edges; the damped version gets there in far fewer iterations.
"""

from pathlib import Path

import numpy as np

from dampedflow import FixedStep, FlowConfig, StoppingConfig, jitter_rows, run, square_indicator, write_image

out = Path("demo_output")
out.mkdir(exist_ok=True)

clean = square_indicator(128, side=64)
jittered = jitter_rows(clean, 4, seed=3)
write_image(jittered, out / "square_jittered.pgm")


def rms(u):
    return float(np.sqrt(np.mean((u.values - clean.values) ** 2)))


print(f"RMS error of the jittered input: {rms(jittered):.2f}")

dt = 1e-4
for order in (2, 1):
    cfg = FlowConfig(
        kind="mcf",
        order=order,
        eta=1 / (10 * dt) if order == 2 else None,
        eps=1e-16,
        dt_policy=FixedStep(dt),
        stop=StoppingConfig(0.2, 1.0),
        stride=100,
    )
    state, _ = run(jittered, cfg)
    print(f"mcf order {order}: {state.k:6d} iterations, RMS error {rms(state.u):.2f}")
    write_image(state.u, out / f"square_dejittered_order{order}.pgm")
