"""Observed spatial and temporal orders of the solver on a decoupled heat mode.

With chi = xi = 0, m1 = 1 and no absorption, u solves the heat equation and
u = 1 + A exp(-pi^2 t) cos(pi x) on [0, 1] with zero-flux ends.

    python3 scripts/convergence_study.py --out results/convergence.csv
"""

import argparse
import csv
import math
from pathlib import Path

import numpy as np

from arks.model import ModelParams
from arks.monitors import MonitorConfig
from arks.solver import Grid, ProfileSpec, StepControl, init_state, run

AMPLITUDE = 0.5


def solve(cells, t_end, dt):
    grid = Grid((cells,), (1.0,))
    params = ModelParams(n=2, m1=1.0, chi=0.0, xi=0.0, K1=0.0, K2=0.0)
    const = ProfileSpec(value=1.0)
    state = init_state(grid, ProfileSpec("cosine", amplitude=AMPLITUDE, offset=1.0), const, const)
    res = run(state, params, StepControl(t_end=t_end, fixed_dt=dt), MonitorConfig(stride=10**9))
    return grid.centers()[0], res.state.u


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--t-space", type=float, default=0.02)
    ap.add_argument("--dt-space", type=float, default=1e-6)
    ap.add_argument("--t-time", type=float, default=0.1)
    ap.add_argument("--out", default="results/convergence.csv")
    args = ap.parse_args(argv)

    rows = []
    prev = None
    for cells in (16, 32, 64, 128):
        x, u = solve(cells, args.t_space, args.dt_space)
        exact = 1 + AMPLITUDE * math.exp(-math.pi**2 * args.t_space) * np.cos(np.pi * x)
        err = float(np.max(np.abs(u - exact)))
        order = math.log2(prev / err) if prev else float("nan")
        rows.append(("space", 1 / cells, args.dt_space, err, order))
        print(f"h = 1/{cells:<4d} max error {err:.3e}  order {order:.3f}")
        prev = err

    dts = (8e-5, 4e-5, 2e-5, 1e-5)
    sols = [solve(64, args.t_time, dt)[1] for dt in dts]
    diffs = [float(np.max(np.abs(a - b))) for a, b in zip(sols, sols[1:])]
    for k, dt in enumerate(dts[1:]):
        order = math.log2(diffs[k - 1] / diffs[k]) if k else float("nan")
        rows.append(("time", 1 / 64, dt, diffs[k], order))
        print(f"dt = {dt:.0e}  successive difference {diffs[k]:.3e}  order {order:.3f}")

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["study", "h", "dt", "error", "observed_order"])
        writer.writerows(rows)
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
