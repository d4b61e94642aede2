"""Simulate a bounded-verdict instance while scaling the attraction strength chi.

The verdict does not depend on chi; the run classification may.  Each row
records how the monitored run ends.

    python3 scripts/chi_scaling.py --chi 1 5 20 50 --t-end 5 --out results/chi_scaling.csv
"""

import argparse
import csv
import time
from pathlib import Path

from arks.model import ModelParams
from arks.monitors import MonitorConfig
from arks.regimes import verdict
from arks.solver import Grid, ProfileSpec, StepControl, init_state, run


def setup(chi, cells):
    grid = Grid((cells, cells), (4.0, 4.0))
    params = ModelParams(n=2, m1=1.0, m2=1.0, m3=1.0, chi=chi, xi=1.0, alpha=0.4, gamma=0.4)
    state = init_state(grid,
                       ProfileSpec("gaussian", amplitude=1.0, offset=0.1, center=(1.6, 2.0), width=0.5),
                       ProfileSpec("gaussian", amplitude=1.0, offset=0.1, center=(2.4, 2.0), width=0.6),
                       ProfileSpec("gaussian", amplitude=0.5, offset=0.1, center=(2.0, 2.6), width=0.6))
    return params, state


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--chi", type=float, nargs="+", default=[1.0, 5.0, 20.0, 50.0])
    ap.add_argument("--cells", type=int, default=64)
    ap.add_argument("--t-end", type=float, default=5.0)
    ap.add_argument("--out", default="results/chi_scaling.csv")
    args = ap.parse_args(argv)

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["chi", "verdict", "classification", "termination", "final_t", "steps",
                         "max_sup_u", "violations", "seconds"])
        for chi in args.chi:
            params, state = setup(chi, args.cells)
            start = time.perf_counter()
            res = run(state, params, StepControl(t_end=args.t_end), MonitorConfig(stride=100))
            elapsed = time.perf_counter() - start
            rep = res.report
            row = [chi, verdict(params).decision, rep.classification, rep.termination, res.state.t,
                   rep.steps, float(rep.series("sup_u").max()), len(rep.violations), round(elapsed, 2)]
            writer.writerow(row)
            print(" ".join(str(x) for x in row))
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
