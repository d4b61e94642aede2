"""Tabulate case verdicts over an (alpha, gamma) grid and certify each bounded node.

    python3 scripts/regime_atlas.py --n 3 --m1 1.2 --steps 25 --out results/atlas.csv
"""

import argparse
import csv
from pathlib import Path

from arks.certificates import InfeasibleReport, search_certificate
from arks.model import ModelParams
from arks.regimes import Axis, atlas


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=3)
    ap.add_argument("--m1", type=float, default=1.2)
    ap.add_argument("--m2", type=float, default=1.0)
    ap.add_argument("--m3", type=float, default=1.0)
    ap.add_argument("--steps", type=int, default=25)
    ap.add_argument("--out", default="results/atlas.csv")
    args = ap.parse_args(argv)

    base = ModelParams(n=args.n, m1=args.m1, m2=args.m2, m3=args.m3)
    table = atlas(base, Axis("alpha", 0.02, 1.0, args.steps), Axis("gamma", 0.02, 1.0, args.steps))
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    counts = {}
    with open(out, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["alpha", "gamma", "case", "threshold", "decision", "certified"])
        for alpha, gamma, v in table.rows():
            certified = ""
            if v.bounded:
                cert = search_certificate(base.replace(alpha=alpha, gamma=gamma))
                certified = "no" if isinstance(cert, InfeasibleReport) else "yes"
            writer.writerow([f"{alpha:.6g}", f"{gamma:.6g}", v.case_id, "" if v.threshold_value is None else f"{v.threshold_value:.6g}",
                             v.decision, certified])
            key = (v.decision, certified)
            counts[key] = counts.get(key, 0) + 1
    for (decision, certified), k in sorted(counts.items()):
        print(f"{decision:10s} certified={certified or '-':3s} {k:5d}")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
