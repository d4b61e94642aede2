"""Command-line entry point: ``arks {classify,certify,simulate,sweep,check}``.

Exit codes: 0 success; 1 blow-up-suspected run, infeasible certificate
search or failed check; 2 usage or configuration error.  JSON goes to stdout
with sorted keys and embeds the tool version and the resolved config.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .certificates import InfeasibleReport, search_certificate
from .checks import run_checks
from .config import ConfigError, RunConfig, config_from_dict, load_config
from .model import ModelParams
from .monitors import BLOWUP
from .regimes import verdict
from .serialize import dumps_json, fmt_float
from .solver import SimState, init_state, run

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _header(cfg: RunConfig | None, command: str) -> dict:
    d = {"tool": "arks", "version": __version__, "command": command}
    if cfg is not None:
        d["config"] = cfg.to_dict()
    return d


def _certificate_payload(params: ModelParams) -> tuple[dict, bool]:
    result = search_certificate(params)
    if isinstance(result, InfeasibleReport):
        return result.to_dict(), False
    return {"status": "certified", "certificate": result.to_dict()}, True


def monitor_for(cfg: RunConfig):
    """Monitor settings, with p, q, r from a certificate when requested and found."""
    block = cfg.monitor
    if block.exponents == "certificate":
        result = search_certificate(cfg.model)
        if not isinstance(result, InfeasibleReport):
            c = result.choice
            return block.monitor_config(c.p, c.q, c.r, source="certificate")
    return block.monitor_config(source="config")


def snapshot_csv(state: SimState) -> str:
    """Cell indices, cell-centre coordinates and the three fields."""
    grid = state.grid
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    idx_cols = ["i", "j"][: grid.dim]
    xy_cols = ["x", "y"][: grid.dim]
    writer.writerow(idx_cols + xy_cols + ["u", "v", "w"])
    centers = grid.centers()
    for index in np.ndindex(*grid.shape):
        writer.writerow([str(i) for i in index] + [fmt_float(c[index]) for c in centers]
                        + [fmt_float(a[index]) for a in (state.u, state.v, state.w)])
    return buf.getvalue()


def simulate(cfg: RunConfig) -> tuple[dict, list[tuple[str, str]]]:
    """Run the configured simulation; returns the summary and (filename, text) outputs."""
    init = cfg.initial
    state = init_state(cfg.grid, init["u0"], init["v0"], init["w0"])
    monitor = monitor_for(cfg)
    result = run(state, cfg.model, cfg.control, monitor, cfg.output.snapshot_times)
    v = verdict(cfg.model)
    summary = _header(cfg, "simulate")
    summary.update({
        "theory_n": cfg.model.n,
        "grid_dim": cfg.grid.dim,
        "verdict": v.to_dict(),
        "final_t": result.state.t,
        "message": result.message,
        "report": result.report.summary(),
    })
    files = [("series.csv", result.report.to_csv())]
    for k, snap in enumerate(result.snapshots):
        files.append((f"snapshot_{k:03d}.csv", snapshot_csv(snap)))
    files.append(("summary.json", dumps_json(summary)))
    return summary, files


def _write(out_dir: Path, files) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, text in files:
        with open(out_dir / name, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# sweeps

def _sweep_task(task):
    mode, cfg_dict, changes = task
    cfg_dict = dict(cfg_dict)
    cfg_dict["model"] = dict(cfg_dict["model"], **changes)
    cfg_dict.pop("sweep", None)
    try:
        cfg = config_from_dict(cfg_dict)
    except ConfigError as exc:
        return {"status": "invalid", "error": str(exc)}
    if mode == "classify":
        v = verdict(cfg.model)
        return {"status": "ok", "case_id": v.case_id, "threshold_name": v.threshold_name,
                "threshold_value": v.threshold_value, "decision": v.decision}
    summary, _ = simulate(cfg)
    report = summary["report"]
    return {"status": "ok", "decision": summary["verdict"]["decision"],
            "classification": report["classification"], "termination": report["termination"],
            "steps": report["steps"], "violations": len(report["violations"]), "final_t": summary["final_t"]}


def sweep(cfg: RunConfig, workers: int = 1) -> dict:
    axes = cfg.sweep.axes
    base = cfg.to_dict()
    combos = list(itertools.product(*(a.values for a in axes)))
    tasks = [(cfg.sweep.mode, base, dict(zip((a.name for a in axes), combo))) for combo in combos]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_task, tasks))
    else:
        results = [_sweep_task(t) for t in tasks]
    rows = []
    for (_, _, changes), res in zip(tasks, results):
        rows.append({"params": changes, **res})
    out = _header(cfg, "sweep")
    out["rows"] = rows
    return out


def sweep_csv(result: dict, axis_names) -> str:
    rows = result["rows"]
    extra = []
    for r in rows:
        for k in r:
            if k not in ("params",) and k not in extra:
                extra.append(k)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(list(axis_names) + extra)
    for r in rows:
        cells = [fmt_float(r["params"][a]) for a in axis_names]
        for k in extra:
            v = r.get(k)
            cells.append("" if v is None else fmt_float(v) if isinstance(v, (int, float)) else str(v))
        writer.writerow(cells)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# commands

def cmd_classify(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    payload = _header(cfg, "classify")
    payload["verdict"] = verdict(cfg.model).to_dict()
    out.write(dumps_json(payload))
    return EXIT_OK


def cmd_certify(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    payload = _header(cfg, "certify")
    body, ok = _certificate_payload(cfg.model)
    payload["result"] = body
    # the case verdict and the min-branch of its threshold that the certificate backs
    payload["verdict"] = verdict(cfg.model).to_dict()
    out.write(dumps_json(payload))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_simulate(cfg: RunConfig, out_dir: Path | None = None, out=None) -> int:
    out = out or sys.stdout
    summary, files = simulate(cfg)
    _write(Path(out_dir if out_dir is not None else cfg.output.dir), files)
    out.write(dumps_json(summary))
    return EXIT_FAIL if summary["report"]["classification"] == BLOWUP else EXIT_OK


def cmd_sweep(cfg: RunConfig, workers: int = 1, out_dir: Path | None = None, out=None) -> int:
    out = out or sys.stdout
    if cfg.sweep is None:
        raise ConfigError("sweep: block required for the sweep command")
    result = sweep(cfg, workers)
    if out_dir is not None:
        names = [a.name for a in cfg.sweep.axes]
        _write(Path(out_dir), [("sweep.csv", sweep_csv(result, names)), ("sweep.json", dumps_json(result))])
    out.write(dumps_json(result))
    return EXIT_OK


def cmd_check(out=None) -> int:
    out = out or sys.stdout
    results = run_checks()
    payload = _header(None, "check")
    payload["checks"] = [{"name": r.name, "passed": r.passed, "detail": r.detail} for r in results]
    payload["passed"] = all(r.passed for r in results)
    out.write(dumps_json(payload))
    return EXIT_OK if payload["passed"] else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="arks", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"arks {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("classify", "certify", "simulate", "sweep"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON run configuration")
        if name in ("simulate", "sweep"):
            p.add_argument("--out", help="output directory (overrides output.dir)")
        if name == "simulate":
            p.add_argument("--stride", type=int, help="record every k-th step (overrides monitor.stride)")
        if name == "sweep":
            p.add_argument("--workers", type=int, default=1, help="worker processes")
    sub.add_parser("check")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "check":
            return cmd_check()
        cfg = load_config(args.config)
        if getattr(args, "out", None):
            cfg = replace(cfg, output=replace(cfg.output, dir=args.out))
        if getattr(args, "stride", None) is not None:
            if args.stride < 1:
                raise ConfigError("--stride must be at least 1")
            cfg = replace(cfg, monitor=replace(cfg.monitor, stride=args.stride))
        if args.command == "classify":
            return cmd_classify(cfg)
        if args.command == "certify":
            return cmd_certify(cfg)
        if args.command == "simulate":
            return cmd_simulate(cfg)
        if args.workers < 1:
            raise ConfigError("--workers must be at least 1")
        return cmd_sweep(cfg, args.workers, Path(args.out) if args.out else None)
    except ConfigError as exc:
        print(f"arks: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
