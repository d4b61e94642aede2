"""Built-in oracle suite run by ``arks check``.

Each check compares a production routine with an independent computation
(brute-force enumeration, dense grids, closed-form solutions) on a fixed
seed, so the report is identical from run to run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .certificates import power_sum_holds, power_sum_lower_bound, young_product_bound
from .model import ModelParams
from .monitors import MonitorConfig
from .oracles import NAMES, brute_force_threshold
from .regimes import TRANSPOSABLE, ThresholdName, compute_threshold
from .solver import Grid, ProfileSpec, StepControl, init_state, run

SEED = 20240601


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def random_tuple(rng: np.random.Generator) -> dict:
    return {
        "m2": float(rng.uniform(-1.0, 3.0)),
        "m3": float(rng.uniform(-1.0, 3.0)),
        "alpha": float(rng.uniform(0.01, 1.0)),
        "gamma": float(rng.uniform(0.01, 1.0)),
        "beta": float(rng.uniform(1.01, 4.0)),
        "n": int(rng.integers(2, 7)),
    }


def _singular(t: dict) -> bool:
    return any(abs(t["n"] * e - 1) < 1e-12 for e in (t["alpha"], t["gamma"]))


def check_threshold_enumeration(count: int = 200, seed: int = SEED) -> CheckResult:
    rng = np.random.default_rng(seed)
    mismatches = 0
    done = 0
    while done < count:
        t = random_tuple(rng)
        if _singular(t):
            continue
        done += 1
        for name in NAMES:
            b = t["beta"] if name.endswith("'") else None
            fast = compute_threshold(ThresholdName(name), t["m2"], t["m3"], t["alpha"], t["gamma"], b, t["n"])
            slow = brute_force_threshold(name, t["m2"], t["m3"], t["alpha"], t["gamma"], b, t["n"])
            mismatches += fast != slow
    return CheckResult("threshold-enumeration", mismatches == 0, f"{count} tuples, {mismatches} mismatches")


def check_transpose(count: int = 200, seed: int = SEED + 1) -> CheckResult:
    rng = np.random.default_rng(seed)
    bad = 0
    done = 0
    while done < count:
        t = random_tuple(rng)
        if _singular(t):
            continue
        done += 1
        for name in sorted(TRANSPOSABLE):
            b = t["beta"] if name.logistic else None
            a = compute_threshold(name, t["m2"], t["m3"], t["alpha"], t["gamma"], b, t["n"], transpose=True)
            s = compute_threshold(name, t["m3"], t["m2"], t["gamma"], t["alpha"], b, t["n"])
            bad += a != s
    return CheckResult("transpose-duality", bad == 0, f"{count} tuples, {bad} mismatches")


def check_spot_values() -> CheckResult:
    got = (brute_force_threshold("A", 1, 1, 0.3, 0.3, n=3),
           brute_force_threshold("F", 1, 1, 1, 1, n=3),
           brute_force_threshold("A'", 1, 1, 0.3, 0.3, b=2, n=3))
    ok = math.isclose(got[0], 2 / 3, rel_tol=1e-15) and got[1] == 1.5 and got[2] == 0
    return CheckResult("spot-values", ok, "A=%r F=%r A'=%r" % got)


def check_young(count: int = 20, seed: int = SEED + 2) -> CheckResult:
    rng = np.random.default_rng(seed)
    base = young_product_bound(0.25, 0.25, 1.0)
    ok = abs(base - 0.125) <= 0.00125
    axis = np.logspace(-6, 6, 100)
    a, b = np.meshgrid(axis, axis)
    for _ in range(count):
        d1, d2 = rng.uniform(0.01, 0.49, size=2)
        eps = float(rng.uniform(0.01, 10.0))
        d = young_product_bound(d1, d2, eps)
        ok &= bool(np.all(a**d1 * b**d2 <= eps * (a + b) + d))
    return CheckResult("young-bound", bool(ok), f"d(0.25,0.25,1)={base!r}; {count} random grids")


def check_power_sum(count: int = 20, seed: int = SEED + 3) -> CheckResult:
    rng = np.random.default_rng(seed)
    ok = True
    for _ in range(count):
        exps = rng.uniform(0.1, 4.0, size=3)
        d6, dh, dt = power_sum_lower_bound(*exps)
        x = rng.uniform(0, 1, size=(3, 10_000)) * 10.0 ** rng.uniform(-3, 3, size=(3, 10_000))
        ok &= bool(np.all(power_sum_holds(exps, d6, dh, dt, *x)))
    return CheckResult("power-sum-bound", bool(ok), f"{count} random exponent triples")


def check_conservation() -> CheckResult:
    grid = Grid((16, 16), (2.0, 2.0))
    params = ModelParams(n=2, m1=1.0, alpha=0.4, gamma=0.4, chi=2.0, xi=1.0)
    state = init_state(grid, ProfileSpec("gaussian", amplitude=2.0, offset=0.2, center=(0.7, 1.1), width=0.3),
                       ProfileSpec("gaussian", amplitude=1.0, offset=0.1, center=(1.3, 0.9), width=0.4),
                       ProfileSpec("gaussian", amplitude=1.0, offset=0.1, center=(1.0, 1.4), width=0.3))
    res = run(state, params, StepControl(t_end=math.inf, max_steps=500), MonitorConfig(stride=50))
    mass = res.report.series("mass")
    drift = float(np.max(np.abs(mass - mass[0])) / mass[0])
    sv, sw = res.report.series("sup_v"), res.report.series("sup_w")
    monotone = bool(np.all(np.diff(sv) <= 0) and np.all(np.diff(sw) <= 0))
    return CheckResult("conservation", drift <= 1e-12 and monotone,
                       f"relative mass drift {drift:.3e} over 500 steps; sup_v/sup_w monotone={monotone}")


def check_homogeneous_decay() -> CheckResult:
    grid = Grid((8,), (1.0,))
    params = ModelParams(n=2, K1=1.0, alpha=1.0)
    state = init_state(grid, ProfileSpec(value=2.0), ProfileSpec(value=1.0), ProfileSpec(value=1.0))
    res = run(state, params, StepControl(t_end=0.5, fixed_dt=1e-4), MonitorConfig(stride=1000))
    err = float(np.max(np.abs(res.state.v - math.exp(-1.0))))
    uniform = bool(np.all(res.state.v == res.state.v[0]))
    return CheckResult("homogeneous-decay", err <= 1e-3 and uniform, f"max |v - e^-1| = {err:.3e}")


ALL_CHECKS = (check_threshold_enumeration, check_transpose, check_spot_values, check_young,
              check_power_sum, check_conservation, check_homogeneous_decay)


def run_checks() -> list[CheckResult]:
    return [c() for c in ALL_CHECKS]
