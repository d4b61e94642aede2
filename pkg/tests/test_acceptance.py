"""Acceptance criteria, one test per criterion.

Each test asserts its tolerance and runtime budget; the terminal summary
prints one pass/fail line per criterion (see conftest.py).
"""

import io
import math
import time

import numpy as np
import pytest

from arks.certificates import (InfeasibleReport, check_certificate, power_sum_holds, power_sum_lower_bound,
                               search_certificate, side_requirement, young_product_bound)
from arks.cli import cmd_simulate
from arks.config import config_from_dict
from arks.model import ModelParams
from arks.monitors import BLOWUP, BOUNDED, MonitorConfig
from arks.oracles import NAMES, brute_force_threshold
from arks.regimes import TRANSPOSABLE, ThresholdName, compute_threshold, verdict
from arks.solver import Grid, ProfileSpec, StepControl, init_state, run

SEED = 1729


def criterion(number, title):
    return pytest.mark.acceptance(number, title)


def report(number, ok, detail):
    print(f"criterion {number}: {'PASS' if ok else 'FAIL'} {detail}")


def random_tuples(rng, count):
    out = []
    while len(out) < count:
        t = dict(m2=float(rng.uniform(-1, 3)), m3=float(rng.uniform(-1, 3)),
                 a=float(rng.uniform(0.01, 1)), g=float(rng.uniform(0.01, 1)),
                 b=float(rng.uniform(1.01, 4)), n=int(rng.integers(2, 7)))
        if min(abs(t["n"] * t["a"] - 1), abs(t["n"] * t["g"] - 1)) > 1e-9:
            out.append(t)
    return out


@criterion(1, "threshold oracle equivalence, 200 tuples at 0 ULP")
def test_threshold_oracle_equivalence():
    tuples = random_tuples(np.random.default_rng(SEED), 200)
    start = time.perf_counter()
    mismatches = []
    for t in tuples:
        for name in NAMES:
            b = t["b"] if name.endswith("'") else None
            fast = compute_threshold(ThresholdName(name), t["m2"], t["m3"], t["a"], t["g"], b, t["n"])
            slow = brute_force_threshold(name, t["m2"], t["m3"], t["a"], t["g"], b, t["n"])
            if fast != slow:
                mismatches.append((name, t, fast, slow))
    elapsed = time.perf_counter() - start
    report(1, not mismatches and elapsed < 1, f"{len(mismatches)} mismatches in {elapsed:.3f} s")
    assert not mismatches
    assert elapsed < 1.0


@criterion(2, "classifier spot values and example verdicts")
def test_classifier_spot_values():
    start = time.perf_counter()
    a = brute_force_threshold("A", 1, 1, 0.3, 0.3, n=3)
    f = brute_force_threshold("F", 1, 1, 1, 1, n=3)
    a_log = brute_force_threshold("A'", 1, 1, 0.3, 0.3, b=2, n=3)
    v1 = verdict(ModelParams(n=3, m1=0.7, m2=1, m3=1, alpha=0.3, gamma=0.3))
    v2 = verdict(ModelParams(n=3, m1=1, m2=1, m3=1, alpha=1, gamma=1))
    v3 = verdict(ModelParams(n=2, m1=10, m2=1, m3=1, alpha=0.5, gamma=0.5))
    elapsed = time.perf_counter() - start
    report(2, True, f"A={a!r} F={f!r} A'={a_log!r} in {elapsed:.3f} s")
    assert a == pytest.approx(2 / 3, rel=1e-15)
    assert f == 1.5 and a_log == 0
    assert (v1.case_id, v1.threshold_name, v1.decision) == ("A1", "A", "bounded")
    assert v1.threshold_value == a
    assert (v2.case_id, v2.decision, v2.threshold_value) == ("A6", "uncovered", 1.5)
    bounds = {s.label: s.bound for s in v2.side_conditions}
    assert bounds["small-attractant"] == pytest.approx(1 / 15)
    assert bounds["small-repellent"] == pytest.approx(1 / 15)
    assert v3.decision == "bounded"
    assert elapsed < 1.0


@criterion(3, "transpose duality, 500 tuples")
def test_transpose_duality():
    tuples = random_tuples(np.random.default_rng(SEED + 1), 500)
    bad = 0
    for t in tuples:
        for name in sorted(TRANSPOSABLE):
            b = t["b"] if name.logistic else None
            lhs = compute_threshold(name, t["m2"], t["m3"], t["a"], t["g"], b, t["n"], transpose=True)
            rhs = compute_threshold(name, t["m3"], t["m2"], t["g"], t["a"], b, t["n"])
            bad += lhs != rhs
    report(3, bad == 0, f"{bad} mismatches over {len(TRANSPOSABLE)} names")
    assert sorted(x.value for x in TRANSPOSABLE) == ["C'", "G", "H", "I", "J", "K"]
    assert bad == 0


def sample_certifiable(rng):
    """A non-logistic instance whose m1 clears its case threshold and both
    signals' certificate requirements (and (n-2)/n) by at least 0.05."""
    n = int(rng.integers(2, 6))
    while True:
        a, g = (float(x) for x in rng.uniform(0.02, 1.0, size=2))
        if min(abs(n * a - 1), abs(n * g - 1)) > 1e-3:
            break
    m2, m3 = (float(x) for x in rng.uniform(-1.0, 2.0, size=2))
    base = ModelParams(n=n, m2=m2, m3=m3, alpha=a, gamma=g)
    floor = max(verdict(base).threshold_value, side_requirement(m2, a, n),
                side_requirement(m3, g, n), (n - 2) / n)
    return base.replace(m1=floor + float(rng.uniform(0.05, 0.5)))


@criterion(4, "certificate soundness on 20 instances and the m1=0.5 counter-instance")
def test_certificate_soundness():
    rng = np.random.default_rng(SEED + 2)
    start = time.perf_counter()
    failures = []
    for _ in range(20):
        params = sample_certifiable(rng)
        v = verdict(params)
        assert v.bounded and params.m1 >= v.threshold_value + 0.05
        cert = search_certificate(params)
        if isinstance(cert, InfeasibleReport):
            failures.append((params, cert.reason))
        elif check_certificate(cert, params):
            failures.append((params, check_certificate(cert, params)))
    counter = search_certificate(ModelParams(n=3, m1=0.5, m2=1, m3=1, alpha=0.3, gamma=0.3))
    elapsed = time.perf_counter() - start
    ok = not failures and isinstance(counter, InfeasibleReport) and elapsed < 30
    report(4, ok, f"{20 - len(failures)}/20 certified; counter-instance "
                  f"{'infeasible' if isinstance(counter, InfeasibleReport) else 'certified'}; {elapsed:.2f} s")
    assert not failures
    assert isinstance(counter, InfeasibleReport)
    assert counter.to_dict()["status"] == "infeasible-within-bounds"
    assert elapsed < 30


@criterion(5, "Young and power-sum bounds on 10^4-point grids")
def test_elementary_bounds():
    rng = np.random.default_rng(SEED + 3)
    start = time.perf_counter()
    base = young_product_bound(0.25, 0.25, 1.0)
    axis = np.logspace(-5, 5, 100)
    a, b = (x.ravel() for x in np.meshgrid(axis, axis))
    young_bad = 0
    for _ in range(50):
        d1 = float(rng.uniform(0.01, 0.98))
        d2 = float(rng.uniform(0.005, 0.99 - d1))
        eps = float(rng.uniform(0.01, 10.0))
        d = young_product_bound(d1, d2, eps)
        young_bad += int(np.sum(a**d1 * b**d2 > eps * (a + b) + d))
    power_bad = 0
    for _ in range(50):
        exps = rng.uniform(0.1, 4.0, size=3)
        d6, d_hat, d_tilde = power_sum_lower_bound(*exps)
        x = rng.uniform(0, 1, size=(3, 10_000)) * 10.0 ** rng.uniform(-3, 3, size=(3, 10_000))
        power_bad += int(np.sum(~power_sum_holds(exps, d6, d_hat, d_tilde, *x)))
    elapsed = time.perf_counter() - start
    ok = abs(base - 0.125) <= 0.00125 and young_bad == 0 and power_bad == 0 and elapsed < 10
    report(5, ok, f"d={base!r}; {young_bad} Young and {power_bad} power-sum violations; {elapsed:.2f} s")
    assert base == pytest.approx(0.125, rel=0.01)
    assert young_bad == 0 and power_bad == 0
    assert elapsed < 10


@pytest.fixture(scope="module")
def mixed_run():
    """2D 64x64, h = 0, mixed gaussian data, prototype kinetics with K1 = K2 = 1, 10^4 steps."""
    grid = Grid((64, 64), (4.0, 4.0))
    params = ModelParams(n=2, m1=1.0, m2=1.0, m3=1.0, chi=1.0, xi=1.0, K1=1.0, K2=1.0, alpha=0.4, gamma=0.4)
    state = init_state(grid,
                       ProfileSpec("gaussian", amplitude=2.0, offset=0.5, center=(1.5, 2.2), width=0.5),
                       ProfileSpec("gaussian", amplitude=1.0, offset=0.2, center=(2.5, 1.5), width=0.6),
                       ProfileSpec("gaussian", amplitude=1.0, offset=0.1, center=(2.0, 2.8), width=0.4))
    res = run(state, params, StepControl(t_end=math.inf, max_steps=10_000), MonitorConfig(stride=100))
    assert res.report.steps == 10_000
    return res


@criterion(6, "discrete mass conservation over 10^4 steps")
def test_discrete_conservation(mixed_run):
    mass = mixed_run.report.series("mass")
    drift = float(np.max(np.abs(mass - mass[0])) / mass[0])
    report(6, drift <= 1e-10, f"relative drift {drift:.3e} over {len(mass)} records")
    assert drift <= 1e-10


@criterion(7, "signal sup norms non-increasing, no violations")
def test_discrete_sup_bounds(mixed_run):
    sv, sw = mixed_run.report.series("sup_v"), mixed_run.report.series("sup_w")
    monotone = bool(np.all(np.diff(sv) <= 0) and np.all(np.diff(sw) <= 0))
    violations = mixed_run.report.violations
    report(7, monotone and not violations, f"monotone={monotone}, {len(violations)} violations")
    assert monotone
    assert violations == []


@criterion(8, "homogeneous exactness")
def test_homogeneous_exactness():
    grid = Grid((16, 16), (1.0, 1.0))
    params = ModelParams(n=2, K1=1.0, alpha=1.0, K2=1.0, gamma=1.0)
    state = init_state(grid, ProfileSpec(value=2.0), ProfileSpec(value=1.0), ProfileSpec(value=1.0))
    res = run(state, params, StepControl(t_end=0.5, fixed_dt=1e-4), MonitorConfig(stride=1000))
    v = res.state.v
    err = float(np.max(np.abs(v - math.exp(-1.0))))
    uniform = bool(np.all(v == v.flat[0]))
    report(8, uniform and err <= 1e-3, f"uniform={uniform}, |v - e^-1| = {err:.3e}")
    assert res.state.t == 0.5
    assert uniform
    assert err <= 1e-3


def heat_solution(cells, t_end, dt):
    grid = Grid((cells,), (1.0,))
    params = ModelParams(n=2, m1=1.0, chi=0.0, xi=0.0, K1=0.0, K2=0.0)
    const = ProfileSpec(value=1.0)
    state = init_state(grid, ProfileSpec("cosine", amplitude=0.5, offset=1.0), const, const)
    res = run(state, params, StepControl(t_end=t_end, fixed_dt=dt), MonitorConfig(stride=10**9))
    return grid, res.state.u


@criterion(9, "spatial order 2 and temporal order 1 on the heat test")
def test_convergence_order():
    start = time.perf_counter()
    t_end = 0.02
    errors = []
    for cells in (16, 32, 64):
        grid, u = heat_solution(cells, t_end, 1e-6)
        x = grid.centers()[0]
        exact = 1.0 + 0.5 * math.exp(-math.pi**2 * t_end) * np.cos(np.pi * x)
        errors.append(float(np.max(np.abs(u - exact))))
    spatial = [math.log2(errors[i] / errors[i + 1]) for i in range(2)]
    # temporal: Richardson-type ratio of successive differences at fixed h
    sols = [heat_solution(64, 0.1, dt)[1] for dt in (4e-5, 2e-5, 1e-5)]
    temporal = math.log2(np.max(np.abs(sols[0] - sols[1])) / np.max(np.abs(sols[1] - sols[2])))
    elapsed = time.perf_counter() - start
    ok = all(abs(o - 2) <= 0.4 for o in spatial) and abs(temporal - 1) <= 0.2 and elapsed < 60
    report(9, ok, f"spatial orders {spatial[0]:.3f}, {spatial[1]:.3f}; temporal {temporal:.3f}; {elapsed:.1f} s")
    assert all(abs(o - 2) <= 0.4 for o in spatial)
    assert abs(temporal - 1) <= 0.2
    assert elapsed < 60


def bounded_instance(chi):
    grid = Grid((64, 64), (4.0, 4.0))
    params = ModelParams(n=2, m1=1.0, m2=1.0, m3=1.0, chi=chi, xi=1.0, alpha=0.4, gamma=0.4)
    state = init_state(grid,
                       ProfileSpec("gaussian", amplitude=1.0, offset=0.1, center=(1.6, 2.0), width=0.5),
                       ProfileSpec("gaussian", amplitude=1.0, offset=0.1, center=(2.4, 2.0), width=0.6),
                       ProfileSpec("gaussian", amplitude=0.5, offset=0.1, center=(2.0, 2.6), width=0.6))
    return params, state


@pytest.mark.slow
@criterion(10, "bounded verdict instance simulates bounded-consistent")
def test_regime_consistent_boundedness():
    start = time.perf_counter()
    params, state = bounded_instance(1.0)
    v = verdict(params)
    assert (v.case_id, v.decision) == ("A1", "bounded")
    ctl = StepControl(t_end=5.0)
    first = run(state, params, ctl, MonitorConfig(stride=100))
    params50, state50 = bounded_instance(50.0)
    second = run(state50, params50, ctl, MonitorConfig(stride=100))
    elapsed = time.perf_counter() - start
    ok = (first.report.classification == BOUNDED and not first.report.violations
          and second.report.classification in (BOUNDED, BLOWUP) and elapsed < 300)
    report(10, ok, f"chi=1: {first.report.classification} ({first.report.steps} steps); "
                   f"chi=50: {second.report.classification} ({second.report.termination}); {elapsed:.1f} s")
    assert first.report.classification == BOUNDED
    assert first.report.violations == []
    assert second.report.classification in (BOUNDED, BLOWUP)
    assert elapsed < 300


@criterion(11, "cmd_simulate is byte-identical across runs")
def test_end_to_end_determinism(tmp_path):
    cfg = config_from_dict({
        "model": {"n": 2, "m1": 1.0, "alpha": 0.4, "gamma": 0.4, "chi": 2.0},
        "grid": {"cells": [24, 24], "lengths": [2.0, 2.0]},
        "initial": {"u0": {"kind": "gaussian", "amplitude": 1.0, "offset": 0.2, "center": [0.8, 1.1], "width": 0.3},
                    "v0": {"kind": "gaussian", "amplitude": 1.0, "offset": 0.1, "center": [1.2, 0.9], "width": 0.4},
                    "w0": {"kind": "constant", "value": 0.5}},
        "control": {"t_end": 0.05},
        "monitor": {"stride": 10},
        "output": {"snapshot_times": [0.025]},
    })
    outputs = []
    for k in range(2):
        out_dir = tmp_path / f"run{k}"
        buf = io.StringIO()
        code = cmd_simulate(cfg, out_dir, buf)
        files = {p.name: p.read_bytes() for p in sorted(out_dir.iterdir())}
        outputs.append((code, buf.getvalue(), files))
    same = outputs[0] == outputs[1]
    names = sorted(outputs[0][2])
    report(11, same, f"files {names}")
    assert {"series.csv", "snapshot_000.csv", "summary.json"} <= set(names)
    assert same
