import math

import hypothesis
import hypothesis.strategies as st
import numpy as np
import pytest
from hypothesis.extra.numpy import arrays

from arks.model import ModelParams, eval_f, eval_g
from arks.monitors import BLOWUP, INCONCLUSIVE, MonitorConfig
from arks.solver import (Grid, InvalidInitialData, NegativityBreach, NonFiniteState, ProfileSpec, SimState,
                         StepControl, TimeStepCollapse, init_state, run, stable_dt, step)

HEAT = ModelParams(n=2, chi=1.0, xi=1.0, K1=1.0, K2=1.0)
CONST = ProfileSpec("constant", value=1.0)


def heat_params():
    # chemotaxis and absorption switched off (bypasses validation on purpose)
    return ModelParams(n=2, chi=0.0, xi=0.0, K1=0.0, K2=0.0)


def state_of(u, v, w, lengths=None):
    grid = Grid(u.shape, lengths or (1.0,) * u.ndim)
    return SimState(grid, 0.0, u.astype(float), v.astype(float), w.astype(float))


def mirror(a):
    return 0.25 * ((a + a[::-1]) + (a[:, ::-1] + a[::-1, ::-1]))


field8 = arrays(np.float64, (8, 8), elements=st.floats(0.0, 3.0))


# ---------------------------------------------------------------------------
# grid and initial data

def test_grid_geometry():
    g = Grid((4, 8), (2.0, 1.0))
    assert g.h == (0.5, 0.125)
    assert g.cell_volume * 32 == pytest.approx(g.volume) and g.volume == 2.0


@pytest.mark.parametrize("cells, lengths", [((3,), (1.0,)), ((4, 4, 4), (1, 1, 1)), ((8,), (0.0,)), ((8,), (1, 1))])
def test_grid_rejects(cells, lengths):
    with pytest.raises(ValueError):
        Grid(cells, lengths)


def test_constant_profile_mass():
    g = Grid((16,), (3.0,))
    s = init_state(g, ProfileSpec(value=2.0), CONST, CONST)
    assert np.all(s.u == 2.0)
    assert np.sum(s.u) * g.cell_volume == pytest.approx(2.0 * g.volume)


def test_gaussian_profile_bounded_by_amplitude():
    g = Grid((33, 17), (2.0, 1.0))
    s = init_state(g, ProfileSpec("gaussian", amplitude=1.0, offset=0.0, width=0.2), CONST, CONST)
    assert s.u.max() <= 1.0 and s.u.min() >= 0.0


def test_cosine_profile_positive():
    g = Grid((32,), (1.0,))
    s = init_state(g, ProfileSpec("cosine", amplitude=0.5, offset=1.0, k=1), CONST, CONST)
    assert s.u.min() >= 0.5


def test_negative_profile_rejected():
    g = Grid((16,), (1.0,))
    with pytest.raises(InvalidInitialData, match="v0"):
        init_state(g, CONST, ProfileSpec("cosine", amplitude=1.0, offset=0.0), CONST)


def test_profile_kind_validated():
    with pytest.raises(ValueError):
        ProfileSpec("triangle")


def test_step_control_validation():
    with pytest.raises(ValueError):
        StepControl(dt_min=1.0, dt_max=0.5)
    with pytest.raises(ValueError):
        StepControl(cfl_safety=0.0)


# ---------------------------------------------------------------------------
# time step

def test_heat_dt_example():
    g = Grid((10, 10), (1.0, 1.0))
    s = init_state(g, ProfileSpec("gaussian", amplitude=1.0, width=0.2), CONST, CONST)
    assert stable_dt(s, heat_params(), StepControl(cfl_safety=0.9)) == pytest.approx(0.9 * 0.01 / 4)


def test_homogeneous_dt_ignores_transport():
    g = Grid((10, 10), (1.0, 1.0))
    s = init_state(g, ProfileSpec(value=2.0), CONST, CONST)
    p = HEAT.replace(alpha=1.0, K1=100.0)
    ctl = StepControl(cfl_safety=0.5)
    rate = max(float(eval_f(p, 2.0)), float(eval_g(p, 2.0)))
    assert stable_dt(s, p, ctl) == pytest.approx(0.5 * min(0.01 / 4, 1 / rate))


def test_refinement_quarters_diffusive_dt():
    ctl = StepControl(cfl_safety=0.9, dt_max=1.0)
    dts = []
    for n in (16, 32):
        g = Grid((n, n), (1.0, 1.0))
        s = init_state(g, ProfileSpec("gaussian", amplitude=1.0, width=0.2), CONST, CONST)
        dts.append(stable_dt(s, heat_params(), ctl))
    assert dts[1] == pytest.approx(dts[0] / 4)


def test_dt_clipped_and_collapse():
    g = Grid((8,), (1.0,))
    s = init_state(g, CONST, CONST, CONST)
    assert stable_dt(s, heat_params(), StepControl(dt_max=1e-5)) == 1e-5
    with pytest.raises(TimeStepCollapse):
        stable_dt(s, heat_params(), StepControl(dt_min=0.5, dt_max=1.0))


def test_transport_bound_active_with_gradients():
    g = Grid((16,), (1.0,))
    s = init_state(g, CONST, ProfileSpec("cosine", amplitude=1.0, offset=1.0), CONST)
    ctl = StepControl(dt_max=1.0)
    assert stable_dt(s, HEAT.replace(chi=1e4), ctl) < stable_dt(s, HEAT, ctl)


# ---------------------------------------------------------------------------
# single steps

def test_homogeneous_step_is_pointwise_ode():
    c, V, W = 1.5, 0.8, 0.6
    s = state_of(np.full((6, 6), c), np.full((6, 6), V), np.full((6, 6), W))
    p = HEAT.replace(alpha=0.5, gamma=0.7)
    dt = 1e-3
    new = step(s, p, StepControl(), dt)
    assert np.all(new.u == c)
    assert new.v == pytest.approx(V * (1 - dt * eval_f(p, c)), rel=1e-15)
    assert new.w == pytest.approx(W * (1 - dt * eval_g(p, c)), rel=1e-15)


@hypothesis.given(u=field8, v=field8, w=field8, m1=st.floats(0.5, 2.0), chi=st.floats(0.1, 5), xi=st.floats(0.1, 5))
def test_step_conserves_mass(u, v, w, m1, chi, xi):
    s = state_of(u + 0.1, v, w)
    p = HEAT.replace(m1=m1, chi=chi, xi=xi, m2=1.2, m3=0.8)
    dt = stable_dt(s, p, StepControl(dt_max=1.0))
    new = step(s, p, StepControl(clamp_tol=1e-9), dt)
    m0, m1_ = s.u.sum(), new.u.sum()
    assert abs(m1_ - m0) <= 1e-13 * m0


@hypothesis.given(u=field8, v=field8, w=field8)
def test_step_max_principle_for_signals(u, v, w):
    s = state_of(u + 0.1, v, w)
    p = HEAT.replace(chi=3.0)
    new = step(s, p, StepControl(), stable_dt(s, p, StepControl(dt_max=1.0)))
    assert new.v.max() <= s.v.max() and new.w.max() <= s.w.max()
    assert new.u.min() >= 0 and new.v.min() >= 0 and new.w.min() >= 0


@hypothesis.given(u=field8, v=field8, w=field8, m1=st.floats(0.5, 2.0))
def test_step_preserves_reflection_symmetry(u, v, w, m1):
    s = state_of(mirror(u) + 0.1, mirror(v), mirror(w))
    p = HEAT.replace(m1=m1, chi=4.0, xi=2.0, m2=1.3)
    ctl = StepControl(dt_max=1.0)
    for _ in range(5):
        s = step(s, p, ctl, stable_dt(s, p, ctl))
    for a in (s.u, s.v, s.w):
        assert np.array_equal(a, a[::-1]) and np.array_equal(a, a[:, ::-1])


def test_clamp_and_breach():
    ones = np.ones(8)
    s = state_of(ones, ones, ones)
    p = HEAT.replace(alpha=1.0, K1=1.0)
    new = step(s, p, StepControl(clamp_tol=10.0), 1.5)
    # f(1) = g(1) = 1, so both signals overshoot to -0.5 in every cell
    assert np.all(new.v == 0.0) and np.all(new.w == 0.0) and new.clamp_events == 16
    with pytest.raises(NegativityBreach, match="v"):
        step(s, p, StepControl(clamp_tol=0.1), 1.5)


def test_non_finite_detected():
    big = np.full(8, 1e100)
    s = state_of(big, np.ones(8), np.ones(8))
    p = HEAT.replace(logistic=True, mu=1.0, beta=4.0)
    with pytest.raises(NonFiniteState):
        step(s, p, StepControl(), 1e-3)


# ---------------------------------------------------------------------------
# runs

def test_zero_length_run():
    g = Grid((8,), (1.0,))
    s = init_state(g, CONST, CONST, CONST)
    res = run(s, HEAT, StepControl(t_end=0.0))
    assert res.state is s and res.report.rows == [] and res.report.steps == 0


def test_run_lands_on_t_end_and_records_last():
    g = Grid((16,), (1.0,))
    s = init_state(g, ProfileSpec("cosine", amplitude=0.5, offset=1.0), CONST, CONST)
    res = run(s, HEAT, StepControl(t_end=0.1234), MonitorConfig(stride=7))
    t = res.report.series("t")
    assert res.state.t == 0.1234 and t[-1] == 0.1234 and t[0] == 0.0
    assert np.all(np.diff(t) > 0)


def test_run_deterministic():
    g = Grid((12, 12), (1.0, 1.0))
    s = init_state(g, ProfileSpec("gaussian", amplitude=2.0, offset=0.1, width=0.2),
                   ProfileSpec("gaussian", amplitude=1.0, center=(0.3, 0.6), width=0.3), CONST)
    a = run(s, HEAT.replace(chi=3.0), StepControl(t_end=0.05))
    b = run(s, HEAT.replace(chi=3.0), StepControl(t_end=0.05))
    assert np.array_equal(a.state.u, b.state.u) and a.report.rows == b.report.rows


def test_snapshots_taken_at_requested_times():
    g = Grid((8,), (1.0,))
    s = init_state(g, ProfileSpec("cosine", amplitude=0.5, offset=1.0), CONST, CONST)
    res = run(s, HEAT, StepControl(t_end=0.05), snapshot_times=(0.0, 0.02, 0.05))
    assert [snap.t for snap in res.snapshots] == [0.0, 0.02, 0.05]


def test_instability_is_classified_not_raised():
    g = Grid((16,), (1.0,))
    s = init_state(g, ProfileSpec("cosine", amplitude=0.5, offset=1.0), CONST, CONST)
    res = run(s, HEAT, StepControl(t_end=1.0, fixed_dt=0.05))
    assert res.report.termination in ("negativity-breach", "non-finite")
    assert res.report.classification == BLOWUP


def test_step_budget_is_inconclusive():
    g = Grid((8,), (1.0,))
    s = init_state(g, CONST, CONST, CONST)
    res = run(s, HEAT, StepControl(t_end=1.0, max_steps=3))
    assert res.report.termination == "step-budget" and res.report.classification == INCONCLUSIVE


def test_heat_mode_decays_at_exact_rate():
    g = Grid((64,), (1.0,))
    s = init_state(g, ProfileSpec("cosine", amplitude=0.5, offset=1.0), CONST, CONST)
    T = 0.02
    res = run(s, heat_params(), StepControl(t_end=T, fixed_dt=1e-5), MonitorConfig(stride=10_000))
    x = g.centers()[0]
    exact = 1 + 0.5 * math.exp(-math.pi**2 * T) * np.cos(np.pi * x)
    assert np.max(np.abs(res.state.u - exact)) < 1e-4
