"""Finite-volume solver for the attraction-repulsion system with absorption.

    u_t = div((u+1)^(m1-1) grad u - chi u (u+1)^(m2-1) grad v + xi u (u+1)^(m3-1) grad w) + h(u)
    v_t = lap v - f(u) v
    w_t = lap w - g(u) w

on a rectangle with zero-flux boundaries.  Cell averages are advanced by
explicit Euler.  Every spatial operator is a difference of face fluxes, so
with h = 0 the total mass of u telescopes exactly; boundary faces carry no
flux.  The chemotactic fluxes are upwinded separately, each by the sign of
its own face velocity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .model import ModelParams, eval_diffusion, eval_f, eval_g, eval_h
from .monitors import (BLOWUP, BOUNDED, MonitorConfig, MonitorReport, classify_run,
                       record)


class InvalidInitialData(ValueError):
    """A profile sampled to a negative or non-finite value."""


class SolverSignal(RuntimeError):
    """Base class for numerical signals that end a run."""

    reason = "instability"


class TimeStepCollapse(SolverSignal):
    reason = "dt-collapse"


class NegativityBreach(SolverSignal):
    reason = "negativity-breach"


class NonFiniteState(SolverSignal):
    reason = "non-finite"


@dataclass(frozen=True)
class Grid:
    """Uniform cell-centred grid on [0, L_1] x ... x [0, L_dim]."""

    cells: tuple[int, ...]
    lengths: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "cells", tuple(int(c) for c in self.cells))
        object.__setattr__(self, "lengths", tuple(float(x) for x in self.lengths))
        if len(self.cells) not in (1, 2) or len(self.lengths) != len(self.cells):
            raise ValueError("grid must be 1D or 2D with one length per axis")
        if any(c < 4 for c in self.cells):
            raise ValueError("each axis needs at least 4 cells")
        if not all(x > 0 and math.isfinite(x) for x in self.lengths):
            raise ValueError("lengths must be positive and finite")

    @property
    def dim(self) -> int:
        return len(self.cells)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.cells

    @property
    def h(self) -> tuple[float, ...]:
        return tuple(L / n for L, n in zip(self.lengths, self.cells))

    @property
    def cell_volume(self) -> float:
        return math.prod(self.h)

    @property
    def volume(self) -> float:
        return math.prod(self.lengths)

    def centers(self) -> list[np.ndarray]:
        """Cell-centre coordinates, one array of field shape per axis."""
        axes = [(np.arange(n) + 0.5) * hk for n, hk in zip(self.cells, self.h)]
        return list(np.meshgrid(*axes, indexing="ij"))


PROFILE_KINDS = ("constant", "gaussian", "cosine")


@dataclass(frozen=True)
class ProfileSpec:
    """Initial profile.

    constant: ``value``.
    gaussian: offset + amplitude exp(-|x - center|^2 / (2 width^2)).
    cosine:   offset + amplitude prod_i cos(k_i pi x_i / L_i).
    """

    kind: str = "constant"
    value: float = 0.0
    amplitude: float = 1.0
    offset: float = 0.0
    center: tuple[float, ...] | None = None
    width: float = 0.1
    k: tuple[int, ...] | int = 1

    def __post_init__(self):
        if self.kind not in PROFILE_KINDS:
            raise ValueError(f"unknown profile kind {self.kind!r}")
        if self.kind == "gaussian" and not self.width > 0:
            raise ValueError("gaussian width must be positive")

    def sample(self, grid: Grid) -> np.ndarray:
        x = grid.centers()
        if self.kind == "constant":
            return np.full(grid.shape, float(self.value))
        if self.kind == "gaussian":
            center = self.center if self.center is not None else tuple(L / 2 for L in grid.lengths)
            if len(center) != grid.dim:
                raise ValueError("gaussian center must have one entry per axis")
            r2 = sum((xk - ck) ** 2 for xk, ck in zip(x, center))
            return self.offset + self.amplitude * np.exp(-r2 / (2 * self.width**2))
        ks = self.k if isinstance(self.k, (tuple, list)) else (self.k,) * grid.dim
        if len(ks) != grid.dim:
            raise ValueError("cosine k must have one entry per axis")
        mode = np.ones(grid.shape)
        for xk, kk, L in zip(x, ks, grid.lengths):
            mode = mode * np.cos(kk * np.pi * xk / L)
        return self.offset + self.amplitude * mode


@dataclass
class SimState:
    grid: Grid
    t: float
    u: np.ndarray
    v: np.ndarray
    w: np.ndarray
    clamp_events: int = 0

    def copy(self) -> "SimState":
        return SimState(self.grid, self.t, self.u.copy(), self.v.copy(), self.w.copy(), self.clamp_events)


@dataclass(frozen=True)
class StepControl:
    """Time-stepping controls.

    ``fixed_dt`` bypasses the adaptive bound (used by exactness and
    convergence studies); ``max_steps`` caps the work of a single run.
    """

    t_end: float = 1.0
    cfl_safety: float = 0.45
    dt_min: float = 1e-12
    dt_max: float = 1e-2
    clamp_tol: float = 1e-12
    max_steps: int = 10_000_000
    fixed_dt: float | None = None

    def __post_init__(self):
        if not 0 < self.cfl_safety <= 1:
            raise ValueError("cfl_safety must lie in (0,1]")
        if not 0 < self.dt_min < self.dt_max:
            raise ValueError("need 0 < dt_min < dt_max")
        if not self.t_end >= 0:
            raise ValueError("t_end must be nonnegative")
        if not self.clamp_tol >= 0:
            raise ValueError("clamp_tol must be nonnegative")
        if self.fixed_dt is not None and not self.fixed_dt > 0:
            raise ValueError("fixed_dt must be positive")

    def replace(self, **changes) -> "StepControl":
        return replace(self, **changes)


def init_state(grid: Grid, u0: ProfileSpec, v0: ProfileSpec, w0: ProfileSpec, t0: float = 0.0) -> SimState:
    fields_ = []
    for name, spec in (("u0", u0), ("v0", v0), ("w0", w0)):
        a = np.asarray(spec.sample(grid), dtype=float)
        if not np.all(np.isfinite(a)):
            raise InvalidInitialData(f"{name} has non-finite samples")
        if np.any(a < 0):
            raise InvalidInitialData(f"{name} has negative samples (min {a.min():.3g})")
        fields_.append(a)
    return SimState(grid, float(t0), *fields_)


# ---------------------------------------------------------------------------
# face quantities

def _lo_hi(a: np.ndarray, axis: int) -> tuple[np.ndarray, np.ndarray]:
    lo = [slice(None)] * a.ndim
    hi = [slice(None)] * a.ndim
    lo[axis] = slice(0, -1)
    hi[axis] = slice(1, None)
    return a[tuple(lo)], a[tuple(hi)]


def _divergence(flux: np.ndarray, axis: int, hk: float) -> np.ndarray:
    """(F_{i+1/2} - F_{i-1/2}) / h with zero flux on both boundary faces."""
    shape = list(flux.shape)
    shape[axis] = 1
    zero = np.zeros(shape)
    return np.diff(flux, axis=axis, prepend=zero, append=zero) / hk


def _chemotactic_speed(u_lo, u_hi, grad, coef, m):
    """Face speed coef (u_donor+1)^(m-1) grad with the donor chosen by sign of grad."""
    donor = np.where(grad >= 0, u_lo, u_hi)
    return coef * np.power(donor + 1.0, m - 1.0) * grad, donor


def _u_flux(u, v, w, params: ModelParams, axis: int, hk: float) -> np.ndarray:
    """Net transport flux of u through interior faces along ``axis`` (positive = towards higher index).

    Attraction moves cells up grad v, repulsion down grad w; each flux takes
    its donor cell from its own velocity sign.
    """
    u_lo, u_hi = _lo_hi(u, axis)
    d_face = 0.5 * (eval_diffusion(params, u_lo) + eval_diffusion(params, u_hi))
    diffusive = -d_face * (u_hi - u_lo) / hk
    v_lo, v_hi = _lo_hi(v, axis)
    w_lo, w_hi = _lo_hi(w, axis)
    gv = (v_hi - v_lo) / hk
    gw = -(w_hi - w_lo) / hk
    speed_a, donor_a = _chemotactic_speed(u_lo, u_hi, gv, params.chi, params.m2)
    speed_r, donor_r = _chemotactic_speed(u_lo, u_hi, gw, params.xi, params.m3)
    return diffusive + speed_a * donor_a + speed_r * donor_r


def _laplacian(a: np.ndarray, h: tuple[float, ...]) -> np.ndarray:
    out = np.zeros_like(a)
    for axis, hk in enumerate(h):
        lo, hi = _lo_hi(a, axis)
        out = out + _divergence((hi - lo) / hk, axis, hk)
    return out


# ---------------------------------------------------------------------------
# time step

def stable_dt(state: SimState, params: ModelParams, ctl: StepControl) -> float:
    """Adaptive explicit-Euler step: safety times the smallest of the bounds.

    Diffusion: 1 / (2 D sum_k h_k^-2), which is h^2/(2 dim D) on square cells,
    for u with D the largest face coefficient and for v, w with D = 1.
    Transport: min h / (2 dim A) with A the largest face speed of attraction
    plus repulsion; a cell can lose mass through all 2 dim faces at once.
    Reactions: 1 / (largest pointwise absorption or logistic rate).
    """
    grid = state.grid
    inv_h2 = sum(1.0 / hk**2 for hk in grid.h)
    d_max = 0.0
    a_max = 0.0
    u, v, w = state.u, state.v, state.w
    for axis, hk in enumerate(grid.h):
        u_lo, u_hi = _lo_hi(u, axis)
        d_face = 0.5 * (eval_diffusion(params, u_lo) + eval_diffusion(params, u_hi))
        d_max = max(d_max, float(np.max(d_face)))
        v_lo, v_hi = _lo_hi(v, axis)
        w_lo, w_hi = _lo_hi(w, axis)
        gv = (v_hi - v_lo) / hk
        gw = -(w_hi - w_lo) / hk
        sa, _ = _chemotactic_speed(u_lo, u_hi, gv, params.chi, params.m2)
        sr, _ = _chemotactic_speed(u_lo, u_hi, gw, params.xi, params.m3)
        a_max = max(a_max, float(np.max(np.abs(sa) + np.abs(sr))))
    bounds = [1.0 / (2.0 * max(d_max, 1.0) * inv_h2)]
    if a_max > 0:
        bounds.append(min(grid.h) / (2 * grid.dim * a_max))
    rate = max(float(np.max(eval_f(params, u))), float(np.max(eval_g(params, u))))
    if params.logistic:
        rate = max(rate, max(params.k, 0.0) + params.mu * float(np.max(u)) ** (params.beta - 1.0))
    if rate > 0:
        bounds.append(1.0 / rate)
    dt = ctl.cfl_safety * min(bounds)
    if not math.isfinite(dt) or dt < ctl.dt_min:
        raise TimeStepCollapse(f"stable dt {dt:.3g} below dt_min {ctl.dt_min:.3g}")
    return min(dt, ctl.dt_max)


def _settle(name: str, a: np.ndarray, tol: float) -> tuple[np.ndarray, int]:
    if not np.all(np.isfinite(a)):
        raise NonFiniteState(f"{name} became non-finite")
    low = float(np.min(a))
    if low >= 0:
        return a, 0
    if low <= -tol:
        raise NegativityBreach(f"{name} reached {low:.3g}")
    neg = a < 0
    return np.where(neg, 0.0, a), int(np.count_nonzero(neg))


def step(state: SimState, params: ModelParams, ctl: StepControl, dt: float) -> SimState:
    """One explicit Euler step of size ``dt``."""
    grid = state.grid
    u, v, w = state.u, state.v, state.w
    with np.errstate(over="ignore", invalid="ignore"):
        du = np.zeros_like(u)
        for axis, hk in enumerate(grid.h):
            du = du - _divergence(_u_flux(u, v, w, params, axis, hk), axis, hk)
        du = du + eval_h(params, u)
        dv = _laplacian(v, grid.h) - eval_f(params, u) * v
        dw = _laplacian(w, grid.h) - eval_g(params, u) * w
        u_new = u + dt * du
        v_new = v + dt * dv
        w_new = w + dt * dw
    clamps = state.clamp_events
    u_new, c_u = _settle("u", u_new, ctl.clamp_tol)
    v_new, c_v = _settle("v", v_new, ctl.clamp_tol)
    w_new, c_w = _settle("w", w_new, ctl.clamp_tol)
    return SimState(grid, state.t + dt, u_new, v_new, w_new, clamps + c_u + c_v + c_w)


@dataclass
class RunResult:
    state: SimState
    report: MonitorReport
    message: str = ""
    snapshots: list[SimState] = field(default_factory=list)


def run(state: SimState, params: ModelParams, ctl: StepControl,
        monitor: MonitorConfig | None = None, snapshot_times: tuple[float, ...] = ()) -> RunResult:
    """Integrate to ``ctl.t_end``; numerical signals end the run, they do not raise.

    Rows are recorded at the initial time, every ``monitor.stride`` steps and
    at the final step.  The last step is shortened to land on ``t_end``.
    """
    monitor = monitor or MonitorConfig()
    report = MonitorReport.start(state, params, monitor)
    snaps = sorted(float(t) for t in snapshot_times)
    taken: list[SimState] = []
    if not ctl.t_end > state.t:
        report.classification = classify_run(report, monitor)
        return RunResult(state, report, "", [state.copy() for t in snaps if t <= state.t])
    report.add(record(state, params, monitor, 0.0))
    while snaps and snaps[0] <= state.t:
        taken.append(state.copy())
        snaps.pop(0)
    message = ""
    steps = 0
    last_dt = 0.0
    recorded = True
    while state.t < ctl.t_end:
        if steps >= ctl.max_steps:
            report.termination = "step-budget"
            break
        try:
            dt = ctl.fixed_dt if ctl.fixed_dt is not None else stable_dt(state, params, ctl)
            remaining = ctl.t_end - state.t
            if snaps:
                remaining = min(remaining, snaps[0] - state.t)
            last = dt >= remaining
            dt = remaining if last else dt
            new = step(state, params, ctl, dt)
            if last:
                # land exactly on the target time despite rounding in t + dt
                new.t = ctl.t_end if remaining == ctl.t_end - state.t else snaps[0]
        except (TimeStepCollapse, NegativityBreach, NonFiniteState) as exc:
            report.termination = exc.reason
            message = str(exc)
            break
        state = new
        steps += 1
        last_dt = dt
        recorded = False
        if snaps and state.t >= snaps[0]:
            taken.append(state.copy())
            snaps.pop(0)
        if steps % monitor.stride == 0 or state.t >= ctl.t_end:
            report.add(record(state, params, monitor, dt))
            recorded = True
        if float(np.max(state.u)) > monitor.u_max:
            report.termination = "u-max-exceeded"
            break
    if not recorded:
        report.add(record(state, params, monitor, last_dt))
    report.steps = steps
    report.clamp_events = state.clamp_events
    report.classification = classify_run(report, monitor)
    return RunResult(state, report, message, taken)


__all__ = [
    "BLOWUP", "BOUNDED", "Grid", "InvalidInitialData", "NegativityBreach", "NonFiniteState",
    "ProfileSpec", "RunResult", "SimState", "StepControl", "TimeStepCollapse", "init_state",
    "run", "stable_dt", "step",
]
