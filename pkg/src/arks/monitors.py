"""A-priori quantities tracked along a simulation, and run classification.

Each recorded row holds the mass, the three sup norms, the L^p norm of u and
the energy-type functional

    y(t) = int (u+1)^p + int |grad v|^(2q) + int |grad w|^(2r),

all by cell quadrature.  Rows are checked against the mass bound and the
sup-norm bounds of the signals; a run is then classified from its series.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .model import ModelParams
from .serialize import fmt_float

FLAG_RTOL = 1e-8
BOUNDED = "bounded-consistent"
BLOWUP = "blow-up-suspected"
INCONCLUSIVE = "inconclusive"

# termination reasons that count as a blow-up signal
BLOWUP_REASONS = ("dt-collapse", "negativity-breach", "non-finite", "u-max-exceeded")

NOTES = (
    "finite-p gap: boundedness needs int u^p bounded for arbitrarily large p; "
    "only the configured p is monitored",
    "plateau test: bounded-consistent requires the last-quartile relative growth "
    "rate of the L^p norm of u to stay below the configured threshold; this "
    "finite-horizon test is a modelling choice",
)


@dataclass(frozen=True)
class MassBound:
    m: float
    paper_min: float
    ode_max: float
    effective: float


def compute_mass_bound(params: ModelParams, m: float, volume: float) -> MassBound:
    """Mass bound from the logistic ODE comparison; both composites are kept.

    Integrating the u-equation and applying Jensen gives
    y' <= k+ y - mu |Omega|^(1-beta) y^beta, whose equilibrium is
    (k+/mu)^(1/(beta-1)) |Omega|.  Comparison bounds the mass by the larger
    of y(0) and that equilibrium, which is what gets enforced.
    """
    if not params.logistic:
        return MassBound(m, m, m, m)
    k_plus = max(params.k, 0.0)
    equilibrium = (k_plus / params.mu) ** (1.0 / (params.beta - 1.0)) * volume
    lo, hi = min(m, equilibrium), max(m, equilibrium)
    return MassBound(m, lo, hi, hi)


@dataclass(frozen=True)
class MonitorConfig:
    """Monitor exponents and classification thresholds.

    ``source`` records where p, q, r came from ("config" or "certificate").
    """

    p: float = 4.0
    q: float = 2.0
    r: float = 2.0
    u_max: float = 1e6
    stride: int = 1
    growth_threshold: float = 0.01
    source: str = "config"

    def __post_init__(self):
        if not (self.p >= 1 and self.q >= 1 and self.r >= 1):
            raise ValueError("monitor exponents p, q, r must be >= 1")
        if self.stride < 1:
            raise ValueError("stride must be at least 1")
        if not self.u_max > 0:
            raise ValueError("u_max must be positive")


@dataclass(frozen=True)
class MonitorRow:
    t: float
    mass: float
    sup_u: float
    sup_v: float
    sup_w: float
    lp_u: float
    y: float
    dt: float


ROW_FIELDS = tuple(MonitorRow.__dataclass_fields__)


def lp_norm(u: np.ndarray, cell_volume: float, p: float) -> float:
    """(sum vol u^p)^(1/p), scaled by max|u| so large p cannot overflow."""
    top = float(np.max(np.abs(u))) if u.size else 0.0
    if top == 0.0 or not math.isfinite(top):
        return top
    return top * float(np.sum(cell_volume * (np.abs(u) / top) ** p)) ** (1.0 / p)


def gradient_magnitude(field: np.ndarray, h: tuple[float, ...]) -> np.ndarray:
    """Central differences with edge padding (mirror of a zero-flux boundary)."""
    sq = np.zeros_like(field, dtype=float)
    for axis, hk in enumerate(h):
        padded = np.pad(field, [(1, 1) if a == axis else (0, 0) for a in range(field.ndim)], mode="edge")
        hi = np.take(padded, range(2, padded.shape[axis]), axis=axis)
        lo = np.take(padded, range(0, padded.shape[axis] - 2), axis=axis)
        sq += ((hi - lo) / (2 * hk)) ** 2
    return np.sqrt(sq)


def functional_y(state, cfg: MonitorConfig) -> float:
    vol = state.grid.cell_volume
    h = state.grid.h
    # certificate exponents can be large; an overflow is recorded as inf
    with np.errstate(over="ignore"):
        total = np.sum(vol * (state.u + 1.0) ** cfg.p)
        total += np.sum(vol * gradient_magnitude(state.v, h) ** (2 * cfg.q))
        total += np.sum(vol * gradient_magnitude(state.w, h) ** (2 * cfg.r))
    return float(total)


def record(state, params: ModelParams, cfg: MonitorConfig, dt: float = 0.0) -> MonitorRow:
    """One row of monitored quantities for ``state``."""
    vol = state.grid.cell_volume
    return MonitorRow(
        t=float(state.t),
        mass=float(np.sum(state.u) * vol),
        sup_u=float(np.max(state.u)),
        sup_v=float(np.max(state.v)),
        sup_w=float(np.max(state.w)),
        lp_u=lp_norm(state.u, vol, cfg.p),
        y=functional_y(state, cfg),
        dt=float(dt),
    )


@dataclass
class MonitorReport:
    """Recorded series, bound violations and the final classification."""

    rows: list[MonitorRow] = field(default_factory=list)
    violations: list[dict] = field(default_factory=list)
    classification: str | None = None
    termination: str = "t_end"
    mass_bound: MassBound | None = None
    sup_v0: float = 0.0
    sup_w0: float = 0.0
    steps: int = 0
    clamp_events: int = 0
    monitor: MonitorConfig = field(default_factory=MonitorConfig)

    @classmethod
    def start(cls, state, params: ModelParams, cfg: MonitorConfig) -> "MonitorReport":
        vol = state.grid.cell_volume
        m = float(np.sum(state.u) * vol)
        return cls(mass_bound=compute_mass_bound(params, m, state.grid.volume),
                   sup_v0=float(np.max(state.v)), sup_w0=float(np.max(state.w)), monitor=cfg)

    def add(self, row: MonitorRow) -> None:
        if self.rows and not row.t > self.rows[-1].t:
            raise ValueError("monitor series must be strictly increasing in t")
        self.rows.append(row)
        checks = (
            ("mass", row.mass, self.mass_bound.effective if self.mass_bound else math.inf),
            ("sup_v", row.sup_v, self.sup_v0),
            ("sup_w", row.sup_w, self.sup_w0),
        )
        for name, value, bound in checks:
            if value > bound * (1 + FLAG_RTOL):
                self.violations.append({"bound": name, "t": row.t, "value": value,
                                        "limit": bound, "excess": value - bound})

    def series(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows], dtype=float)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(ROW_FIELDS)
        for row in self.rows:
            writer.writerow([fmt_float(getattr(row, k)) for k in ROW_FIELDS])
        return buf.getvalue()

    def summary(self) -> dict:
        mb = self.mass_bound
        return {
            "classification": self.classification,
            "termination": self.termination,
            "steps": self.steps,
            "clamp_events": self.clamp_events,
            "records": len(self.rows),
            "violations": self.violations,
            "bounds": {
                "mass": asdict(mb) if mb else None,
                "mass_discrepancy": bool(mb and mb.paper_min != mb.ode_max),
                "sup_v0": self.sup_v0,
                "sup_w0": self.sup_w0,
            },
            "growth_rate": last_quartile_growth(self),
            "monitor": asdict(self.monitor),
            "notes": list(NOTES),
        }


def last_quartile_growth(report: MonitorReport) -> float:
    """Relative growth per unit time of the L^p norm over the last quarter of the run."""
    if len(report.rows) < 2:
        return 0.0
    t = report.series("t")
    lp = report.series("lp_u")
    t_cut = t[0] + 0.75 * (t[-1] - t[0])
    idx = int(np.searchsorted(t, t_cut, side="left"))
    idx = min(idx, len(t) - 2)
    dt = t[-1] - t[idx]
    if lp[idx] == 0.0:
        return 0.0 if lp[-1] == 0.0 else math.inf
    return float((lp[-1] / lp[idx] - 1.0) / dt)


def classify_run(report: MonitorReport, cfg: MonitorConfig | None = None) -> str:
    """Pure function of the report (and thresholds); never mutates it."""
    cfg = cfg or report.monitor
    if report.termination in BLOWUP_REASONS:
        return BLOWUP
    if any(r.sup_u > cfg.u_max or not math.isfinite(r.sup_u) for r in report.rows):
        return BLOWUP
    if report.termination != "t_end" or report.violations:
        return INCONCLUSIVE
    if last_quartile_growth(report) < cfg.growth_threshold:
        return BOUNDED
    return INCONCLUSIVE
