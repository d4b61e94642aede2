"""Boundedness regimes: threshold constants, case selection and verdicts.

Every threshold is a minimum over branches, each branch a maximum over a few
affine expressions in (m2, alpha) for the attractant side and (m3, gamma) for
the repellent side.  Branches are kept as explicit lists so callers can see
which one attains the minimum.
"""

from __future__ import annotations

import csv
import io
from dataclasses import asdict, dataclass, field
from enum import Enum

import numpy as np

from .model import ModelParams, validate_params


class SingularInputError(ZeroDivisionError):
    """A formula was evaluated at a point where its denominator vanishes."""


class InvalidParams(ValueError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class ThresholdName(str, Enum):
    A = "A"
    B = "B"
    C = "C"
    D = "D"
    E = "E"
    F = "F"
    G = "G"
    H = "H"
    I = "I"  # noqa: E741
    J = "J"
    K = "K"
    A_LOG = "A'"
    B_LOG = "B'"
    C_LOG = "C'"

    @property
    def logistic(self) -> bool:
        return self.value.endswith("'")


# Names whose displays are not symmetric in the two signals; only for these
# does the transpose flag change the value.
TRANSPOSABLE = frozenset(
    {ThresholdName.G, ThresholdName.H, ThresholdName.I, ThresholdName.J, ThresholdName.K, ThresholdName.C_LOG}
)


@dataclass(frozen=True)
class Threshold:
    name: ThresholdName
    transpose: bool = False

    def label(self) -> str:
        return self.name.value + ("^t" if self.transpose else "")

    @classmethod
    def parse(cls, text: str) -> "Threshold":
        transpose = text.endswith("^t")
        base = text[:-2] if transpose else text
        return cls(ThresholdName(base), transpose)


# Term tokens.  "v:" tokens use (m2, alpha), "w:" tokens use (m3, gamma).
#   lin   2m - 1          small  m - 1/n          mid   m - 2/n + e
#   big   m + (ne-2)/(ne-1)   two  2m             beta  2m - beta
#   beta1 2m + 1 - beta   base   (n-2)/n
_BRANCHES: dict[ThresholdName, list[tuple[str, ...]]] = {
    ThresholdName.A: [
        ("v:lin", "w:lin", "base"),
        ("v:small", "w:small", "base"),
        ("v:lin", "w:small", "base"),
        ("v:small", "w:lin", "base"),
        ("v:small", "w:small"),
    ],
    ThresholdName.B: [
        ("v:mid", "w:mid"),
        ("v:two", "w:two", "base"),
        ("v:mid", "w:two", "base"),
        ("v:two", "w:mid", "base"),
    ],
    ThresholdName.C: [
        ("v:big", "w:big"),
        ("v:two", "w:two", "base"),
        ("v:big", "w:two", "base"),
        ("v:two", "w:big", "base"),
    ],
    ThresholdName.D: [
        ("v:big", "w:big"),
        ("v:big", "w:two", "base"),
    ],
    ThresholdName.E: [
        ("v:big", "w:big"),
        ("v:two", "base", "w:big"),
    ],
    ThresholdName.F: [
        ("v:big", "w:big"),
    ],
    ThresholdName.G: [
        ("v:small", "w:mid"),
        ("v:lin", "w:two", "base"),
        ("v:small", "w:two", "base"),
        ("v:lin", "w:mid", "base"),
        ("v:small", "w:mid", "base"),
    ],
    ThresholdName.H: [
        ("v:small", "w:big"),
        ("v:lin", "w:two", "base"),
        ("v:small", "w:two", "base"),
        ("v:lin", "w:big", "base"),
        ("v:small", "w:big", "base"),
    ],
    ThresholdName.I: [
        ("v:small", "w:big"),
        ("v:lin", "w:big", "base"),
        ("v:small", "w:big", "base"),
    ],
    ThresholdName.J: [
        ("v:mid", "w:big"),
        ("v:two", "w:two", "base"),
        ("v:mid", "w:two", "base"),
        ("v:two", "w:big", "base"),
    ],
    ThresholdName.K: [
        ("v:mid", "w:big"),
        ("v:two", "base", "w:big"),
    ],
    ThresholdName.A_LOG: [
        ("v:lin", "w:lin", "base"),
        ("v:small", "w:small", "base"),
        ("v:lin", "w:small", "base"),
        ("v:small", "w:lin", "base"),
        ("v:beta", "w:beta", "base"),
        ("v:beta", "w:beta"),
        ("v:small", "w:beta", "base"),
        ("v:lin", "w:beta", "base"),
        ("v:beta", "w:lin", "base"),
        ("v:beta", "w:small", "base"),
    ],
    ThresholdName.B_LOG: [
        ("v:two", "w:two", "base"),
        ("v:beta1", "w:beta1"),
        ("v:two", "w:beta1", "base"),
        ("v:beta1", "w:two", "base"),
    ],
    ThresholdName.C_LOG: [
        ("v:lin", "base", "w:two"),
        ("v:lin", "base", "w:beta1"),
        ("v:small", "w:two", "base"),
        ("v:small", "base", "w:beta1"),
        ("v:beta", "base", "w:two"),
        ("v:beta", "base", "w:beta1"),
        ("v:beta", "w:beta1"),
    ],
}


def branches_of(name: ThresholdName) -> list[tuple[str, ...]]:
    return list(_BRANCHES[ThresholdName(name)])


def _term(token: str, m2, m3, alpha, gamma, beta, n):
    if token == "base":
        return (n - 2) / n
    side, kind = token.split(":")
    m, e = (m2, alpha) if side == "v" else (m3, gamma)
    if kind == "lin":
        return 2 * m - 1
    if kind == "small":
        return m - 1 / n
    if kind == "mid":
        return m - 2 / n + e
    if kind == "big":
        if n * e - 1 == 0:
            which = "alpha" if side == "v" else "gamma"
            raise SingularInputError(f"(n*{which}-2)/(n*{which}-1) with n*{which} = 1")
        return m + (n * e - 2) / (n * e - 1)
    if kind == "two":
        return 2 * m
    if kind == "beta":
        return 2 * m - beta
    if kind == "beta1":
        return 2 * m + 1 - beta
    raise KeyError(token)


def threshold_branches(name, m2, m3, alpha, gamma, beta=None, n=3, transpose=False) -> list[float]:
    """Value of every max-block of the named threshold, in display order."""
    name = ThresholdName(name)
    if n < 2:
        raise ValueError("n must be at least 2")
    if name.logistic and beta is None:
        raise ValueError(f"threshold {name.value} requires beta")
    if transpose:
        m2, m3, alpha, gamma = m3, m2, gamma, alpha
    return [float(max(_term(t, m2, m3, alpha, gamma, beta, n) for t in branch)) for branch in _BRANCHES[name]]


def compute_threshold(name, m2, m3, alpha, gamma, beta=None, n=3, transpose=False) -> float:
    return min(threshold_branches(name, m2, m3, alpha, gamma, beta, n, transpose))


def attaining_branch(name, m2, m3, alpha, gamma, beta=None, n=3, transpose=False) -> int:
    """Index of the first branch attaining the minimum."""
    values = threshold_branches(name, m2, m3, alpha, gamma, beta, n, transpose)
    return values.index(min(values))


# ---------------------------------------------------------------------------
# cases

def _band(e: float, n: int) -> str:
    """Interval label of an exponent: L=(0,1/n], M=(1/n,2/n), H=[2/n,1), O={1}.

    The value 1 always lands in O: the closed-at-one cases exist to host it.
    """
    if e <= 1 / n:
        return "L"
    if e < 2 / n:
        return "M"
    if e == 1:
        return "O"
    return "H"


_NONLOGISTIC_CASES = {
    ("L", "L"): "A1", ("M", "M"): "A2", ("H", "H"): "A3", ("O", "H"): "A4",
    ("H", "O"): "A5", ("O", "O"): "A6", ("L", "M"): "A7", ("L", "H"): "A8",
    ("L", "O"): "A9", ("M", "L"): "A10", ("M", "H"): "A11", ("M", "O"): "A12",
    ("H", "L"): "A13", ("O", "L"): "A14", ("H", "M"): "A15", ("O", "M"): "A16",
}

CASE_THRESHOLDS: dict[str, Threshold] = {
    "A1": Threshold(ThresholdName.A), "A2": Threshold(ThresholdName.B),
    "A3": Threshold(ThresholdName.C), "A4": Threshold(ThresholdName.D),
    "A5": Threshold(ThresholdName.E), "A6": Threshold(ThresholdName.F),
    "A7": Threshold(ThresholdName.G), "A8": Threshold(ThresholdName.H),
    "A9": Threshold(ThresholdName.I), "A10": Threshold(ThresholdName.G, True),
    "A11": Threshold(ThresholdName.J), "A12": Threshold(ThresholdName.K),
    "A13": Threshold(ThresholdName.H, True), "A14": Threshold(ThresholdName.I, True),
    "A15": Threshold(ThresholdName.J, True), "A16": Threshold(ThresholdName.K, True),
    "A17": Threshold(ThresholdName.A_LOG), "A18": Threshold(ThresholdName.B_LOG),
    "A19": Threshold(ThresholdName.C_LOG), "A20": Threshold(ThresholdName.C_LOG, True),
}

UNCOVERED = "uncovered"


def classify_case(p: ModelParams) -> str:
    a, g = _band(p.alpha, p.n), _band(p.gamma, p.n)
    if not p.logistic:
        return _NONLOGISTIC_CASES[(a, g)]
    # logistic cases only use (0,1/n] and the open (1/n,1)
    a = "L" if a == "L" else ("U" if a in "MH" else "X")
    g = "L" if g == "L" else ("U" if g in "MH" else "X")
    return {("L", "L"): "A17", ("U", "U"): "A18", ("L", "U"): "A19", ("U", "L"): "A20"}.get((a, g), UNCOVERED)


# ---------------------------------------------------------------------------
# verdicts

@dataclass(frozen=True)
class SideCondition:
    """Extra requirement under which boundedness is still asserted.

    ``constant_unspecified`` marks conditions whose constant is only known to
    exist; these never produce a numeric pass/fail (``satisfied`` is None).
    """

    label: str
    kind: str  # smallness | largeness | extension
    expression: str
    bound: float | None = None
    constant_unspecified: bool = False
    satisfied: bool | None = None

    def text(self) -> str:
        out = f"{self.label}: {self.expression}"
        if self.constant_unspecified:
            out += " [constant unspecified]"
        elif self.satisfied is not None:
            out += " [holds]" if self.satisfied else " [fails]"
        return out


@dataclass(frozen=True)
class RegimeVerdict:
    case_id: str
    threshold_name: str | None
    threshold_value: float | None
    m1_required: float | None
    decision: str  # bounded | uncovered
    side_conditions: tuple[SideCondition, ...] = ()
    branch_values: tuple[float, ...] = ()
    attaining_branch: int | None = None

    @property
    def bounded(self) -> bool:
        return self.decision == "bounded"

    def to_dict(self) -> dict:
        d = asdict(self)
        d["side_conditions"] = [asdict(s) for s in self.side_conditions]
        d["branch_values"] = list(self.branch_values)
        return d


def _is_linear(p: ModelParams) -> bool:
    return p.m1 == 1 and p.m2 == 1 and p.m3 == 1


def _nonlogistic_side_conditions(p: ModelParams, case: str) -> list[SideCondition]:
    out = []
    if not _is_linear(p):
        return out
    n = p.n
    if case == "A6":
        out.append(SideCondition("small-attractant", "smallness", "chi*||v0||_inf < 1/(5n)", 1 / (5 * n)))
        out.append(SideCondition("small-repellent", "smallness", "xi*||w0||_inf < 1/(5n)", 1 / (5 * n)))
    elif n == 2 and case in ("A9", "A12"):
        const = "K2" if case == "A9" else "K~2"
        out.append(SideCondition("planar-small-repellent", "smallness", f"xi < {const}(n, ||w0||_inf)",
                                 constant_unspecified=True))
    elif n == 2 and case in ("A14", "A16"):
        const = "K1" if case == "A14" else "K~1"
        out.append(SideCondition("planar-small-attractant", "smallness", f"chi < {const}(n, ||v0||_inf)",
                                 constant_unspecified=True))
    return out


def _logistic_side_conditions(p: ModelParams) -> list[SideCondition]:
    n, a, g, beta = p.n, p.alpha, p.gamma, p.beta
    low_a, low_g = a <= 1 / n, g <= 1 / n
    out = []
    if _is_linear(p):
        if beta > 2:
            out.append(SideCondition("strong-damping-linear", "extension",
                                     "beta > 2 with alpha, gamma in (0,1]", satisfied=True))
        elif beta == 2:
            if not low_a and not low_g:
                expr = "mu > K(n)*(chi^2*||chi v0||_inf^(4/n) + xi^2*||xi w0||_inf^(4/n))"
            elif not low_a:
                expr = "mu > K1(n)*chi^2*||chi v0||_inf^(4/n)"
            elif not low_g:
                expr = "mu > K2(n)*xi^2*||xi w0||_inf^(4/n)"
            else:
                return out
            out.append(SideCondition("quadratic-damping-linear", "largeness", expr, constant_unspecified=True))
        return out
    if beta < 2:
        return out
    if not low_a and not low_g:
        th = Threshold(ThresholdName.B_LOG)
    elif low_a and not low_g:
        th = Threshold(ThresholdName.C_LOG)
    elif not low_a and low_g:
        th = Threshold(ThresholdName.C_LOG, True)
    else:
        return out
    value = compute_threshold(th.name, p.m2, p.m3, a, g, beta, n, th.transpose)
    out.append(SideCondition("closed-range-nonlinear", "extension", f"m1 > {th.label()} (exponent 1 admitted)",
                             bound=value, satisfied=p.m1 > value))
    if beta == 2:
        out.append(SideCondition("quadratic-damping-nonlinear", "largeness", "mu > K~(n, m1, m2, m3, data)",
                                 constant_unspecified=True))
    return out


def verdict(p: ModelParams) -> RegimeVerdict:
    violations = validate_params(p)
    if violations:
        raise InvalidParams(violations)
    case = classify_case(p)
    if case == UNCOVERED:
        side = _logistic_side_conditions(p) if p.logistic else []
        return RegimeVerdict(UNCOVERED, None, None, None, "uncovered", tuple(side))
    th = CASE_THRESHOLDS[case]
    beta = p.beta if p.logistic else None
    values = threshold_branches(th.name, p.m2, p.m3, p.alpha, p.gamma, beta, p.n, th.transpose)
    value = min(values)
    decision = "bounded" if p.m1 > value else "uncovered"
    side = []
    if decision != "bounded":
        side = _logistic_side_conditions(p) if p.logistic else []
    if not p.logistic:
        side = _nonlogistic_side_conditions(p, case)
    return RegimeVerdict(case, th.label(), value, value, decision, tuple(side),
                         tuple(values), values.index(value))


# ---------------------------------------------------------------------------
# atlas

@dataclass(frozen=True)
class Axis:
    name: str
    start: float
    stop: float
    steps: int

    def values(self) -> list:
        if self.steps < 1:
            raise ValueError(f"axis {self.name!r}: steps must be positive")
        vals = np.linspace(self.start, self.stop, self.steps).tolist()
        if self.name == "n":
            if any(v != round(v) for v in vals):
                raise ValueError("axis 'n' must take integer values")
            vals = [int(round(v)) for v in vals]
        return vals


_NUMERIC_FIELDS = ("n", "m1", "m2", "m3", "chi", "xi", "K1", "K2", "alpha", "gamma", "k", "mu", "beta")


@dataclass
class Atlas:
    axis1: Axis
    axis2: Axis | None
    values1: list
    values2: list
    verdicts: list[list[RegimeVerdict]] = field(default_factory=list)

    def rows(self):
        for i, x in enumerate(self.values1):
            for j, y in enumerate(self.values2):
                yield x, y, self.verdicts[i][j]

    def to_csv(self) -> str:
        from .serialize import fmt_float

        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["axis1", "axis2", "case_id", "threshold_name", "threshold_value", "decision",
                         "side_conditions"])
        for x, y, v in self.rows():
            writer.writerow([
                fmt_float(x), "" if y is None else fmt_float(y), v.case_id, v.threshold_name or "",
                "" if v.threshold_value is None else fmt_float(v.threshold_value), v.decision,
                ";".join(s.text() for s in v.side_conditions),
            ])
        return buf.getvalue()


def atlas(p_base: ModelParams, axis1: Axis, axis2: Axis | None = None) -> Atlas:
    """Tabulate verdicts over a one- or two-parameter grid, row-major in axis1."""
    axes = [axis1] + ([axis2] if axis2 is not None else [])
    for ax in axes:
        if ax.name not in _NUMERIC_FIELDS:
            raise ValueError(f"unknown numeric parameter {ax.name!r}")
    if axis2 is not None and axis1.name == axis2.name:
        raise ValueError("atlas axes must name distinct parameters")
    values1 = axis1.values()
    values2 = axis2.values() if axis2 is not None else [None]
    table = []
    for x in values1:
        row = []
        for y in values2:
            changes = {axis1.name: x}
            if axis2 is not None:
                changes[axis2.name] = y
            row.append(verdict(p_base.replace(**changes)))
        table.append(row)
    return Atlas(axis1, axis2, values1, values2, table)
