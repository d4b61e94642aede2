"""Exponent certificates for the Gagliardo-Nirenberg/Young estimate chain.

A certificate is a concrete tuple (s, p, q, r) plus three Hoelder conjugate
pairs per signal, for which every interpolation exponent a_i, a~_i and
kappa_j lies in (0,1) and the four exponent sums beta_i + gamma_i stay below
one.  The search discretises the asymptotic choices (s or p large, omega
towards 1/2) into finite ladders; infeasibility is reported as data.

Also hosts the two elementary inequalities used to close the estimates
(``young_product_bound`` and ``power_sum_lower_bound``).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .model import DomainError, ModelParams, validate_params
from .regimes import InvalidParams, SingularInputError

P_LADDER = tuple(2**k for k in range(3, 21))
OMEGA_LADDER = (0.75, 0.6, 0.55, 0.51, 0.501)
# q/p ratios tried when s is pinned by its integrability limit; the
# first entry is the q = p/2 choice of the pinned recipe.
RATIO_LADDER = (0.5, 1.0, 2.0, 4.0, 16.0, 64.0, 256.0, 1024.0)
THETA_SLACK = (1e-1, 1e-2, 1e-3)
MU_SLACK = 1e-3
S_FRACTION = 0.999
CONJ_RTOL = 1e-12


def conjugate(x: float) -> float:
    return x / (x - 1.0)


@dataclass(frozen=True)
class ExponentChoice:
    """Free exponents of the estimate chain.

    ``s`` bounds the attractant gradient in L^s, ``s_t`` the repellent one;
    the two integrability limits are independent, so each signal carries its
    own value.
    """

    s: float
    p: float
    q: float
    r: float
    theta: float
    theta_p: float
    theta_t: float
    theta_t_p: float
    mu_y: float
    mu_y_p: float
    mu_t: float
    mu_t_p: float
    s_t: float | None = None

    def __post_init__(self):
        if self.s_t is None:
            object.__setattr__(self, "s_t", self.s)

    @classmethod
    def from_primes(cls, s, p, q, r, theta_p, theta_t_p, mu_y, mu_t, s_t=None) -> "ExponentChoice":
        """Build from the free members of each conjugate pair."""
        f = float
        return cls(f(s), f(p), f(q), f(r), conjugate(theta_p), f(theta_p), conjugate(theta_t_p), f(theta_t_p),
                   f(mu_y), conjugate(mu_y), f(mu_t), conjugate(mu_t), f(s if s_t is None else s_t))


@dataclass(frozen=True)
class ExponentCertificate:
    choice: ExponentChoice
    a1: float
    a2: float
    a3: float
    a4: float
    a1t: float
    a2t: float
    a3t: float
    a4t: float
    kappa1: float
    kappa2: float
    kappa3: float
    sum_bg1: float
    sum_bg2: float
    sum_bg1t: float
    sum_bg2t: float

    def replace(self, **changes) -> "ExponentCertificate":
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        d.update(changes)
        return ExponentCertificate(**d)

    def to_dict(self) -> dict:
        d = asdict(self)
        choice = d.pop("choice")
        d.update(choice)
        return d


MEMBERSHIP_FIELDS = ("a1", "a2", "a3", "a4", "a1t", "a2t", "a3t", "a4t", "kappa1", "kappa2", "kappa3")
SUM_FIELDS = ("sum_bg1", "sum_bg2", "sum_bg1t", "sum_bg2t")


def _div(num, den, label):
    if den == 0:
        raise SingularInputError(f"zero denominator in {label}")
    return num / den


def _side_exponents(m1, m, e, n, s, p, q, theta, theta_p, mu, mu_p, tag):
    """(a1, a2, a3, a4, sum_bg1, sum_bg2) for one signal."""
    half = (m1 + p - 1) / 2
    den_u = half + 1 / n - 1 / 2
    den_q = q / s + 1 / n - 1 / 2
    tilt = (p + 2 * m - m1 - 1) * theta
    a1 = _div(half * (1 - _div(1, tilt, f"a1{tag} inner (p+2m-m1-1)*theta")), den_u, f"a1{tag}")
    a2 = _div(q * (1 / s - 1 / (2 * theta_p)), den_q, f"a2{tag}")
    a3 = _div(half * (1 - _div(1, 2 * e * mu, f"a3{tag} inner")), den_u, f"a3{tag}")
    a4 = _div(q * (1 / s - _div(1, 2 * (q - 1) * mu_p, f"a4{tag} inner 2(q-1)mu'")), den_q, f"a4{tag}")
    sum1 = _div(p + 2 * m - m1 - 1, m1 + p - 1, f"sum_bg1{tag}") * a1 + (1 / q) * a2
    sum2 = _div(2 * e, m1 + p - 1, f"sum_bg2{tag}") * a3 + (q - 1) / q * a4
    return a1, a2, a3, a4, sum1, sum2


def compute_exponent_set(params: ModelParams, choice: ExponentChoice) -> ExponentCertificate:
    """Evaluate every exponent formula literally; no feasibility judgement."""
    c, n, m1 = choice, params.n, params.m1
    a1, a2, a3, a4, s1, s2 = _side_exponents(m1, params.m2, params.alpha, n, c.s, c.p, c.q,
                                             c.theta, c.theta_p, c.mu_y, c.mu_y_p, "")
    b1, b2, b3, b4, t1, t2 = _side_exponents(m1, params.m3, params.gamma, n, c.s_t, c.p, c.r,
                                             c.theta_t, c.theta_t_p, c.mu_t, c.mu_t_p, "t")
    den_u = (m1 + c.p - 1) / 2 + 1 / n - 1 / 2
    kappa1 = _div((c.p / 2) * (1 - 1 / c.p), den_u, "kappa1")
    kappa2 = _div(c.q - 1 / 2, c.q + 1 / n - 1 / 2, "kappa2")
    kappa3 = _div(c.r - 1 / 2, c.r + 1 / n - 1 / 2, "kappa3")
    return ExponentCertificate(c, a1, a2, a3, a4, b1, b2, b3, b4, kappa1, kappa2, kappa3, s1, s2, t1, t2)


def admissible_s_range(exponent: float, n: int) -> tuple[float, float]:
    """Right-open range [1, upper) of s with grad-signal bounded in L^s."""
    if n < 2:
        raise ValueError("n must be at least 2")
    if not 0 < exponent <= 1:
        raise DomainError("absorption exponent must lie in (0,1]")
    if exponent <= 1 / n:
        return (1.0, math.inf)
    return (1.0, n / (n * exponent - 1))


def p_lower_bound_terms(params: ModelParams, choice: ExponentChoice) -> list[float]:
    """The seven lower bounds p has to exceed."""
    n, m1, m2, m3 = params.n, params.m1, params.m2, params.m3
    th, tt = choice.theta, choice.theta_t

    def tilt(m, theta):
        den = n - (n - 2) * theta
        if den <= 0:
            return math.inf
        return ((2 * m - m1 - 1) * (n - 2) * theta - n * m1 + n) / den

    return [
        2 - 2 / n - m1,
        1 / th - 2 * m2 + m1 + 1,
        tilt(m2, th),
        2 * params.alpha * choice.mu_y * (n - 2) / n - m1 + 1,
        1 / tt - 2 * m3 + m1 + 1,
        tilt(m3, tt),
        2 * params.gamma * choice.mu_t * (n - 2) / n - m1 + 1,
    ]


def _choice_violations(params: ModelParams, c: ExponentChoice) -> list[str]:
    out = []
    n = params.n
    for name in ("s", "p", "q", "r"):
        if not getattr(c, name) >= 1:
            out.append(f"{name} must be >= 1")
    for x, xp, label in ((c.theta, c.theta_p, "theta"), (c.theta_t, c.theta_t_p, "theta_t"),
                         (c.mu_y, c.mu_y_p, "mu_y"), (c.mu_t, c.mu_t_p, "mu_t")):
        if not (x > 1 and xp > 1):
            out.append(f"{label} pair must exceed 1")
        elif abs(1 / x + 1 / xp - 1) > CONJ_RTOL:
            out.append(f"{label} pair not conjugate")
    for s, e, label in ((c.s, params.alpha, "s"), (c.s_t, params.gamma, "s_t")):
        lo, hi = admissible_s_range(e, n)
        if not lo <= s < hi:
            out.append(f"{label} outside its integrability range")
    if not c.theta_p > max(n / 2, c.s / 2):
        out.append("theta' <= max{n/2, s/2}")
    if not c.theta_t_p > max(n / 2, c.s_t / 2):
        out.append("theta~' <= max{n/2, s_t/2}")
    if not c.mu_y > max(1 / (2 * params.alpha), n / 2):
        out.append("mu <= max{1/(2 alpha), n/2}")
    if not c.mu_t > max(1 / (2 * params.gamma), n / 2):
        out.append("mu~ <= max{1/(2 gamma), n/2}")
    if not c.q > max((n - 2) / n * c.theta_p, c.s / (2 * c.mu_y_p) + 1):
        out.append("q below its lower bound")
    if not c.r > max((n - 2) / n * c.theta_t_p, c.s_t / (2 * c.mu_t_p) + 1):
        out.append("r below its lower bound")
    if not c.p > max(p_lower_bound_terms(params, c)):
        out.append("p below its seven-term lower bound")
    return out


def check_certificate(cert: ExponentCertificate, params: ModelParams | None = None) -> list[str]:
    """Violated constraints; an empty list means the certificate passes.

    With ``params`` the admissibility of the underlying choice (conjugacy,
    integrability range of s, lower bounds on q, r, p) is checked as well.
    """
    out = []
    for name in MEMBERSHIP_FIELDS + SUM_FIELDS:
        x = getattr(cert, name)
        if not 0 < x < 1:
            out.append(f"{name} ∉ (0,1)")
    if params is not None:
        out.extend(_choice_violations(params, cert.choice))
    return out


# ---------------------------------------------------------------------------
# search

def _band(e: float, n: int) -> str:
    if e <= 1 / n:
        return "low"
    if e < 2 / n:
        return "mid"
    return "high"


def _mu_choice(e: float, n: int) -> float:
    return max(1 / (2 * e), n / 2) * (1 + MU_SLACK)


def _side_options(band: str, free_s: bool, s: float, p: float, n: int):
    """Candidate (q, theta') pairs for one signal, in preference order."""
    if band == "low" and free_s:
        # p = q = s, theta' = s * omega with omega decreasing towards 1/2
        for omega in OMEGA_LADDER:
            yield p, s * omega
        return
    floor = max(n / 2, s / 2)
    for ratio in RATIO_LADDER:
        q = ratio * p
        for slack in THETA_SLACK:
            yield q, floor * (1 + slack)
        if q > floor:
            yield q, q


def _side_ok(m1, m, e, n, s, p, q, theta_p, mu):
    """Membership and sum constraints that involve one signal only."""
    theta, mu_p = conjugate(theta_p), conjugate(mu)
    try:
        vals = _side_exponents(m1, m, e, n, s, p, q, theta, theta_p, mu, mu_p, "")
    except SingularInputError:
        return False
    if not all(0 < x < 1 for x in vals):
        return False
    kappa = (q - 1 / 2) / (q + 1 / n - 1 / 2)
    if not 0 < kappa < 1:
        return False
    if not q > max((n - 2) / n * theta_p, s / (2 * mu_p) + 1):
        return False
    den = n - (n - 2) * theta
    if den <= 0:
        return False
    tilt = ((2 * m - m1 - 1) * (n - 2) * theta - n * m1 + n) / den
    return p > max(1 / theta - 2 * m + m1 + 1, tilt, 2 * e * mu * (n - 2) / n - m1 + 1)


@dataclass
class InfeasibleReport:
    """No ladder rung produced a passing certificate."""

    reason: str
    largest_rung: dict = field(default_factory=dict)
    failures: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"status": "infeasible-within-bounds", "reason": self.reason,
                "largest_rung": self.largest_rung, "failures": self.failures}


def _side_s(e: float, n: int, p: float) -> tuple[float, bool]:
    """(s, free): s = p when the integrability range is unbounded, else pinned
    just inside the open upper limit."""
    upper = admissible_s_range(e, n)[1]
    if math.isinf(upper):
        return float(p), True
    return S_FRACTION * upper, False


def _first_option(params, m, e, band, free_s, s, p, mu):
    if free_s and s <= 2 * conjugate(mu) / (2 * conjugate(mu) - 1):
        return None
    for q, theta_p in _side_options(band, free_s, s, p, params.n):
        if _side_ok(params.m1, m, e, params.n, s, p, q, theta_p, mu):
            return q, theta_p
    return None


def search_certificate(params: ModelParams) -> ExponentCertificate | InfeasibleReport:
    """Ladder search for a certificate; the first passing rung is returned."""
    violations = validate_params(params)
    if violations:
        raise InvalidParams(violations)
    n = params.n
    band_a, band_g = _band(params.alpha, n), _band(params.gamma, n)
    mu_y, mu_t = _mu_choice(params.alpha, n), _mu_choice(params.gamma, n)
    if params.m1 > (n - 2) / n:
        for p in P_LADDER:
            s, free_v = _side_s(params.alpha, n, p)
            s_t, free_w = _side_s(params.gamma, n, p)
            v = _first_option(params, params.m2, params.alpha, band_a, free_v, s, p, mu_y)
            if v is None:
                continue
            w = _first_option(params, params.m3, params.gamma, band_g, free_w, s_t, p, mu_t)
            if w is None:
                continue
            choice = ExponentChoice.from_primes(s, p, v[0], w[0], v[1], w[1], mu_y, mu_t, s_t)
            cert = compute_exponent_set(params, choice)
            if not check_certificate(cert, params):
                return cert
    return _infeasible(params, band_a, band_g, mu_y, mu_t)


def _infeasible(params, band_a, band_g, mu_y, mu_t) -> InfeasibleReport:
    """Diagnose the largest rung using each side's preferred (recipe) option."""
    n = params.n
    p = float(P_LADDER[-1])
    s, free_v = _side_s(params.alpha, n, p)
    s_t, free_w = _side_s(params.gamma, n, p)
    q, theta_p = next(iter(_side_options(band_a, free_v, s, p, n)))
    r, theta_t_p = next(iter(_side_options(band_g, free_w, s_t, p, n)))
    choice = ExponentChoice.from_primes(s, p, q, r, theta_p, theta_t_p, mu_y, mu_t, s_t)
    failures = []
    try:
        cert = compute_exponent_set(params, choice)
    except SingularInputError as exc:
        return InfeasibleReport(str(exc), asdict(choice), [])
    for name in MEMBERSHIP_FIELDS + SUM_FIELDS:
        x = getattr(cert, name)
        if not 0 < x < 1:
            margin = x - 1 if x >= 1 else x
            failures.append({"constraint": f"{name} in (0,1)", "value": x, "margin": margin})
    for msg in _choice_violations(params, choice):
        failures.append({"constraint": msg, "value": None, "margin": None})
    if params.m1 <= (n - 2) / n:
        reason = "m1 <= (n-2)/n: kappa1 cannot lie in (0,1)"
    else:
        reason = "no ladder rung satisfied all membership and sum constraints"
    return InfeasibleReport(reason, asdict(choice), failures)


def side_requirement(m: float, e: float, n: int) -> float:
    """Strict lower bound on m1 under which one signal's sums can be pushed below one."""
    band = _band(e, n)
    if band == "low":
        return m - 1 / n
    if band == "mid":
        return m - 2 / n + e
    return m + (n * e - 2) / (n * e - 1)


# ---------------------------------------------------------------------------
# elementary inequalities

def young_product_bound(d1: float, d2: float, eps: float) -> float:
    """Smallest d with a^d1 b^d2 <= eps (a + b) + d for all a, b >= 0.

    The stationarity conditions d1 a^(d1-1) b^d2 = eps = d2 a^d1 b^(d2-1)
    force b/a = d2/d1, which reduces the problem to one variable
    t = a + b with maximiser t* = (c D / eps)^(1/(1-D)), D = d1 + d2,
    c = (d1/D)^d1 (d2/D)^d2.  The value is padded by a few ulps so the
    inequality also holds in floating point at the maximiser.
    """
    if not (d1 > 0 and d2 > 0 and eps > 0):
        raise DomainError("young_product_bound needs d1, d2, eps > 0")
    total = d1 + d2
    if total >= 1:
        raise DomainError("d1 + d2 >= 1: supremum is infinite")
    c = (d1 / total) ** d1 * (d2 / total) ** d2
    t_star = (c * total / eps) ** (1 / (1 - total))
    a_star, b_star = t_star * d1 / total, t_star * d2 / total
    d = a_star**d1 * b_star**d2 - eps * (a_star + b_star)
    d = max(d, eps * t_star * (1 - total) / total)
    d = d * (1 + 1e-12)
    # the critical point must be a maximum of the penalised product
    for f in (0.5, 0.9, 1.1, 2.0):
        a, b = a_star * f, b_star / f
        if a**d1 * b**d2 > eps * (a + b) + d:
            raise ArithmeticError("young_product_bound failed its local validation")
    return d


def power_sum_lower_bound(d3: float, d4: float, d5: float) -> tuple[float, float, float]:
    """(d6, d_hat, d_tilde) with a^d3 + b^d4 + c^d5 >= d_hat (a+b+c)^d6 - d_tilde.

    d6 is the smallest exponent.  Each power with a larger exponent dominates
    x^d6 - 1, so d_tilde counts those; the power-mean (d6 >= 1) or
    subadditivity (d6 < 1) inequality then gives d_hat = min{1, 3^(1-d6)}.
    """
    if not (d3 > 0 and d4 > 0 and d5 > 0):
        raise DomainError("exponents must be positive")
    d6 = min(d3, d4, d5)
    d_hat = min(1.0, 3.0 ** (1 - d6))
    d_tilde = float(sum(1 for d in (d3, d4, d5) if d > d6))
    return d6, d_hat, d_tilde


def power_sum_holds(exps, d6, d_hat, d_tilde, a, b, c, rtol=1e-12) -> np.ndarray:
    """Pointwise check of the power-sum inequality with a relative roundoff allowance."""
    lhs = np.power(a, exps[0]) + np.power(b, exps[1]) + np.power(c, exps[2])
    rhs = d_hat * np.power(a + b + c, d6) - d_tilde
    return lhs >= rhs - rtol * np.maximum(1.0, np.abs(rhs))
