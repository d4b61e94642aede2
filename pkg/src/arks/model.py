"""Model coefficients and parameter validation.

The kinetics are the prototype equalities f(s) = K1 s^alpha, g(s) = K2 s^gamma
and h(s) = k s - mu s^beta, i.e. the extremal members of the admissible
envelopes.  All evaluators accept Python floats or numpy arrays.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace

import numpy as np


class DomainError(ValueError):
    """Raised when a coefficient is evaluated outside its domain (s < 0)."""


@dataclass(frozen=True)
class ModelParams:
    """Coefficients of the chemotaxis system plus hypothesis constants.

    ``n`` is the space dimension the boundedness theory is applied with; it is
    independent of the dimension of any simulation grid.  ``mu`` and ``beta``
    are only read when ``logistic`` is set.
    """

    n: int = 3
    m1: float = 1.0
    m2: float = 1.0
    m3: float = 1.0
    chi: float = 1.0
    xi: float = 1.0
    K1: float = 1.0
    K2: float = 1.0
    alpha: float = 0.3
    gamma: float = 0.3
    logistic: bool = False
    k: float = 0.0
    mu: float = 1.0
    beta: float = 2.0

    def replace(self, **changes) -> "ModelParams":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def field_names(cls) -> tuple[str, ...]:
        return tuple(f.name for f in fields(cls))


def validate_params(p: ModelParams) -> list[str]:
    """Return the list of violated constraints; an empty list means ok."""
    violations = []
    if not isinstance(p.n, (int, np.integer)) or isinstance(p.n, bool):
        violations.append("n must be an integer")
    elif p.n < 2:
        violations.append("n must be at least 2")
    for name in ("m1", "m2", "m3", "k"):
        if not np.isfinite(getattr(p, name)):
            violations.append(f"{name} must be finite")
    for name in ("chi", "xi", "K1", "K2"):
        if not getattr(p, name) > 0:
            violations.append(f"{name} must be positive")
    for name in ("alpha", "gamma"):
        value = getattr(p, name)
        if not 0.0 < value <= 1.0:
            violations.append(f"{name} must lie in (0,1]")
    if p.logistic:
        if not p.mu > 0:
            violations.append("mu must be positive")
        if not p.beta > 1:
            violations.append("beta must exceed 1")
    return violations


def _check_nonneg(s):
    if np.any(np.asarray(s) < 0):
        raise DomainError("coefficient evaluated at negative density")


def eval_f(p: ModelParams, s):
    _check_nonneg(s)
    return p.K1 * np.power(s, p.alpha)


def eval_g(p: ModelParams, s):
    _check_nonneg(s)
    return p.K2 * np.power(s, p.gamma)


def eval_h(p: ModelParams, s):
    """Logistic source k s - mu s^beta, identically zero when not logistic."""
    _check_nonneg(s)
    if not p.logistic:
        return np.zeros_like(s, dtype=float) if np.ndim(s) else 0.0
    return p.k * s - p.mu * np.power(s, p.beta)


def eval_diffusion(p: ModelParams, s):
    _check_nonneg(s)
    return np.power(np.add(s, 1.0), p.m1 - 1.0)


def eval_sens_attr(p: ModelParams, s):
    _check_nonneg(s)
    return p.chi * np.multiply(s, np.power(np.add(s, 1.0), p.m2 - 1.0))


def eval_sens_rep(p: ModelParams, s):
    _check_nonneg(s)
    return p.xi * np.multiply(s, np.power(np.add(s, 1.0), p.m3 - 1.0))
