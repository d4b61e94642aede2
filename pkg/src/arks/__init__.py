"""Numerical laboratory for the nonlinear attraction-repulsion chemotaxis
system with double signal saturation and an optional logistic source.

    u_t = div((u+1)^(m1-1) grad u - chi u (u+1)^(m2-1) grad v
              + xi u (u+1)^(m3-1) grad w) + h(u)
    v_t = lap v - f(u) v
    w_t = lap w - g(u) w

with zero-flux boundaries.  Subpackages: parameter model, boundedness regime
classifier, exponent certificates, finite-volume solver, runtime monitors and
a command line harness.
"""

__version__ = "0.1.0"

from .model import DomainError, ModelParams, validate_params  # noqa: E402

__all__ = ["DomainError", "ModelParams", "validate_params", "__version__"]
