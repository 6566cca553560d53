"""Closed-form capacity and generalization-bound arithmetic.

All logarithms are natural.  Volume and determinant quantities travel in log
space so dimensions up to 1e5 neither overflow nor underflow.  The bound has
the three-term shape

    risk_bound = empirical_risk + 12 sqrt(pi d) exp(C/d) / sqrt(N)
                 + 3 sqrt(ln(2/delta) / (2N)),

where C packs the log parameter-space volume, the unit-ball volume, the
Fisher-determinant floor, and the gradient (Lipschitz) bound.  A numeric
Dudley entropy integral is provided as an independent oracle for the closed
form's covering-number step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import integrate

__all__ = [
    "BoundInputs",
    "BoundReport",
    "unit_ball_volume",
    "covering_log_bound",
    "complexity_constant",
    "rademacher_bound",
    "generalization_bound",
    "local_bound",
    "effdim_bound",
    "k_complexity",
    "required_samples",
    "entropy_integral",
    "dudley_numeric",
]

# Sample-count thresholds within 0.1 of an integer are treated as attained
# when rounding k^2 up to whole samples.
REQUIRED_SAMPLES_SLACK = 0.1


@dataclass(frozen=True)
class BoundInputs:
    """Everything the global bound needs at one trained point.

    ``conf_delta`` is the confidence level; it is distinct from any local
    region radius, which travels separately.
    """

    d: int
    n_samples: int
    conf_delta: float
    log_v_theta: float
    log_m: float
    l_f_p: float
    empirical_risk: float

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"dimension must be >= 1, got {self.d}")
        if self.n_samples < 1:
            raise ValueError(f"sample count must be >= 1, got {self.n_samples}")
        if not 0.0 < self.conf_delta < 1.0:
            raise ValueError(f"confidence level must lie in (0, 1), got {self.conf_delta}")
        if self.l_f_p <= 0.0:
            raise ValueError(f"gradient bound must be positive, got {self.l_f_p}")
        if not 0.0 <= self.empirical_risk <= 1.0:
            raise ValueError(f"empirical risk must lie in [0, 1], got {self.empirical_risk}")


@dataclass(frozen=True)
class BoundReport:
    """Three-term decomposition of a risk bound."""

    complexity_term: float
    confidence_term: float
    bound: float
    c_prime: float
    variant: str


def unit_ball_volume(d: int) -> tuple[float, float]:
    """(volume, log_volume) of the unit ball in R^d: pi^(d/2) / Gamma(d/2 + 1)."""
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    log_v = (d / 2.0) * math.log(math.pi) - math.lgamma(d / 2.0 + 1.0)
    return math.exp(log_v), log_v


def covering_log_bound(epsilon: float, d: int, log_v_theta: float, log_m: float) -> float:
    """log N(eps) <= C - d ln eps with C = log V_Theta - log V_d - log m."""
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    _, log_v_d = unit_ball_volume(d)
    return log_v_theta - log_v_d - log_m - d * math.log(epsilon)


def complexity_constant(d: int, log_v_theta: float, log_m: float, l_f_p: float) -> float:
    """C = log V_Theta - log V_d - log m + d log L."""
    if l_f_p <= 0:
        raise ValueError(f"gradient bound must be positive, got {l_f_p}")
    _, log_v_d = unit_ball_volume(d)
    return log_v_theta - log_v_d - log_m + d * math.log(l_f_p)


def rademacher_bound(d: int, n_samples: int, c_prime: float) -> float:
    """6 sqrt(pi d) exp(C/d) / sqrt(N), evaluated in log space."""
    if d < 1 or n_samples < 1:
        raise ValueError("d and n_samples must be >= 1")
    log_val = math.log(6.0) + 0.5 * math.log(math.pi * d) + c_prime / d - 0.5 * math.log(n_samples)
    return math.exp(log_val)


def _confidence_term(n_samples: int, conf_delta: float) -> float:
    return 3.0 * math.sqrt(math.log(2.0 / conf_delta) / (2.0 * n_samples))


def generalization_bound(inputs: BoundInputs) -> BoundReport:
    """Global bound: empirical risk + twice the Rademacher bound + confidence term."""
    c_prime = complexity_constant(inputs.d, inputs.log_v_theta, inputs.log_m, inputs.l_f_p)
    complexity = 2.0 * rademacher_bound(inputs.d, inputs.n_samples, c_prime)
    confidence = _confidence_term(inputs.n_samples, inputs.conf_delta)
    return BoundReport(
        complexity_term=complexity,
        confidence_term=confidence,
        bound=inputs.empirical_risk + complexity + confidence,
        c_prime=c_prime,
        variant="global",
    )


def local_bound(
    inputs: BoundInputs, log_v_loc: float, log_m_loc: float, l_loc: float
) -> BoundReport:
    """Same decomposition with the local region's volume, determinant floor, and gradient bound."""
    c_loc = complexity_constant(inputs.d, log_v_loc, log_m_loc, l_loc)
    complexity = 2.0 * rademacher_bound(inputs.d, inputs.n_samples, c_loc)
    confidence = _confidence_term(inputs.n_samples, inputs.conf_delta)
    return BoundReport(
        complexity_term=complexity,
        confidence_term=confidence,
        bound=inputs.empirical_risk + complexity + confidence,
        c_prime=c_loc,
        variant="local",
    )


def effdim_bound(inputs: BoundInputs, d_eff: float, c_loc: float) -> BoundReport:
    """Local bound with the effective dimension substituted into the complexity term."""
    if not 1.0 <= d_eff <= inputs.d:
        raise ValueError(f"effective dimension must lie in [1, {inputs.d}], got {d_eff}")
    log_val = (
        math.log(12.0)
        + 0.5 * math.log(math.pi * d_eff)
        + c_loc / d_eff
        - 0.5 * math.log(inputs.n_samples)
    )
    complexity = math.exp(log_val)
    confidence = _confidence_term(inputs.n_samples, inputs.conf_delta)
    return BoundReport(
        complexity_term=complexity,
        confidence_term=confidence,
        bound=inputs.empirical_risk + complexity + confidence,
        c_prime=c_loc,
        variant="effective_dimension",
    )


def k_complexity(d: int, c_prime: float) -> float:
    """k(d) = sqrt(d) exp(C/d): samples scale ~ k^2 to tame the complexity term."""
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    return math.sqrt(d) * math.exp(c_prime / d)


def required_samples(d: int, c_prime: float) -> int:
    """Smallest whole sample count ~ k(d)^2, with near-integer thresholds kept."""
    k2 = d * math.exp(2.0 * c_prime / d)
    return int(math.ceil(k2 - REQUIRED_SAMPLES_SLACK))


def entropy_integral(d: int, c_prime: float) -> float:
    """Adaptive quadrature of int_0^1 sqrt(C - d ln eps) d eps (C >= 0)."""
    if c_prime < 0:
        raise ValueError(f"c_prime must be nonnegative, got {c_prime}")
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    value, _ = integrate.quad(
        lambda eps: math.sqrt(c_prime - d * math.log(eps)), 0.0, 1.0, epsabs=1e-12, limit=200
    )
    return value


def dudley_numeric(d: int, c_prime: float, n_samples: int) -> float:
    """12/sqrt(N) times the numeric entropy integral; oracle for rademacher_bound * 2."""
    if n_samples < 1:
        raise ValueError(f"sample count must be >= 1, got {n_samples}")
    return 12.0 / math.sqrt(n_samples) * entropy_integral(d, c_prime)
