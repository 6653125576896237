"""Hard bound on the number of observations of the bounded test.

The two stopping boundaries meet where the per-observation divergence
budgets cross: at the abscissa ``z*`` in ``(p0, p1)`` solving

    ln g0(z) / ln g1(z) = ln(zeta*a) / ln(zeta*b),
    g_i(z) = ((1 - p_i)/(1 - z))**(1 - z) * (p_i/z)**z,

and ``m* = ln(zeta*a) / ln g0(z*)``.  No path survives past ``floor(m*) + 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import BoundViolationError, NoCrossingError
from .stats_core import BoundaryTable, TestSpec, TunedParams, build_boundary_table

Z_TOL = 1e-12


@dataclass(frozen=True)
class MaxObsResult:
    z_star: float
    m_star: float
    n_max: int


def log_g(z: float, p: float) -> float:
    """``ln g(z)`` for reference probability ``p``; equals minus the Bernoulli divergence."""
    return (1.0 - z) * math.log((1.0 - p) / (1.0 - z)) + z * math.log(p / z)


def _result(spec: TestSpec, z_star: float, log_za: float) -> MaxObsResult:
    m_star = log_za / log_g(z_star, spec.p0)
    return MaxObsResult(z_star, m_star, math.floor(m_star) + 1)


def solve_max_obs(spec: TestSpec, params: TunedParams) -> MaxObsResult:
    """Bisect the cross-multiplied crossing condition for ``z*`` and return the bound."""
    log_za = math.log(params.zeta * params.a)
    log_zb = math.log(params.zeta * params.b)
    if log_za >= 0 or log_zb >= 0:
        raise ValueError("zeta*a and zeta*b must be < 1")

    def h(z):
        return log_g(z, spec.p0) * log_zb - log_g(z, spec.p1) * log_za

    lo, hi = spec.p0 + Z_TOL, spec.p1 - Z_TOL
    h_lo, h_hi = h(lo), h(hi)
    if h_lo == 0:
        return _result(spec, lo, log_za)
    if h_hi == 0:
        return _result(spec, hi, log_za)
    if (h_lo > 0) == (h_hi > 0):
        raise NoCrossingError(
            f"boundaries do not cross on (p0, p1): h({lo})={h_lo}, h({hi})={h_hi}"
        )
    neg_at_lo = h_lo < 0
    for _ in range(200):
        if hi - lo <= Z_TOL:
            break
        mid = 0.5 * (lo + hi)
        hm = h(mid)
        if hm == 0:
            lo = hi = mid
            break
        if (hm < 0) == neg_at_lo:
            lo = mid
        else:
            hi = mid
    return _result(spec, 0.5 * (lo + hi), log_za)


def closed_form_max_obs(spec: TestSpec, zeta_a: float) -> MaxObsResult:
    """Equal weighting coefficients: the crossing abscissa has a closed form."""
    if not 0 < zeta_a < 1:
        raise ValueError("zeta*a must lie in (0, 1)")
    p0, p1 = spec.p0, spec.p1
    z_star = math.log((1 - p0) / (1 - p1)) / math.log((1 - p0) * p1 / ((1 - p1) * p0))
    return _result(spec, z_star, math.log(zeta_a))


def bounded_table(spec: TestSpec, params: TunedParams) -> BoundaryTable:
    """Boundary table out to the hard bound, with the terminal row verified fully stopping."""
    n_max = solve_max_obs(spec, params).n_max
    table = build_boundary_table(spec, params, n_max)
    left = table.undecided_at(n_max)
    if left:
        raise BoundViolationError(f"{left} continue cells remain at the bound n_max={n_max}")
    return table
