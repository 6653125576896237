"""Risk tuning of the bounded test.

``bisect_zeta`` finds, for fixed weighting coefficients, the largest risk
tuning parameter whose exact design-point risks stay within budget.
``minimax_tune`` wraps it in the iterative minimax loop that rebalances
``a`` and ``b`` to minimize ``Q = max(A, B)`` subject to ``R = min(A, B) >= 1``,
where ``A = alpha / Pr{reject H0 | p0}`` and ``B = beta / Pr{reject H1 | p1}``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

from .errors import InfeasibleTuningError
from .maxobs import bounded_table
from .oc_eval import evaluate
from .stats_core import BENIGN, SCANNER, TestSpec, TunedParams

BISECT_RTOL = 1e-6
BISECT_MAX_ITER = 200
SCAN_MAX_EXPONENT = 60
EQ_RTOL = 1e-9
UPDATE_DIVISOR = 5.0


@dataclass
class TraceRow:
    k: int
    a: float
    b: float
    zeta_star: float
    A: float
    B: float
    Q: float


@dataclass
class TuneDiagnostics:
    A: float
    B: float
    Q: float
    R: float
    trace: list = field(default_factory=list)
    # pre-absorption form of the returned parameters: (a, b, zeta*) of the best iterate
    best_unabsorbed: tuple = None

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "a", "b", "zeta_star", "A", "B", "Q"])
        for r in self.trace:
            w.writerow([r.k, repr(r.a), repr(r.b), repr(r.zeta_star), repr(r.A), repr(r.B), repr(r.Q)])
        return buf.getvalue()


def risks_at_design_points(spec: TestSpec, params: TunedParams):
    """``(Pr{benign | p0}, Pr{scanner | p1})`` evaluated exactly out to the hard bound."""
    plan = bounded_table(spec, params).to_plan()
    r0 = evaluate(plan, spec.p0).accept_prob[BENIGN]
    r1 = evaluate(plan, spec.p1).accept_prob[SCANNER]
    return r0, r1


def _ratio(budget: float, risk: float) -> float:
    return math.inf if risk <= 0.0 else budget / risk


def ratios(spec: TestSpec, params: TunedParams):
    """``(A, B)`` for the given parameters."""
    r0, r1 = risks_at_design_points(spec, params)
    return _ratio(spec.alpha, r0), _ratio(spec.beta, r1)


def _feasible(spec, a, b, zeta):
    """``(ok, A, B)``; parameters that break ``zeta*a, zeta*b < 1`` count as infeasible."""
    if zeta * a >= 1.0 or zeta * b >= 1.0:
        return False, 0.0, 0.0
    A, B = ratios(spec, TunedParams(a, b, zeta))
    return min(A, B) >= 1.0, A, B


def bisect_zeta(spec: TestSpec, a: float, b: float):
    """Largest ``zeta`` keeping ``R >= 1``: power-of-two scan, then bisection in ``[z, 2z)``."""
    if a <= 0 or b <= 0:
        raise ValueError("weighting coefficients must be positive")
    for i in range(SCAN_MAX_EXPONENT + 1):
        lo = 2.0**-i
        ok, A, B = _feasible(spec, a, b, lo)
        if ok:
            break
    else:
        raise InfeasibleTuningError(
            f"R < 1 for every zeta down to 2^-{SCAN_MAX_EXPONENT} with a={a}, b={b}"
        )
    hi = 2.0 * lo
    for _ in range(BISECT_MAX_ITER):
        if hi - lo <= BISECT_RTOL * lo:
            break
        mid = 0.5 * (lo + hi)
        ok, mA, mB = _feasible(spec, a, b, mid)
        if ok:
            lo, A, B = mid, mA, mB
        else:
            hi = mid
    return lo, TuneDiagnostics(A=A, B=B, Q=max(A, B), R=min(A, B))


def _is_max(x: float, q: float) -> bool:
    if math.isinf(q):
        return math.isinf(x)
    return abs(x - q) <= EQ_RTOL * max(1.0, q)


def minimax_tune(spec: TestSpec, k_max: int = 20):
    """Iterative minimax choice of ``(a, b)``; returns ``zeta = 1`` with ``zeta*`` absorbed.

    Runs ``k_max`` iterations.  Only iterates that improve ``Q`` replace the
    incumbent, so the result always satisfies ``R >= 1``.
    """
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    a, b = spec.alpha, spec.beta
    q_best = math.inf
    best = None
    trace = []
    for k in range(k_max):
        zeta, d = bisect_zeta(spec, a, b)
        trace.append(TraceRow(k, a, b, zeta, d.A, d.B, d.Q))
        if d.Q < q_best:
            best = (zeta * a, zeta * b, d, (a, b, zeta))
            q_best = d.Q
        # an infinite Q would blow up the update; keep the coefficient instead
        grow = 1.0 + (d.Q - 1.0) / UPDATE_DIVISOR if math.isfinite(d.Q) else 1.0
        new_a, new_b = zeta * a, zeta * b
        if _is_max(d.A, d.Q):
            new_a = zeta * a * grow
        if _is_max(d.B, d.Q):
            new_b = zeta * b * grow
        a, b = new_a, new_b
    a_hat, b_hat, d, raw = best
    diag = TuneDiagnostics(A=d.A, B=d.B, Q=d.Q, R=d.R, trace=trace, best_unabsorbed=raw)
    return TunedParams(a_hat, b_hat, 1.0), diag
