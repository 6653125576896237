"""Exact operating characteristics of stopping plans.

The primary evaluator is a forward recursion over the (n, s) lattice:
mass in continue cells splits by ``p`` / ``1 - p`` into the next row, mass
landing in a decision cell is banked.  ``brute_force_oc`` enumerates every
binary sequence instead and serves as an independent check.
"""

from __future__ import annotations

import csv
import io
import itertools
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .errors import InvalidPlanError
from .plan import CONTINUE, StoppingPlan
from .stats_core import BENIGN, SCANNER, TestSpec

BRUTE_FORCE_MAX_HORIZON = 20


@dataclass
class OcReport:
    p: float
    accept_prob: dict
    stop_dist: dict
    asn: float
    residual_mass: float
    horizon: int
    last_n: int = 0

    def stop_cdf(self):
        ns = np.array(sorted(self.stop_dist))
        return ns, np.cumsum([self.stop_dist[n] for n in ns])

    def total_mass(self) -> float:
        return sum(self.accept_prob.values()) + self.residual_mass


def _report(plan: StoppingPlan, p: float, accept, stop, residual: float, last_n: int) -> OcReport:
    stop_dist = {int(n): float(stop[n]) for n in np.flatnonzero(stop)}
    asn = sum(n * v for n, v in stop_dist.items()) + residual * last_n
    return OcReport(
        p=p,
        accept_prob={name: float(accept[i + 1]) for i, name in enumerate(plan.decisions)},
        stop_dist=stop_dist,
        asn=asn,
        residual_mass=float(residual),
        horizon=plan.horizon,
        last_n=last_n,
    )


def evaluate(plan: StoppingPlan, p: float, mass_tol: float = 0.0) -> OcReport:
    """Exact decision probabilities, stop-time distribution and ASN at success rate ``p``.

    With ``mass_tol > 0`` the recursion stops early once the continuing mass
    drops below it; the leftover is reported as ``residual_mass``.  ``asn``
    counts residual mass as stopping at the last row reached, so it is a lower
    bound whenever ``residual_mass > 0``.
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie in (0, 1), got {p}")
    accept, stop, residual, last_n = _backend.kernels.forward_dp(
        plan.row_ptr, plan.run_start, plan.run_label, plan.horizon, float(p), plan.n_labels, mass_tol
    )
    return _report(plan, p, accept, stop, residual, last_n)


def brute_force_oc(plan: StoppingPlan, p: float) -> OcReport:
    """Enumerate all ``2**horizon`` outcome sequences and apply the plan to each."""
    if plan.horizon > BRUTE_FORCE_MAX_HORIZON:
        raise InvalidPlanError(
            f"brute force refuses horizon {plan.horizon} > {BRUTE_FORCE_MAX_HORIZON}"
        )
    rows = [None] + [plan.row(n) for n in range(1, plan.horizon + 1)]
    accept = np.zeros(plan.n_labels + 1)
    stop = np.zeros(plan.horizon + 1)
    residual = 0.0
    total = 0.0
    for seq in itertools.product((0, 1), repeat=plan.horizon):
        k = sum(seq)
        prob = p**k * (1.0 - p) ** (plan.horizon - k)
        total += prob
        s = 0
        for n, x in enumerate(seq, start=1):
            s += x
            lab = rows[n][s]
            if lab != CONTINUE:
                accept[lab] += prob
                stop[n] += prob
                break
        else:
            residual += prob
    if abs(total - 1.0) > 1e-9:
        raise ArithmeticError(f"path probabilities sum to {total}")
    return _report(plan, p, accept, stop, residual, plan.horizon)


@dataclass
class RiskPoint:
    p: float
    risk: float
    zone: str
    report: OcReport = field(repr=False, default=None)


def binary_zone(p: float, spec: TestSpec) -> str:
    if p <= spec.p0:
        return "H0"
    if p >= spec.p1:
        return "H1"
    return "unspecified"


def risk_curve(plan: StoppingPlan, spec: TestSpec, p_grid, mass_tol: float = 0.0):
    """Probability of the wrong decision along ``p_grid``.

    For ``p <= p0`` the error is a benign decision, for ``p >= p1`` a scanner
    decision; between the thresholds no requirement applies and the row is
    flagged ``unspecified`` with risk 0.
    """
    out = []
    for p in p_grid:
        rep = evaluate(plan, p, mass_tol)
        zone = binary_zone(p, spec)
        if zone == "H0":
            risk = rep.accept_prob[BENIGN]
        elif zone == "H1":
            risk = rep.accept_prob[SCANNER]
        else:
            risk = 0.0
        out.append(RiskPoint(p, risk, zone, rep))
    return out


@dataclass
class RatioPoint:
    p: float
    ratio: float
    asn_a: float
    asn_b: float
    residual_a: float
    residual_b: float


def asn_ratio_curve(plan_a: StoppingPlan, plan_b: StoppingPlan, p_grid, mass_tol_b: float = 0.0):
    """``asn(plan_a, p) / asn(plan_b, p)`` with both residual masses reported."""
    out = []
    for p in p_grid:
        ra = evaluate(plan_a, p)
        rb = evaluate(plan_b, p, mass_tol_b)
        out.append(RatioPoint(p, ra.asn / max(rb.asn, 1.0), ra.asn, rb.asn, ra.residual_mass, rb.residual_mass))
    return out


def reports_to_csv(reports, decisions, extra=None) -> str:
    """CSV ``p,accept_<label>...,asn,residual`` plus optional extra columns per row."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    extra = extra or []
    extra_keys = list(extra[0].keys()) if extra else []
    w.writerow(["p"] + [f"accept_{d}" for d in decisions] + ["asn", "residual"] + extra_keys)
    for i, rep in enumerate(reports):
        row = [repr(float(rep.p))] + [repr(rep.accept_prob[d]) for d in decisions]
        row += [repr(rep.asn), repr(rep.residual_mass)]
        if extra:
            row += [extra[i][k] for k in extra_keys]
        w.writerow(row)
    return buf.getvalue()


def stop_dist_to_csv(report: OcReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "prob"])
    for n in sorted(report.stop_dist):
        w.writerow([n, repr(report.stop_dist[n])])
    return buf.getvalue()
