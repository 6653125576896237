"""Three-way classification: scanner / marginal / benign.

Hypotheses are H0: p <= p0 (scanner), H1: p0 < p < p1 (marginal) and
H2: p >= p1 (benign), with indifference zones ``(p0_lo, p0_hi)`` and
``(p1_lo, p1_hi)`` where no error requirement applies.

The plan is composed from two bounded binary tests: a lower test over
``(p0_lo, p0_hi)`` with budgets ``(delta0, delta1)`` and an upper test over
``(p1_lo, p1_hi)`` with budgets ``(delta1, delta2)``.  A cell is labelled

* H0 when the lower test accepts its lower hypothesis,
* H2 when the upper test accepts its upper hypothesis,
* H1 when the lower test accepts upper and the upper test accepts lower,

and continues otherwise.  Risk compliance is checked exactly afterwards.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .errors import DecidedStateError
from .maxobs import solve_max_obs
from .oc_eval import OcReport, evaluate
from .plan import CONTINUE, StoppingPlan
from .stats_core import TestSpec, TunedParams, UNDECIDED, build_boundary_table
from .tuner import minimax_tune

H0, H1, H2 = "scanner", "marginal", "benign"
TRIPLE_DECISIONS = (H0, H1, H2)
HYPOTHESES = {"H0": H0, "H1": H1, "H2": H2}
MAX_FALLBACKS = 4


@dataclass(frozen=True)
class TripleSpec:
    p0: float
    p1: float
    p0_lo: float
    p0_hi: float
    p1_lo: float
    p1_hi: float
    delta0: float
    delta1: float
    delta2: float

    def __post_init__(self):
        chain = (0.0, self.p0_lo, self.p0, self.p0_hi, self.p1_lo, self.p1, self.p1_hi, 1.0)
        if any(x >= y for x, y in zip(chain, chain[1:])):
            raise ValueError("need 0 < p0_lo < p0 < p0_hi < p1_lo < p1 < p1_hi < 1")
        for d in (self.delta0, self.delta1, self.delta2):
            if not 0.0 < d < 1.0:
                raise ValueError("each delta must lie in (0, 1)")

    @classmethod
    def symmetric(cls, p0, p1, offset, delta0, delta1=None, delta2=None) -> "TripleSpec":
        """Indifference zones of half-width ``offset`` around both thresholds."""
        delta1 = delta0 if delta1 is None else delta1
        delta2 = delta0 if delta2 is None else delta2
        return cls(p0, p1, p0 - offset, p0 + offset, p1 - offset, p1 + offset, delta0, delta1, delta2)

    def lower_spec(self, delta1=None) -> TestSpec:
        return TestSpec(self.p0_lo, self.p0_hi, self.delta0, self.delta1 if delta1 is None else delta1)

    def upper_spec(self, delta1=None) -> TestSpec:
        return TestSpec(self.p1_lo, self.p1_hi, self.delta1 if delta1 is None else delta1, self.delta2)

    def zone(self, p: float) -> str:
        """Required hypothesis at ``p`` or ``"indifference"``."""
        if p <= self.p0_lo:
            return "H0"
        if self.p0_hi <= p <= self.p1_lo:
            return "H1"
        if p >= self.p1_hi:
            return "H2"
        return "indifference"

    def true_hypothesis(self, p: float) -> str:
        if p <= self.p0:
            return "H0"
        if p < self.p1:
            return "H1"
        return "H2"


@dataclass
class TripleDiagnostics:
    lower_params: TunedParams
    upper_params: TunedParams
    lower_n_max: int
    upper_n_max: int
    conflict_cells: int = 0
    delta1_used: float = None
    fallbacks: int = 0
    max_risk_excess: float = 0.0
    notes: list = field(default_factory=list)


def compose_plan(spec: TripleSpec, lower: TunedParams, upper: TunedParams, delta1=None):
    """Composite plan for given sub-test parameters; returns ``(plan, diagnostics)``."""
    ls, us = spec.lower_spec(delta1), spec.upper_spec(delta1)
    n_lo = solve_max_obs(ls, lower).n_max
    n_up = solve_max_obs(us, upper).n_max
    horizon = max(n_lo, n_up)
    lt = build_boundary_table(ls, lower, horizon)
    ut = build_boundary_table(us, upper, horizon)
    rows = []
    conflicts = 0
    for n in range(1, horizon + 1):
        s = np.arange(n + 1)
        l_low = s <= lt.s_scanner[n]
        l_up = ~l_low & (s >= lt.s_benign[n])
        u_low = s <= ut.s_scanner[n]
        u_up = ~u_low & (s >= ut.s_benign[n])
        row = np.full(n + 1, CONTINUE, dtype=np.int8)
        row[l_up & u_low] = 2
        row[u_up] = 3
        row[l_low] = 1
        conflicts += int(np.count_nonzero(l_low & u_up))
        rows.append(row)
    plan = StoppingPlan.from_dense_rows(rows, TRIPLE_DECISIONS)
    diag = TripleDiagnostics(lower, upper, n_lo, n_up, conflict_cells=conflicts,
                             delta1_used=spec.delta1 if delta1 is None else delta1)
    return plan, diag


def compliance_grid(spec: TripleSpec, points: int = 200):
    """``points`` evenly spaced rates on (0, 1) outside the zones, plus the zone edges."""
    grid = (np.arange(points) + 0.5) / points
    grid = [float(p) for p in grid if spec.zone(p) != "indifference"]
    grid += [spec.p0_lo, spec.p0_hi, spec.p1_lo, spec.p1_hi]
    return sorted(grid)


def _max_excess(plan: StoppingPlan, spec: TripleSpec, grid) -> float:
    worst = -np.inf
    for pt in triple_risk_curve(plan, spec, grid):
        if pt.zone != "indifference":
            worst = max(worst, pt.risk - pt.budget)
    return float(worst)


def build_triple_plan(spec: TripleSpec, k_max: int = 20, grid_points: int = 200):
    """Tune both sub-tests, compose, and verify the three risk requirements exactly.

    If the composite violates a requirement somewhere on the compliance grid,
    the shared middle budget is halved for both sub-tests and they are
    re-tuned, up to ``MAX_FALLBACKS`` times.
    """
    grid = compliance_grid(spec, grid_points)
    delta1 = spec.delta1
    notes = []
    for attempt in range(MAX_FALLBACKS + 1):
        lower, _ = minimax_tune(spec.lower_spec(delta1), k_max)
        upper, _ = minimax_tune(spec.upper_spec(delta1), k_max)
        plan, diag = compose_plan(spec, lower, upper, delta1)
        diag.fallbacks = attempt
        diag.notes = notes
        diag.max_risk_excess = _max_excess(plan, spec, grid)
        if diag.max_risk_excess <= 0.0:
            return plan, diag
        notes.append(f"delta1={delta1:g}: risk exceeds budget by {diag.max_risk_excess:.3g}")
        delta1 /= 2.0
    return plan, diag


@dataclass
class TripleRiskPoint:
    p: float
    risk: float
    zone: str
    budget: float
    report: OcReport = field(repr=False, default=None)


def triple_risk_curve(plan: StoppingPlan, spec: TripleSpec, p_grid):
    """Probability of accepting a hypothesis whose region excludes ``p``.

    Points inside an indifference zone are flagged ``"indifference"`` and
    carry no budget.
    """
    budgets = {"H0": spec.delta0, "H1": spec.delta1, "H2": spec.delta2}
    out = []
    for p in p_grid:
        rep = evaluate(plan, p)
        zone = spec.zone(p)
        truth = HYPOTHESES[zone if zone != "indifference" else spec.true_hypothesis(p)]
        risk = sum(v for k, v in rep.accept_prob.items() if k != truth) + rep.residual_mass
        out.append(TripleRiskPoint(p, risk, zone, budgets.get(zone, float("nan")), rep))
    return out


def bands(plan: StoppingPlan, n: int):
    """Maximal runs of row ``n`` as ``(label, s_lo, s_hi)`` triples."""
    row = plan.row(n)
    out = []
    start = 0
    for s in range(1, n + 2):
        if s == n + 1 or row[s] != row[start]:
            out.append((plan.label_name(int(row[start])), start, s - 1))
            start = s
    return out


def regions_to_csv(plan: StoppingPlan) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "s", "label"])
    for n, s, code in plan.iter_cells():
        w.writerow([n, s, plan.label_name(code)])
    return buf.getvalue()


@dataclass
class TripleState:
    n: int = 0
    s: int = 0
    decision: str = UNDECIDED

    @property
    def decided(self) -> bool:
        return self.decision != UNDECIDED


def triple_step(state: TripleState, outcome: int, plan: StoppingPlan) -> TripleState:
    if state.decided:
        raise DecidedStateError(f"classifier already decided {state.decision!r}")
    if outcome not in (0, 1):
        raise ValueError(f"outcome must be 0 or 1, got {outcome!r}")
    n, s = state.n + 1, state.s + int(outcome)
    code = plan.label(n, s)
    return TripleState(n, s, UNDECIDED if code == CONTINUE else plan.decisions[code - 1])
