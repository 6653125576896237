"""Threshold Random Walk baseline: Wald's SPRT for a Bernoulli success rate.

The walk is the log of ``Pr{X_1..X_n | p0} / Pr{X_1..X_n | p1}``.  It is
recomputed from the integer counts ``(n, s)`` at every comparison so the
boundary decision never depends on accumulated rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DecidedStateError, HorizonExceededError
from .oc_eval import evaluate
from .plan import CONTINUE, StoppingPlan
from .stats_core import BENIGN, BINARY_DECISIONS, SCANNER, UNDECIDED, TestSpec

DEFAULT_MASS_TOL = 1e-12
DEFAULT_MAX_HORIZON = 10**6
_INITIAL_HORIZON = 1024


@dataclass(frozen=True)
class TrwaParams:
    k0: float
    k1: float

    def __post_init__(self):
        if not 0.0 < self.k0 < 1.0 < self.k1:
            raise ValueError(f"need 0 < k0 < 1 < k1, got k0={self.k0}, k1={self.k1}")

    @classmethod
    def from_spec(cls, spec: TestSpec) -> "TrwaParams":
        """Wald's thresholds ``k0 = alpha``, ``k1 = 1/beta``."""
        return cls(spec.alpha, 1.0 / spec.beta)


@dataclass
class TrwaState:
    n: int = 0
    s: int = 0
    llr: float = 0.0
    decision: str = UNDECIDED

    @property
    def decided(self) -> bool:
        return self.decision != UNDECIDED


def _increments(spec: TestSpec):
    return math.log(spec.p0 / spec.p1), math.log((1.0 - spec.p0) / (1.0 - spec.p1))


def log_ratio(n: int, s: int, spec: TestSpec) -> float:
    inc_s, inc_f = _increments(spec)
    return s * inc_s + (n - s) * inc_f


def classify(n: int, s: int, params: TrwaParams, spec: TestSpec) -> str:
    llr = log_ratio(n, s, spec)
    if llr <= math.log(params.k0):
        return BENIGN
    if llr >= math.log(params.k1):
        return SCANNER
    return UNDECIDED


def trwa_step(state: TrwaState, outcome: int, params: TrwaParams, spec: TestSpec) -> TrwaState:
    if state.decided:
        raise DecidedStateError(f"walk already decided {state.decision!r}")
    if outcome not in (0, 1):
        raise ValueError(f"outcome must be 0 or 1, got {outcome!r}")
    n, s = state.n + 1, state.s + int(outcome)
    return TrwaState(n, s, log_ratio(n, s, spec), classify(n, s, params, spec))


def trwa_plan(spec: TestSpec, params: TrwaParams, horizon: int) -> StoppingPlan:
    """Stateless labelling of the first ``horizon`` rows.

    A success lowers the walk, so scanner cells form a down-set in ``s`` and
    benign cells an up-set.  Row thresholds come from the linear solve and are
    then nudged with the exact predicate used by :func:`classify`.
    """
    inc_s, inc_f = _increments(spec)
    lk0, lk1 = math.log(params.k0), math.log(params.k1)
    n = np.arange(1, horizon + 1, dtype=np.int64)
    nf = n.astype(np.float64)
    slope = inc_s - inc_f  # < 0

    def llr(s):
        return s.astype(np.float64) * inc_s + (n - s).astype(np.float64) * inc_f

    # scanner: largest s with llr >= lk1
    sc = np.floor((lk1 - nf * inc_f) / slope).astype(np.int64)
    sc = np.clip(sc, -1, n)
    for _ in range(3):
        up = (sc + 1 <= n) & (llr(np.minimum(sc + 1, n)) >= lk1)
        sc = np.where(up, sc + 1, sc)
        down = (sc >= 0) & ~(llr(np.maximum(sc, 0)) >= lk1)
        sc = np.where(down, sc - 1, sc)
    # benign: smallest s with llr <= lk0
    be = np.ceil((lk0 - nf * inc_f) / slope).astype(np.int64)
    be = np.clip(be, 0, n + 1)
    for _ in range(3):
        dn = (be - 1 >= 0) & (llr(np.maximum(be - 1, 0)) <= lk0)
        be = np.where(dn, be - 1, be)
        up = (be <= n) & ~(llr(np.minimum(be, n)) <= lk0)
        be = np.where(up, be + 1, be)
    # ln k0 < 0 < ln k1, so the two sets never overlap
    mid_lo = sc + 1
    has_sc = sc >= 0
    has_mid = mid_lo < be
    has_be = be <= n
    counts = has_sc.astype(np.int64) + has_mid + has_be
    row_ptr = np.concatenate(([0], np.cumsum(counts)))
    starts = np.empty(row_ptr[-1], dtype=np.int64)
    labels = np.empty(row_ptr[-1], dtype=np.int8)
    pos = row_ptr[:-1].copy()
    starts[pos[has_sc]] = 0
    labels[pos[has_sc]] = 1
    pos = pos + has_sc
    starts[pos[has_mid]] = mid_lo[has_mid]
    labels[pos[has_mid]] = CONTINUE
    pos = pos + has_mid
    starts[pos[has_be]] = be[has_be]
    labels[pos[has_be]] = 2
    return StoppingPlan(BINARY_DECISIONS, horizon, row_ptr.astype(np.int64), starts, labels)


def evaluate_trwa(spec: TestSpec, params: TrwaParams, p: float,
                  mass_tol: float = DEFAULT_MASS_TOL, max_horizon: int = DEFAULT_MAX_HORIZON):
    """Exact OC of the walk, truncated once the continuing mass falls below ``mass_tol``.

    Returns ``(report, plan)``; the horizon doubles until the cutoff is met or
    ``max_horizon`` is reached, and any leftover mass stays in ``residual_mass``.
    """
    horizon = min(_INITIAL_HORIZON, max_horizon)
    while True:
        plan = trwa_plan(spec, params, horizon)
        rep = evaluate(plan, p, mass_tol)
        if rep.residual_mass < mass_tol or horizon >= max_horizon:
            return rep, plan
        horizon = min(2 * horizon, max_horizon)


def trwa_stop_time_quantile(spec: TestSpec, params: TrwaParams, p: float, q: float,
                            mass_tol: float = DEFAULT_MASS_TOL,
                            max_horizon: int = DEFAULT_MAX_HORIZON) -> int:
    """Smallest ``n`` with ``Pr{stopped by n | p} >= q``."""
    if not 0.0 <= q < 1.0:
        raise ValueError("q must lie in [0, 1)")
    if q == 0.0:
        return 1
    rep, _ = evaluate_trwa(spec, params, p, mass_tol, max_horizon)
    ns, cdf = rep.stop_cdf()
    hit = np.flatnonzero(cdf >= q)
    if len(hit) == 0:
        raise HorizonExceededError(
            f"stopped mass {cdf[-1] if len(cdf) else 0.0} < {q} within horizon {rep.last_n}",
            float(cdf[-1]) if len(cdf) else 0.0,
        )
    return int(ns[hit[0]])
