"""Binomial test problem, divergence statistics and the bounded sequential rule.

A remote source produces Bernoulli outcomes (1 = the first attempt to a
distinct local host succeeded).  The detector keeps the count of
observations ``n`` and successes ``s`` and stops as soon as

* ``Z(s/n) >= ln(1/(zeta*b)) / n`` with ``s/n <= p1``  -> scanner, or
* ``Y(s/n) >= ln(1/(zeta*a)) / n`` with ``s/n >= p0``  -> benign,

where ``Y`` and ``Z`` are the Bernoulli Kullback-Leibler divergences of the
empirical rate from ``p0`` and ``p1``.  When both hold, scanner wins.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _backend
from .errors import DecidedStateError
from .plan import CONTINUE, StoppingPlan

UNDECIDED = "undecided"
SCANNER = "scanner"
BENIGN = "benign"
BINARY_DECISIONS = (SCANNER, BENIGN)


@dataclass(frozen=True)
class TestSpec:
    """Thresholds ``p0 < p1`` and error budgets for H0: p <= p0 vs H1: p >= p1."""

    __test__ = False  # keep pytest from collecting this class

    p0: float
    p1: float
    alpha: float
    beta: float

    def __post_init__(self):
        if not 0.0 < self.p0 < self.p1 < 1.0:
            raise ValueError(f"need 0 < p0 < p1 < 1, got p0={self.p0}, p1={self.p1}")
        for name in ("alpha", "beta"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ValueError(f"{name} must lie in (0, 1), got {v}")


@dataclass(frozen=True)
class TunedParams:
    """Weighting coefficients ``a``, ``b`` and risk tuning parameter ``zeta``."""

    a: float
    b: float
    zeta: float = 1.0

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0 and self.zeta > 0):
            raise ValueError("a, b and zeta must be positive")
        if self.zeta * self.a >= 1.0 or self.zeta * self.b >= 1.0:
            raise ValueError(
                f"zeta*a and zeta*b must be < 1 (got {self.zeta * self.a}, {self.zeta * self.b})"
            )

    @property
    def benign_threshold(self) -> float:
        """``ln(1/(zeta*a))``, the numerator of the benign boundary."""
        return math.log(1.0 / (self.zeta * self.a))

    @property
    def scanner_threshold(self) -> float:
        return math.log(1.0 / (self.zeta * self.b))


@dataclass
class DetectorState:
    n: int = 0
    s: int = 0
    decision: str = UNDECIDED

    def __post_init__(self):
        if not 0 <= self.s <= self.n:
            raise ValueError(f"need 0 <= s <= n, got n={self.n}, s={self.s}")

    @property
    def decided(self) -> bool:
        return self.decision != UNDECIDED


def _divergence(p_hat, p: float) -> float:
    if not 0.0 < p < 1.0:
        raise ValueError(f"reference probability must lie in (0, 1), got {p}")
    if p_hat < 0 or p_hat > 1:
        raise ValueError(f"empirical rate must lie in [0, 1], got {p_hat}")
    if p_hat == 0:
        return math.log(1.0 / (1.0 - p))
    if p_hat == 1:
        return math.log(1.0 / p)
    x = float(p_hat)
    return x * math.log(x / p) + (1.0 - x) * math.log((1.0 - x) / (1.0 - p))


def y_stat(p_hat, p0: float) -> float:
    """Divergence of the empirical rate ``p_hat`` from ``p0`` (drives the benign boundary)."""
    return _divergence(p_hat, p0)


def z_stat(p_hat, p1: float) -> float:
    """Divergence of the empirical rate ``p_hat`` from ``p1`` (drives the scanner boundary)."""
    return _divergence(p_hat, p1)


def _rate(s: int, n: int):
    # exact 0 and 1 keep the case split on integers; interior values go through
    # the same correctly rounded division the compiled kernel uses
    if s == 0:
        return 0
    if s == n:
        return 1
    return s / n


def is_scanner_cell(n: int, s: int, params: TunedParams, spec: TestSpec) -> bool:
    if Fraction(s, n) > Fraction(spec.p1):
        return False
    return z_stat(_rate(s, n), spec.p1) >= params.scanner_threshold / n


def is_benign_cell(n: int, s: int, params: TunedParams, spec: TestSpec) -> bool:
    if Fraction(s, n) < Fraction(spec.p0):
        return False
    return y_stat(_rate(s, n), spec.p0) >= params.benign_threshold / n


def classify(n: int, s: int, params: TunedParams, spec: TestSpec) -> str:
    """Stateless decision at lattice point ``(n, s)``; scanner is checked first."""
    if is_scanner_cell(n, s, params, spec):
        return SCANNER
    if is_benign_cell(n, s, params, spec):
        return BENIGN
    return UNDECIDED


def step(state: DetectorState, outcome: int, params: TunedParams, spec: TestSpec) -> DetectorState:
    """Feed one Bernoulli outcome; returns the successor state (input is not mutated)."""
    if state.decided:
        raise DecidedStateError(f"detector already decided {state.decision!r}")
    if outcome not in (0, 1):
        raise ValueError(f"outcome must be 0 or 1, got {outcome!r}")
    n = state.n + 1
    s = state.s + int(outcome)
    return DetectorState(n, s, classify(n, s, params, spec))


def run(outcomes, params: TunedParams, spec: TestSpec) -> DetectorState:
    """Step through ``outcomes`` until a decision or the input is exhausted."""
    state = DetectorState()
    for x in outcomes:
        state = step(state, x, params, spec)
        if state.decided:
            break
    return state


def _side_caps(n_max: int, spec: TestSpec):
    # largest s with s/n <= p1 and smallest s with s/n >= p0, in exact arithmetic
    num1, den1 = spec.p1.as_integer_ratio()
    num0, den0 = spec.p0.as_integer_ratio()
    ns = range(n_max + 1)
    cap = np.array([(num1 * n) // den1 for n in ns], dtype=np.int64)
    floor = np.array([-((-num0 * n) // den0) for n in ns], dtype=np.int64)
    return cap, floor


@dataclass(frozen=True)
class BoundaryTable:
    """Per-row stopping sets of the bounded test.

    ``s_scanner[n]`` is the largest success count that stops with a scanner
    decision (-1 if none); ``s_benign[n]`` the smallest that stops benign
    (``n + 1`` if none).  Index 0 is unused.
    """

    n_max: int
    s_scanner: np.ndarray
    s_benign: np.ndarray

    def scanner_bound(self, n: int):
        v = int(self.s_scanner[n])
        return None if v < 0 else v

    def benign_bound(self, n: int):
        v = int(self.s_benign[n])
        return None if v > n else v

    def decision(self, n: int, s: int) -> str:
        if not 1 <= n <= self.n_max:
            raise IndexError(f"row {n} outside 1..{self.n_max}")
        if s <= self.s_scanner[n]:
            return SCANNER
        if s >= self.s_benign[n]:
            return BENIGN
        return UNDECIDED

    def undecided_at(self, n: int) -> int:
        """Number of continue cells in row ``n``."""
        lo = int(self.s_scanner[n]) + 1
        hi = min(int(self.s_benign[n]), n + 1)
        return max(0, hi - lo)

    def to_plan(self) -> StoppingPlan:
        rows = []
        for n in range(1, self.n_max + 1):
            sc = int(self.s_scanner[n])
            be = max(int(self.s_benign[n]), sc + 1)
            rows.append([(0, sc, 1), (sc + 1, be - 1, CONTINUE), (be, n, 2)])
        return StoppingPlan.from_intervals(rows, BINARY_DECISIONS)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "s_scanner", "s_benign"])
        for n in range(1, self.n_max + 1):
            sc, be = self.scanner_bound(n), self.benign_bound(n)
            w.writerow([n, "" if sc is None else sc, "" if be is None else be])
        return buf.getvalue()


def build_boundary_table(spec: TestSpec, params: TunedParams, n_max: int) -> BoundaryTable:
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    cap, floor = _side_caps(n_max, spec)
    sc, be = _backend.kernels.new_test_bounds(
        n_max, spec.p0, spec.p1, params.benign_threshold, params.scanner_threshold, cap, floor
    )
    sc.setflags(write=False)
    be.setflags(write=False)
    return BoundaryTable(n_max, sc, be)
