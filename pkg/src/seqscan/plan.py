"""Stateless stopping plans over the (n, s) lattice.

A plan labels every cell ``(n, s)``, ``0 <= s <= n``, ``1 <= n <= horizon``
with either ``CONTINUE`` (0) or a decision code ``1..len(decisions)``.
Rows are stored run-length encoded in CSR form: row ``n`` owns runs
``row_ptr[n-1]:row_ptr[n]``; each run starts at ``run_start[j]`` and extends
to the next run's start (or to ``n``).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import InvalidPlanError

CONTINUE = 0


@dataclass(frozen=True)
class StoppingPlan:
    decisions: tuple
    horizon: int
    row_ptr: np.ndarray
    run_start: np.ndarray
    run_label: np.ndarray

    def __post_init__(self):
        self.validate()

    @property
    def n_labels(self) -> int:
        return len(self.decisions)

    def validate(self):
        if self.horizon < 1:
            raise InvalidPlanError("plan horizon must be >= 1")
        if len(self.row_ptr) != self.horizon + 1 or self.row_ptr[0] != 0:
            raise InvalidPlanError("row_ptr must have horizon + 1 entries starting at 0")
        if len(self.run_start) != self.row_ptr[-1] or len(self.run_label) != len(self.run_start):
            raise InvalidPlanError("run arrays disagree with row_ptr")
        if np.any(np.diff(self.row_ptr) < 1):
            raise InvalidPlanError("every row needs at least one run")
        starts = self.run_start[self.row_ptr[:-1]]
        if np.any(starts != 0):
            raise InvalidPlanError("every row must start its first run at s = 0")
        if len(self.run_label) and (self.run_label.min() < 0 or self.run_label.max() > self.n_labels):
            raise InvalidPlanError("run label outside the decision set")
        inner = np.ones(len(self.run_start), dtype=bool)
        inner[self.row_ptr[:-1]] = False
        if np.any(np.diff(self.run_start)[inner[1:]] <= 0):
            raise InvalidPlanError("runs within a row must start at strictly increasing s")
        last = self.run_start[self.row_ptr[1:] - 1]
        if np.any(last > np.arange(1, self.horizon + 1)):
            raise InvalidPlanError("a run starts beyond the end of its row")

    def row(self, n: int) -> np.ndarray:
        """Dense label vector of length ``n + 1``."""
        a, b = self.row_ptr[n - 1], self.row_ptr[n]
        starts = list(self.run_start[a:b]) + [n + 1]
        out = np.empty(n + 1, dtype=np.int8)
        for j in range(b - a):
            out[starts[j]:starts[j + 1]] = self.run_label[a + j]
        return out

    def label(self, n: int, s: int) -> int:
        a, b = self.row_ptr[n - 1], self.row_ptr[n]
        j = int(np.searchsorted(self.run_start[a:b], s, side="right")) - 1
        return int(self.run_label[a + j])

    def label_name(self, code: int) -> str:
        return "continue" if code == CONTINUE else self.decisions[code - 1]

    def continue_cells(self, n: int) -> int:
        return int(np.count_nonzero(self.row(n) == CONTINUE))

    def truncated(self, horizon: int) -> "StoppingPlan":
        """The same rule cut off after ``horizon`` rows (leftover mass becomes residual)."""
        if not 1 <= horizon <= self.horizon:
            raise InvalidPlanError(f"cannot truncate horizon {self.horizon} to {horizon}")
        end = self.row_ptr[horizon]
        return StoppingPlan(
            self.decisions,
            horizon,
            self.row_ptr[: horizon + 1].copy(),
            self.run_start[:end].copy(),
            self.run_label[:end].copy(),
        )

    def iter_cells(self):
        for n in range(1, self.horizon + 1):
            for s, code in enumerate(self.row(n)):
                yield n, s, int(code)

    @classmethod
    def from_intervals(cls, rows: Sequence[Sequence[tuple]], decisions) -> "StoppingPlan":
        """Build from per-row ``(lo, hi, label)`` intervals; empty intervals are dropped."""
        row_ptr = [0]
        starts, labels = [], []
        for n, intervals in enumerate(rows, start=1):
            prev_label = None
            expect = 0
            for lo, hi, lab in intervals:
                lo, hi = max(lo, 0), min(hi, n)
                if hi < lo:
                    continue
                if lo != expect:
                    raise InvalidPlanError(f"row {n}: intervals leave a gap at s = {expect}")
                if lab != prev_label:
                    starts.append(lo)
                    labels.append(lab)
                    prev_label = lab
                expect = hi + 1
            if expect != n + 1:
                raise InvalidPlanError(f"row {n}: intervals do not cover 0..{n}")
            row_ptr.append(len(starts))
        return cls(
            tuple(decisions),
            len(rows),
            np.asarray(row_ptr, dtype=np.int64),
            np.asarray(starts, dtype=np.int64),
            np.asarray(labels, dtype=np.int8),
        )

    @classmethod
    def from_dense_rows(cls, rows, decisions) -> "StoppingPlan":
        """Run-length encode dense label vectors; ``rows[i]`` labels row ``i + 1``."""
        row_ptr = [0]
        starts, labels = [], []
        for n, row in enumerate(rows, start=1):
            row = np.asarray(row, dtype=np.int8)
            if len(row) != n + 1:
                raise InvalidPlanError(f"row {n} has {len(row)} labels, expected {n + 1}")
            cut = np.flatnonzero(np.diff(row)) + 1
            st = np.concatenate(([0], cut))
            starts.extend(st.tolist())
            labels.extend(row[st].tolist())
            row_ptr.append(len(starts))
        return cls(
            tuple(decisions),
            len(rows),
            np.asarray(row_ptr, dtype=np.int64),
            np.asarray(starts, dtype=np.int64),
            np.asarray(labels, dtype=np.int8),
        )

    @classmethod
    def from_label_fn(cls, fn: Callable[[int, int], int], horizon: int, decisions) -> "StoppingPlan":
        """Enumerate ``fn(n, s)`` over the whole lattice and run-length encode it."""
        rows = [[fn(n, s) for s in range(n + 1)] for n in range(1, horizon + 1)]
        return cls.from_dense_rows(rows, decisions)
