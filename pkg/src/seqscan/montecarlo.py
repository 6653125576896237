"""Seeded simulation of stopping plans.

Each run ``r`` draws its outcomes from its own counter-based substream: a
SplitMix64 finalizer applied to ``key_r + t * GAMMA`` at step ``t``, with
``key_r = mix(seed + (r + 1) * GAMMA)``.  Runs therefore do not depend on
each other or on execution order, and both kernel backends produce the same
bits.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import _backend
from .plan import StoppingPlan

GENERATOR = "splitmix64-counter"
DEFAULT_QUANTILES = (0.5, 0.9, 0.99, 0.999)


@dataclass
class SimReport:
    p: float
    runs: int
    seed: int
    decision_freq: dict
    mean_stop: float
    stop_quantiles: dict
    std_err: dict
    truncated: int = 0
    max_stop: int = 0
    generator: str = GENERATOR

    def to_json(self) -> str:
        d = asdict(self)
        d["stop_quantiles"] = {repr(k): v for k, v in self.stop_quantiles.items()}
        return json.dumps(d, sort_keys=True)


def simulate(plan: StoppingPlan, p: float, runs: int, seed: int,
             quantiles=DEFAULT_QUANTILES) -> SimReport:
    """Run ``runs`` independent streams at success rate ``p`` through ``plan``.

    Runs still undecided at the plan horizon are counted in ``truncated`` and
    under the ``"truncated"`` key of ``decision_freq``.
    """
    if runs < 1:
        raise ValueError("runs must be >= 1")
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie in (0, 1), got {p}")
    seed64 = int(seed) & ((1 << 64) - 1)
    labels, stops, _ = _backend.kernels.simulate_runs(
        plan.row_ptr, plan.run_start, plan.run_label, plan.horizon, float(p), runs, seed64
    )
    counts = np.bincount(labels, minlength=plan.n_labels + 1)
    freq = {name: counts[i + 1] / runs for i, name in enumerate(plan.decisions)}
    truncated = int(counts[0])
    if truncated:
        freq["truncated"] = truncated / runs
    se = {k: math.sqrt(v * (1.0 - v) / runs) for k, v in freq.items()}
    mean_stop = float(stops.mean())
    se["mean_stop"] = float(stops.std(ddof=1) / math.sqrt(runs)) if runs > 1 else 0.0
    qs = {float(q): int(np.quantile(stops, q, method="inverted_cdf")) for q in quantiles}
    return SimReport(
        p=float(p),
        runs=runs,
        seed=int(seed),
        decision_freq=freq,
        mean_stop=mean_stop,
        stop_quantiles=qs,
        std_err=se,
        truncated=truncated,
        max_stop=int(stops.max()),
    )
