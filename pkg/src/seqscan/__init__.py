"""Bounded sequential tests for portscan detection."""

from . import _backend
from .errors import SeqScanError
from .maxobs import MaxObsResult, bounded_table, solve_max_obs
from .oc_eval import OcReport, evaluate, risk_curve
from .plan import StoppingPlan
from .stats_core import BoundaryTable, DetectorState, TestSpec, TunedParams, build_boundary_table, classify, run, step
from .triple import TripleSpec, build_triple_plan
from .trwa import TrwaParams, evaluate_trwa, trwa_plan
from .tuner import minimax_tune

__version__ = "0.1.0"


def backend() -> str:
    """Name of the active kernel backend, ``"cython"`` or ``"python"``."""
    return _backend.name()


__all__ = [
    "BoundaryTable", "DetectorState", "MaxObsResult", "OcReport", "SeqScanError",
    "StoppingPlan", "TestSpec", "TripleSpec", "TrwaParams", "TunedParams",
    "backend", "bounded_table", "build_boundary_table", "build_triple_plan",
    "classify", "evaluate", "evaluate_trwa", "minimax_tune", "risk_curve", "run",
    "solve_max_obs", "step", "trwa_plan",
]
