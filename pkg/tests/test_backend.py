"""The compiled kernels and the numpy fallback must agree bit for bit."""

import os
import subprocess
import sys

import numpy as np
import pytest

from seqscan import _backend
from seqscan.stats_core import TestSpec, TunedParams, _side_caps
from seqscan.triple import TripleSpec, compose_plan
from seqscan.trwa import TrwaParams, trwa_plan

pytestmark = pytest.mark.skipif(_backend.compiled_kernels is None, reason="extension not built")
CY, PY = _backend.compiled_kernels, _backend.python_kernels


def _plans(fig1):
    spec = TestSpec(0.1, 0.15, 0.1, 0.1)
    tri = TripleSpec.symmetric(0.25, 0.75, 0.15, 0.2)
    return [
        fig1[3],
        trwa_plan(spec, TrwaParams.from_spec(spec), 300),
        compose_plan(tri, TunedParams(0.5, 0.5), TunedParams(0.5, 0.5))[0],
    ]


@pytest.mark.parametrize("spec,params,n_max", [
    (TestSpec(0.2, 0.8, 0.1, 0.1), TunedParams(0.1, 0.1), 11),
    (TestSpec(0.1, 0.15, 0.1, 0.1), TunedParams(0.058, 0.046), 400),
    (TestSpec(0.3, 0.35, 0.1, 0.1), TunedParams(0.2, 0.01, 0.5), 300),
])
def test_bounds_parity(spec, params, n_max):
    cap, floor = _side_caps(n_max, spec)
    args = (n_max, spec.p0, spec.p1, params.benign_threshold, params.scanner_threshold, cap, floor)
    for x, y in zip(CY.new_test_bounds(*args), PY.new_test_bounds(*args)):
        assert np.array_equal(x, y)


@pytest.mark.parametrize("p", [0.05, 0.12, 0.5])
@pytest.mark.parametrize("tol", [0.0, 1e-9])
def test_forward_dp_parity(fig1, p, tol):
    for plan in _plans(fig1):
        args = (plan.row_ptr, plan.run_start, plan.run_label, plan.horizon, p, plan.n_labels, tol)
        a, b = CY.forward_dp(*args), PY.forward_dp(*args)
        assert np.allclose(a[0], b[0], rtol=0, atol=1e-14)
        assert np.allclose(a[1], b[1], rtol=0, atol=1e-14)
        assert a[2] == pytest.approx(b[2], abs=1e-14) and a[3] == b[3]


def test_simulation_parity(fig1):
    for plan in _plans(fig1):
        args = (plan.row_ptr, plan.run_start, plan.run_label, plan.horizon, 0.13, 3000, 2**64 - 5)
        for x, y in zip(CY.simulate_runs(*args), PY.simulate_runs(*args)):
            assert np.array_equal(np.asarray(x), np.asarray(y))


def test_switch_backend():
    try:
        _backend.use("python")
        assert _backend.name() == "python"
        _backend.use("cython")
        assert _backend.name() == "cython"
        with pytest.raises(ValueError):
            _backend.use("fortran")
    finally:
        _backend.use("cython")


def test_pure_env_selects_fallback():
    code = (
        "import seqscan; from seqscan.cli import main; "
        "assert seqscan.backend() == 'python'; "
        "raise SystemExit(main(['boundaries', '--p0', '0.2', '--p1', '0.8', '--alpha', '0.1', "
        "'--beta', '0.1', '--a', '0.1', '--b', '0.1']))"
    )
    env = {**os.environ, "SEQSCAN_PURE": "1"}
    res = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
    assert res.stdout.splitlines()[-1] == "11,5,6"
