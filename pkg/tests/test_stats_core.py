import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from seqscan.errors import DecidedStateError
from seqscan.stats_core import (
    BENIGN, SCANNER, UNDECIDED, DetectorState, TestSpec, TunedParams,
    build_boundary_table, classify, run, step, y_stat, z_stat,
)

probs = st.floats(0.01, 0.99)


def test_y_stat_cases():
    assert y_stat(0, 0.2) == pytest.approx(math.log(1 / 0.8))
    assert y_stat(Fraction(1, 5), 0.2) == pytest.approx(0.0, abs=1e-15)
    assert y_stat(1, 0.2) == pytest.approx(math.log(5))


def test_z_stat_cases():
    assert z_stat(0, 0.8) == pytest.approx(math.log(5))
    assert z_stat(0.8, 0.8) == pytest.approx(0.0, abs=1e-15)
    assert z_stat(0.5, 0.8) == pytest.approx(0.5 * math.log(0.5 / 0.8) + 0.5 * math.log(0.5 / 0.2))


def test_domain_errors():
    with pytest.raises(ValueError):
        y_stat(0.5, 1.0)
    with pytest.raises(ValueError):
        TestSpec(0.8, 0.2, 0.1, 0.1)
    with pytest.raises(ValueError):
        TunedParams(0.5, 0.5, 2.0)


@given(st.integers(0, 200), st.integers(1, 200), probs)
def test_statistics_non_negative(s, n, p):
    s = min(s, n)
    assert y_stat(Fraction(s, n), p) >= 0.0
    assert z_stat(Fraction(s, n), p) >= 0.0


def test_step_examples(fig1):
    spec, params, _, _ = fig1
    assert step(DetectorState(1, 0), 0, params, spec).decision == SCANNER
    assert step(DetectorState(1, 1), 1, params, spec).decision == BENIGN
    one = step(DetectorState(), 1, params, spec)
    assert (one.n, one.s, one.decision) == (1, 1, UNDECIDED)


def test_decided_state_is_frozen(fig1):
    spec, params, _, _ = fig1
    done = run([0, 0], params, spec)
    assert done.decision == SCANNER
    with pytest.raises(DecidedStateError):
        step(done, 1, params, spec)


def test_table_examples(fig1):
    _, _, table, _ = fig1
    assert table.scanner_bound(2) == 0 and table.benign_bound(2) == 2
    assert table.scanner_bound(1) is None and table.benign_bound(1) is None
    assert table.undecided_at(11) == 0
    assert table.to_csv().splitlines()[:3] == ["n,s_scanner,s_benign", "1,,", "2,0,2"]


def _check_table_agrees(spec, params, n_max):
    table = build_boundary_table(spec, params, n_max)
    for n in range(1, n_max + 1):
        row = [table.decision(n, s) for s in range(n + 1)]
        assert row == [classify(n, s, params, spec) for s in range(n + 1)]
        sc = [d == SCANNER for d in row]
        be = [d == BENIGN for d in row]
        # scanner cells form a prefix, benign cells a suffix
        assert sc == sorted(sc, reverse=True) and be == sorted(be)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.05, 0.45), st.floats(0.05, 0.45), st.floats(0.01, 0.5), st.floats(0.01, 0.5))
def test_table_matches_scalar_rule(p0, gap, a, b):
    spec = TestSpec(p0, min(p0 + gap, 0.95), 0.1, 0.1)
    _check_table_agrees(spec, TunedParams(a, b), 60)


def test_table_matches_step_along_paths(fig1):
    spec, params, table, _ = fig1
    rng = np.random.default_rng(5)
    for _ in range(200):
        state = DetectorState()
        while not state.decided:
            state = step(state, int(rng.random() < 0.5), params, spec)
            assert table.decision(state.n, state.s) == state.decision


def test_scanner_wins_ties():
    # thresholds so loose that both conditions hold at p_hat between p0 and p1
    spec = TestSpec(0.4, 0.6, 0.1, 0.1)
    params = TunedParams(0.99, 0.99, 1.0)
    assert classify(10, 5, params, spec) == SCANNER
