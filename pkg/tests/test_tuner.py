import itertools
import math

import pytest

from seqscan.maxobs import bounded_table
from seqscan.oc_eval import evaluate
from seqscan.stats_core import BENIGN, SCANNER, TestSpec, TunedParams
from seqscan.tuner import bisect_zeta, minimax_tune, ratios, risks_at_design_points

WIDE = TestSpec(0.2, 0.8, 0.1, 0.1)


def test_tuned_params_are_sound(narrow_spec, narrow_tuned):
    params, diag = narrow_tuned
    plan = bounded_table(narrow_spec, params).to_plan()
    assert evaluate(plan, 0.1).accept_prob[BENIGN] <= 0.1
    assert evaluate(plan, 0.15).accept_prob[SCANNER] <= 0.1
    assert 1.0 <= diag.R <= diag.Q
    assert params.zeta == 1.0


def test_minimax_improves_on_first_iterate(narrow_tuned):
    _, diag = narrow_tuned
    assert diag.Q < diag.trace[0].Q
    best = list(itertools.accumulate((r.Q for r in diag.trace), min))
    assert best == sorted(best, reverse=True)
    assert diag.Q == best[-1]
    assert diag.to_csv().splitlines()[0] == "k,a,b,zeta_star,A,B,Q"


def test_single_iteration_returns_first_feasible():
    zeta, _ = bisect_zeta(WIDE, 0.1, 0.1)
    params, diag = minimax_tune(WIDE, 1)
    assert params.a == pytest.approx(zeta * 0.1) and params.b == pytest.approx(zeta * 0.1)
    assert len(diag.trace) == 1


@pytest.mark.parametrize("a,b", [(0.1, 0.1), (0.05, 0.2), (0.3, 0.02)])
def test_bisect_definition(a, b):
    zeta, diag = bisect_zeta(WIDE, a, b)
    assert diag.R >= 1.0
    up = zeta * (1 + 1e-5)
    bracket_top = 2.0 ** (math.floor(math.log2(zeta)) + 1)
    top = up * max(a, b) >= 1.0 or up >= bracket_top
    assert top or min(ratios(WIDE, TunedParams(a, b, up))) < 1.0


def test_r_non_increasing_in_zeta():
    rs = [min(ratios(WIDE, TunedParams(0.1, 0.1, z))) for z in (0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 4.0)]
    assert all(x >= y for x, y in zip(rs, rs[1:]))


def test_shrinking_zeta_reduces_risks(narrow_spec):
    base = risks_at_design_points(narrow_spec, TunedParams(0.1, 0.1, 0.96))
    tight = risks_at_design_points(narrow_spec, TunedParams(0.1, 0.1, 0.96e-3))
    assert tight[0] <= base[0] and tight[1] <= base[1]


def test_reference_params_exceed_budget(narrow_spec):
    # the published parameter choice for this config does not meet alpha = beta = 0.1 exactly
    r0, r1 = risks_at_design_points(narrow_spec, TunedParams(0.1, 0.1, 0.96))
    assert r0 == pytest.approx(0.1387, abs=5e-4) and r1 == pytest.approx(0.1808, abs=5e-4)


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        minimax_tune(WIDE, 0)
    with pytest.raises(ValueError):
        bisect_zeta(WIDE, 0.0, 0.1)
