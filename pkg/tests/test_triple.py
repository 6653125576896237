import pytest

from seqscan.errors import DecidedStateError
from seqscan.oc_eval import brute_force_oc, evaluate
from seqscan.stats_core import TunedParams
from seqscan.triple import (
    H0, H2, TripleSpec, TripleState, bands, compose_plan, regions_to_csv, triple_risk_curve,
    triple_step,
)


def test_spec_validation():
    with pytest.raises(ValueError):
        TripleSpec.symmetric(1 / 3, 2 / 3, 0.2, 0.1)  # zones overlap
    spec = TripleSpec.symmetric(1 / 3, 2 / 3, 1 / 9, 0.1)
    assert spec.zone(0.3) == "indifference" and spec.zone(0.1) == "H0"
    assert spec.zone(0.5) == "H1" and spec.zone(0.9) == "H2"


def test_worked_plan_partition(triple_worked):
    spec, plan, diag = triple_worked
    assert plan.continue_cells(plan.horizon) == 0
    assert diag.conflict_cells == 0
    assert diag.delta1_used == 0.05 and diag.fallbacks == 1 and len(diag.notes) == 1
    assert regions_to_csv(plan).splitlines()[0] == "n,s,label"


def test_degenerate_streams(triple_worked):
    _, plan, _ = triple_worked
    for outcome, expect in ((0, H0), (1, H2)):
        st = TripleState()
        while not st.decided:
            st = triple_step(st, outcome, plan)
        assert st.decision == expect and st.n <= plan.horizon
    with pytest.raises(DecidedStateError):
        triple_step(st, 0, plan)


def test_indifference_points_flagged(triple_worked):
    spec, plan, _ = triple_worked
    pts = triple_risk_curve(plan, spec, [0.3, 0.05, 0.02])
    assert pts[0].zone == "indifference"
    assert pts[2].risk <= pts[1].risk


def test_bands_contiguous_at_every_row(triple_worked):
    _, plan, _ = triple_worked
    order = {"scanner": 0, "marginal": 1, "benign": 2}
    for n in range(1, plan.horizon + 1):
        labels = [b[0] for b in bands(plan, n) if b[0] != "continue"]
        assert len(labels) == len(set(labels))
        assert [order[x] for x in labels] == sorted(order[x] for x in labels)


@pytest.mark.parametrize("p", [0.05, 0.3, 0.5, 0.7, 0.95])
def test_small_triple_matches_brute_force(p):
    spec = TripleSpec.symmetric(0.25, 0.75, 0.15, 0.2)
    plan, _ = compose_plan(spec, TunedParams(0.5, 0.5), TunedParams(0.5, 0.5))
    assert plan.horizon <= 14
    a, b = evaluate(plan, p), brute_force_oc(plan, p)
    assert a.total_mass() == pytest.approx(1.0, abs=1e-12)
    for k in a.accept_prob:
        assert a.accept_prob[k] == pytest.approx(b.accept_prob[k], abs=1e-12)
