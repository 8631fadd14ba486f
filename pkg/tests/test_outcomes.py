import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from opconvex.outcomes import CheckOutcome, CheckSummary, Verdict, classify, worst_of


@pytest.mark.parametrize("margin,verdict", [
    (0.0, Verdict.PASS), (1.0, Verdict.PASS), (-1e-10, Verdict.MARGINAL),
    (-1e-9, Verdict.MARGINAL), (-1.1e-9, Verdict.FAIL), (-0.0159, Verdict.FAIL),
])
def test_classify_band(margin, verdict):
    assert classify(margin, 1.0, 1e-9) is verdict


def test_from_scalar_relation():
    assert CheckOutcome.from_scalar("x", 1.0, 2.0, 1e-9).relation == "LessEqual"
    assert CheckOutcome.from_scalar("x", 2.0, 1.0, 1e-9).relation == "GreaterEqual"
    assert CheckOutcome.from_scalar("x", 1.0, 1.0, 1e-9).relation == "Equal"


@given(st.floats(-10, 10), st.floats(1e-6, 1e6), st.floats(1e-12, 1e-3), st.floats(1.0, 1e6))
def test_tolerance_monotone(margin, scale, tol, factor):
    o = CheckOutcome.from_margins("x", margin, -margin, scale, tol)
    looser = o.reevaluate(tol * factor)
    order = {Verdict.PASS: 0, Verdict.MARGINAL: 1, Verdict.FAIL: 2}
    assert order[looser.verdict] <= order[o.verdict]
    if o.verdict is Verdict.PASS:
        assert looser.verdict is Verdict.PASS


def test_dict_round_trip():
    o = CheckOutcome.from_margins("main", -1e-12, 0.5, 2.0, 1e-9, seed=7,
                                  details={"gap": np.float64(1.5), "n": np.int64(3)})
    data = json.loads(json.dumps(o.to_dict()))
    back = CheckOutcome.from_dict(data)
    assert back.verdict is o.verdict and back.margin == o.margin and back.relation == o.relation
    assert back.details == {"gap": 1.5, "n": 3}


def test_worst_of_prefers_failure():
    a = CheckOutcome.from_margins("a", 0.5, -0.5, 1.0, 1e-9)
    b = CheckOutcome.from_margins("b", -1.0, 1.0, 1.0, 1e-9)
    c = CheckOutcome.from_margins("c", -1e-12, 1.0, 1.0, 1e-9)
    w = worst_of("all", [a, b, c], seed=4)
    assert w.check_id == "all" and w.verdict is Verdict.FAIL and w.margin == -1.0
    assert set(w.details) == {"a", "b", "c"} and w.instance_seed == 4


def test_summary_counts_and_worst():
    s = CheckSummary("x")
    margins = [0.3, -1e-12, 0.0, -5.0, 2.0]
    for i, m in enumerate(margins):
        s.add(CheckOutcome.from_margins("x", m, -m, 1.0, 1e-9, seed=i))
    assert (s.total, s.passed, s.marginal, s.failed) == (5, 3, 1, 1)
    assert s.passed + s.marginal + s.failed == s.total
    assert s.worst_margin == -5.0 and s.worst_seed == 3
    back = CheckSummary.from_dict(json.loads(json.dumps(s.to_dict())))
    assert back.to_dict() == s.to_dict()


def test_summary_fail_outranks_larger_negative_marginal():
    s = CheckSummary("x")
    s.add(CheckOutcome.from_margins("x", -0.5, 0.0, 1e12, 1e-9, seed=1))  # marginal
    s.add(CheckOutcome("x", 2, Verdict.FAIL, 0.0, 0.0, 1e-9, "Incomparable", {}))
    assert s.worst_seed == 2


def test_empty_summary_serializes_nulls():
    d = CheckSummary("x").to_dict()
    assert d["worst_margin"] is None and d["total"] == 0
