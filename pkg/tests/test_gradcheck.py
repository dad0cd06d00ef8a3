"""
gradient 검증 스위트 테스트
"""
import numpy as np
import pandas as pd
import pytest

from app.cli.gradcheck import SUITES, box_instance, run_gradcheck, verify
from app.core.exceptions import VerificationError


@pytest.mark.parametrize("scope,instances", [("losses", 3), ("ta", 2), ("kwconv", 2)])
def test_scope_passes(scope, instances):
    table = run_gradcheck(scope, seed=5, instances=instances)
    assert list(table["op"]) == list(SUITES[scope])
    assert (table["scope"] == scope).all()
    assert table["passed"].all(), table.loc[~table["passed"]].to_dict("records")
    verify(table)


def test_same_op_same_result_across_scopes():
    alone = run_gradcheck("losses", seed=9, instances=2).set_index("op")
    everything = run_gradcheck("all", seed=9, instances=2)
    assert set(everything["scope"]) == {"kwconv", "ta", "losses"}
    merged = everything[everything["scope"] == "losses"].set_index("op")
    pd.testing.assert_series_equal(alone["max_rel_error"], merged["max_rel_error"])


@pytest.mark.parametrize("kwargs", [{"scope": "attention"}, {"instances": 0}])
def test_bad_arguments(kwargs):
    with pytest.raises(ValueError):
        run_gradcheck(**kwargs)


def test_verify_names_failed_ops():
    table = pd.DataFrame(
        [
            {"scope": "losses", "op": "iou_loss", "max_rel_error": 1e-8, "passed": True},
            {"scope": "losses", "op": "piou_loss", "max_rel_error": 0.2, "passed": False},
        ]
    )
    with pytest.raises(VerificationError) as info:
        verify(table)
    assert info.value.details["failed"] == ["piou_loss"]


def test_box_instances_avoid_breakpoints(rng):
    for _ in range(20):
        pred, gt = box_instance(rng)
        assert np.all(pred[:, 2:] > pred[:, :2])
        assert np.min(np.abs(pred - gt)) >= 1e-3
