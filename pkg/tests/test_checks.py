import math

import pytest
from hypothesis import given, strategies as st

from stepgate.checks import CheckKind, CheckSpec, evaluate_check, validate_spec_metrics
from stepgate.errors import UnknownMetricInSpec
from stepgate.metrics import Direction, MetricDef, MetricRegistry, MetricStage


REG = MetricRegistry([
    MetricDef("cross_entropy", Direction.LOWER_IS_BETTER, MetricStage.BOTH),
    MetricDef("accuracy", Direction.HIGHER_IS_BETTER, MetricStage.BOTH),
])


class FakeHistory:
    """BaselineLookup backed by a dict of {step: {metric: [(passed, value)]}}."""

    def __init__(self, runs):
        self._runs = runs

    def best_passed_value(self, step_name, metric, direction):
        values = [v for passed, m, v in self._runs.get(step_name, []) if passed and m == metric]
        if not values:
            return None
        return max(values) if direction is Direction.HIGHER_IS_BETTER else min(values)


def test_close_to_ln10_passes():
    spec = CheckSpec(CheckKind.CLOSE_TO, "train/cross_entropy", value=2.302585, tol=1e-3)
    ok, msg = evaluate_check(spec, {"train/cross_entropy": 2.3026}, REG)
    assert ok
    assert "train/cross_entropy" in msg


def test_greater_than_fail_message_names_value():
    spec = CheckSpec(CheckKind.GREATER_THAN, "validation/accuracy", value=0.9)
    ok, msg = evaluate_check(spec, {"validation/accuracy": 0.4}, REG)
    assert not ok
    assert "0.4" in msg and "0.9" in msg


def test_less_than_strict_at_boundary():
    spec = CheckSpec(CheckKind.LESS_THAN, "train/cross_entropy", value=0.5)
    assert evaluate_check(spec, {"train/cross_entropy": 0.5}, REG)[0] is False
    assert evaluate_check(spec, {"train/cross_entropy": 0.49}, REG)[0] is True


def test_greater_than_strict_at_boundary():
    spec = CheckSpec(CheckKind.GREATER_THAN, "validation/accuracy", value=0.9)
    assert evaluate_check(spec, {"validation/accuracy": 0.9}, REG)[0] is False


def test_exists():
    spec = CheckSpec(CheckKind.EXISTS, "validation/accuracy")
    assert evaluate_check(spec, {"validation/accuracy": 0.1}, REG)[0] is True
    ok, msg = evaluate_check(spec, {}, REG)
    assert not ok and "missing" in msg


def test_missing_metric_fails_not_raises():
    spec = CheckSpec(CheckKind.LESS_THAN, "train/cross_entropy", value=1.0)
    ok, msg = evaluate_check(spec, {}, REG)
    assert not ok and "missing" in msg


def test_unknown_metric_in_spec_raises():
    spec = CheckSpec(CheckKind.EXISTS, "train/f1")
    with pytest.raises(UnknownMetricInSpec):
        evaluate_check(spec, {}, REG)
    with pytest.raises(UnknownMetricInSpec):
        validate_spec_metrics([spec], REG)


def test_improved_over_higher_is_better():
    spec = CheckSpec(CheckKind.IMPROVED_OVER, "validation/accuracy", baseline="base")
    history = FakeHistory({"base": [(True, "validation/accuracy", 0.80)]})
    ok, msg = evaluate_check(spec, {"validation/accuracy": 0.85}, REG, history)
    assert ok and "0.8" in msg
    assert evaluate_check(spec, {"validation/accuracy": 0.80}, REG, history)[0] is False  # strict
    assert evaluate_check(spec, {"validation/accuracy": 0.75}, REG, history)[0] is False


def test_improved_over_uses_best_passed_run():
    spec = CheckSpec(CheckKind.IMPROVED_OVER, "validation/accuracy", baseline="base")
    history = FakeHistory({"base": [
        (True, "validation/accuracy", 0.80),
        (True, "validation/accuracy", 0.90),
        (False, "validation/accuracy", 0.99),  # failed runs never count
    ]})
    assert evaluate_check(spec, {"validation/accuracy": 0.85}, REG, history)[0] is False
    assert evaluate_check(spec, {"validation/accuracy": 0.91}, REG, history)[0] is True


def test_improved_over_without_baseline_fails_with_message():
    spec = CheckSpec(CheckKind.IMPROVED_OVER, "validation/accuracy", baseline="missing_step")
    ok, msg = evaluate_check(spec, {"validation/accuracy": 0.85}, REG, FakeHistory({}))
    assert not ok and "missing_step" in msg
    ok, msg = evaluate_check(spec, {"validation/accuracy": 0.85}, REG, None)
    assert not ok


def test_spec_validation():
    with pytest.raises(ValueError):
        CheckSpec(CheckKind.CLOSE_TO, "train/cross_entropy", value=1.0, tol=-1.0)
    with pytest.raises(ValueError):
        CheckSpec(CheckKind.LESS_THAN, "train/cross_entropy")
    with pytest.raises(ValueError):
        CheckSpec(CheckKind.IMPROVED_OVER, "train/cross_entropy")
    with pytest.raises(ValueError):
        CheckSpec(CheckKind.EXISTS, "")


def test_serialization_round_trip():
    spec = CheckSpec(CheckKind.CLOSE_TO, "validation/cross_entropy", value=math.log(3), tol=1e-3)
    assert CheckSpec.from_json_dict(spec.to_json_dict()) == spec
    d = spec.to_json_dict()
    assert set(d) == {"kind", "metric", "value", "tol", "baseline"}


finite = st.floats(allow_nan=False, allow_infinity=False, width=32)


@given(finite, finite)
def test_close_to_zero_tolerance_is_exact_equality(target, observed):
    spec = CheckSpec(CheckKind.CLOSE_TO, "train/cross_entropy", value=target, tol=0.0)
    ok, _ = evaluate_check(spec, {"train/cross_entropy": observed}, REG)
    assert ok == (observed == target)


@given(finite, finite)
def test_improved_over_respects_direction(baseline_value, observed):
    """Negating values AND flipping direction leaves the outcome unchanged."""
    up = MetricRegistry([MetricDef("m", Direction.HIGHER_IS_BETTER, MetricStage.BOTH)])
    down = MetricRegistry([MetricDef("m", Direction.LOWER_IS_BETTER, MetricStage.BOTH)])
    spec = CheckSpec(CheckKind.IMPROVED_OVER, "train/m", baseline="base")
    h_up = FakeHistory({"base": [(True, "train/m", baseline_value)]})
    h_down = FakeHistory({"base": [(True, "train/m", -baseline_value)]})
    ok_up, _ = evaluate_check(spec, {"train/m": observed}, up, h_up)
    ok_down, _ = evaluate_check(spec, {"train/m": -observed}, down, h_down)
    assert ok_up == ok_down


@given(finite, finite, st.floats(min_value=0, max_value=1e6, allow_nan=False))
def test_evaluate_check_is_pure(value, threshold, tol):
    spec = CheckSpec(CheckKind.CLOSE_TO, "train/cross_entropy", value=threshold, tol=tol)
    metrics = {"train/cross_entropy": value}
    assert evaluate_check(spec, metrics, REG) == evaluate_check(spec, metrics, REG)
