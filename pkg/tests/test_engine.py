"""Gating, run execution, and failure recording."""

import pytest

from stepgate import (
    CheckKind,
    CheckSpec,
    Direction,
    MetricDef,
    MetricRegistry,
    MetricStage,
    Project,
    StepDescriptor,
    StepKind,
    StepState,
    WatchedSource,
    read_events,
)
from stepgate.errors import GateViolation, UnknownMetricInSpec, UnknownStep


def registry():
    return MetricRegistry([
        MetricDef("cross_entropy", Direction.LOWER_IS_BETTER, MetricStage.BOTH),
        MetricDef("accuracy", Direction.HIGHER_IS_BETTER, MetricStage.BOTH),
    ])


def step(name, threshold=1.0, watched_content=None):
    return StepDescriptor(
        name=name,
        kind=StepKind.CUSTOM,
        checks=(CheckSpec(CheckKind.LESS_THAN, "train/cross_entropy", value=threshold),),
        watched_sources=(WatchedSource(label=name, content=watched_content or f"src {name}"),),
    )


def executor_returning(value):
    def run(ctx):
        return {"train/cross_entropy": value}
    return run


@pytest.fixture
def project(tmp_path):
    with Project.create("demo", tmp_path / "store", registry(),
                        steps=[step("one"), step("two"), step("three")]) as p:
        yield p


def test_running_later_step_first_is_gate_violation(project):
    with pytest.raises(GateViolation) as err:
        project.run_step("two", executor_returning(0.1))
    assert "one" in str(err.value)


def test_passing_run_updates_state(project):
    record = project.run_step("one", executor_returning(0.1))
    assert record.final_state is StepState.PASSED
    assert [o.passed for o in record.check_outcomes] == [True]
    assert project.step_states()["one"] is StepState.PASSED


def test_failed_check_marks_step_failed(project):
    record = project.run_step("one", executor_returning(5.0))
    assert record.final_state is StepState.FAILED
    assert project.step_states()["one"] is StepState.FAILED


def test_failed_earlier_step_blocks_later(project):
    project.run_step("one", executor_returning(5.0))
    with pytest.raises(GateViolation):
        project.run_step("two", executor_returning(0.1))


def test_executor_exception_recorded_not_raised(project):
    def blows_up(ctx):
        raise RuntimeError("kaput")

    record = project.run_step("one", blows_up)
    assert record.final_state is StepState.FAILED
    assert record.metrics == {}
    [outcome] = record.check_outcomes
    assert not outcome.passed
    assert "RuntimeError" in outcome.message and "kaput" in outcome.message
    # persisted, too
    assert project.store.latest_run("one").final_state is StepState.FAILED


def test_unknown_metric_from_executor_fails_run(project):
    record = project.run_step("one", lambda ctx: {"train/nonsense": 1.0})
    assert record.final_state is StepState.FAILED
    assert "nonsense" in record.check_outcomes[0].message


def test_non_finite_metric_fails_run(project):
    record = project.run_step("one", lambda ctx: {"train/cross_entropy": float("nan")})
    assert record.final_state is StepState.FAILED


def test_force_bypasses_gate_and_tags_record(project):
    record = project.run_step("three", executor_returning(0.1), force=True)
    assert record.forced is True
    assert record.final_state is StepState.PASSED
    normal = project.run_step("one", executor_returning(0.1))
    assert normal.forced is False


def test_run_until_halts_at_first_failure(project):
    def executor_for(descriptor):
        return executor_returning(5.0 if descriptor.name == "two" else 0.1)

    records = project.run_until("three", executor_for)
    assert [r.step_name for r in records] == ["one", "two"]
    assert [r.final_state for r in records] == [StepState.PASSED, StepState.FAILED]
    assert project.step_states()["three"] is StepState.NOT_STARTED


def test_run_until_all_passing(project):
    records = project.run_until("three", lambda d: executor_returning(0.1))
    assert [r.step_name for r in records] == ["one", "two", "three"]
    assert all(r.final_state is StepState.PASSED for r in records)


def test_run_until_stops_at_requested_step(project):
    records = project.run_until("one", lambda d: executor_returning(0.1))
    assert [r.step_name for r in records] == ["one"]
    states = project.step_states()
    assert states["two"] is StepState.NOT_STARTED and states["three"] is StepState.NOT_STARTED


def test_run_until_skips_already_passed(project):
    project.run_until("three", lambda d: executor_returning(0.1))
    again = project.run_until("three", lambda d: executor_returning(0.1))
    assert again == []


def test_run_until_unknown_step(project):
    with pytest.raises(UnknownStep):
        project.run_until("nope", lambda d: executor_returning(0.1))


def test_run_step_unknown_step(project):
    with pytest.raises(UnknownStep):
        project.run_step("nope", executor_returning(0.1))


def test_stale_step_does_not_satisfy_gate(tmp_path):
    store_root = tmp_path / "store"
    (store_root / "watched").mkdir(parents=True)
    src = store_root / "watched/one.txt"
    src.write_text("v1\n")
    first = StepDescriptor(
        name="one", kind=StepKind.CUSTOM,
        checks=(CheckSpec(CheckKind.LESS_THAN, "train/cross_entropy", value=1.0),),
        watched_sources=(WatchedSource(label="one", path="watched/one.txt"),),
    )
    with Project.create("demo", store_root, registry(), steps=[first, step("two")]) as project:
        project.run_step("one", executor_returning(0.1))
        project.run_step("two", executor_returning(0.1))
        src.write_text("v2\n")
        assert project.step_states()["one"] is StepState.STALE
        with pytest.raises(GateViolation) as err:
            project.run_step("two", executor_returning(0.1))
        assert "Stale" in str(err.value)
        # re-running the stale step itself is allowed and freshens it
        project.run_step("one", executor_returning(0.1))
        assert project.step_states()["one"] is StepState.PASSED
        project.run_step("two", executor_returning(0.1))


def test_run_until_reruns_stale_step_only(tmp_path):
    store_root = tmp_path / "store"
    (store_root / "watched").mkdir(parents=True)
    for n in ("a", "b", "c"):
        (store_root / f"watched/{n}.txt").write_text(f"{n} v1\n")
    steps = [
        StepDescriptor(
            name=n, kind=StepKind.CUSTOM,
            checks=(CheckSpec(CheckKind.LESS_THAN, "train/cross_entropy", value=1.0),),
            watched_sources=(WatchedSource(label=n, path=f"watched/{n}.txt"),),
        )
        for n in ("a", "b", "c")
    ]
    with Project.create("demo", store_root, registry(), steps=steps) as project:
        project.run_until("c", lambda d: executor_returning(0.1))
        (store_root / "watched/b.txt").write_text("b v2\n")
        assert project.step_states() == {"a": StepState.PASSED, "b": StepState.STALE, "c": StepState.PASSED}
        records = project.run_until("c", lambda d: executor_returning(0.1))
        assert [r.step_name for r in records] == ["b"]
        assert all(s is StepState.PASSED for s in project.step_states().values())


def test_check_referencing_unknown_metric_rejected_at_add(tmp_path):
    project = Project.create("demo", tmp_path / "store", registry())
    bad = StepDescriptor(name="x", kind=StepKind.CUSTOM,
                         checks=(CheckSpec(CheckKind.EXISTS, "train/wat"),))
    with pytest.raises(UnknownMetricInSpec):
        project.add_step(bad)


def test_events_logged_per_run(project):
    project.run_step("one", executor_returning(0.1))
    project.close()
    events = read_events(project.store.events_path)
    messages = [(e.message, e.step) for e in events]
    assert ("run started", "one") in messages
    assert ("run finished", "one") in messages
    finished = [e for e in events if e.message == "run finished"][0]
    assert finished.data["final_state"] == "Passed"
    assert finished.run_id


def test_state_is_running_during_execution(project):
    seen = {}

    def peeking(ctx):
        seen["during"] = project.store.read_state("one")
        return {"train/cross_entropy": 0.1}

    project.run_step("one", peeking)
    assert seen["during"] is StepState.RUNNING
    assert project.store.read_state("one") is StepState.PASSED


def test_decorators_bound_and_finalized_by_engine(tmp_path):
    from stepgate.backend import TrainConfig, init_params, make_blobs, train
    from stepgate.decorators import BatchSaver, Timer

    reg = registry()
    reg.register(MetricDef("wall_time_seconds", Direction.LOWER_IS_BETTER, MetricStage.TRAIN))
    descriptor = StepDescriptor(
        name="trainy", kind=StepKind.CUSTOM,
        checks=(CheckSpec(CheckKind.EXISTS, "train/cross_entropy"),),
        watched_sources=(WatchedSource(label="s", content="x"),),
    )

    def training_executor(ctx):
        split, _ = make_blobs(8, 2, 2, 0.5, 2.0, seed=1)
        cfg = TrainConfig(lr=0.1, max_iters=4, batch_size=4, seed=0)
        _, history = train(init_params(2, 4, 2, seed=0), split, cfg, hooks=ctx.decorators)
        return {"train/cross_entropy": history[-1]}

    with Project.create("dec", tmp_path / "store", reg, steps=[descriptor]) as p:
        record = p.run_step("trainy", training_executor, decorators=[Timer(), BatchSaver()])
        assert record.final_state is StepState.PASSED
        # Timer finalized into the run metrics through the sink
        assert record.metrics["train/wall_time_seconds"] >= 0.0
        # BatchSaver bound to the run's artifact dir (16 samples / batch 4 -> 4 files)
        batch_dir = p.store.artifacts_root / record.run_id / "batches"
        assert len(list(batch_dir.glob("*.csv"))) == 4


def test_gating_invariant_across_history(project):
    """No record of step k exists unless earlier steps were Passed at run time."""
    project.run_until("three", lambda d: executor_returning(0.1))
    order = {name: i for i, name in enumerate(project.manifest.step_names())}
    all_records = sorted(project.store.all_runs(), key=lambda r: r.run_id)
    passed_so_far = set()
    for record in all_records:
        k = order[record.step_name]
        earlier = {n for n, i in order.items() if i < k}
        assert earlier <= passed_so_far or record.forced
        if record.final_state is StepState.PASSED:
            passed_so_far.add(record.step_name)
