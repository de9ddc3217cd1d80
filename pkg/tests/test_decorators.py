import numpy as np
import pytest

from stepgate.backend import DatasetSplit, TrainConfig, init_params, train
from stepgate.decorators import BatchSaver, Decorator, MetricSink, Timer, apply_decorators, wrap_stage
from stepgate.backend.train import StageInputs, StageOutputs
from stepgate.errors import DuplicateMetric


def eight_sample_split():
    return DatasetSplit(np.arange(16, dtype=float).reshape(8, 2),
                        np.array([0, 1] * 4), n_classes=2)


class Recorder(Decorator):
    def __init__(self, name, log):
        self.name = name
        self.log = log

    def before(self, inputs):
        self.log.append(f"{self.name}.before")

    def after(self, inputs, outputs):
        self.log.append(f"{self.name}.after")


def dummy_inputs():
    return StageInputs(iteration=0, batch_index=0,
                       features=np.zeros((1, 2)), labels=np.array([0]),
                       params=init_params(2, 0, 2, seed=0))


def test_wrap_stage_sequencing():
    log = []

    def stage(inputs):
        log.append("stage")
        return StageOutputs(loss=0.0, grads=init_params(2, 0, 2, seed=0))

    wrapped = wrap_stage(stage, Recorder("d", log))
    wrapped(dummy_inputs())
    assert log == ["d.before", "stage", "d.after"]


def test_apply_decorators_outside_in():
    log = []

    def stage(inputs):
        log.append("stage")
        return StageOutputs(loss=0.0, grads=init_params(2, 0, 2, seed=0))

    # first decorator in the list is outermost
    stacked = apply_decorators(stage, [Recorder("outer", log), Recorder("inner", log)])
    stacked(dummy_inputs())
    assert log == ["outer.before", "inner.before", "stage", "inner.after", "outer.after"]


def test_batch_saver_writes_one_csv_per_distinct_batch(tmp_path):
    # 8 samples, batch size 4, 1 epoch -> exactly 2 CSV files
    split = eight_sample_split()
    saver = BatchSaver(tmp_path / "batches")
    train(init_params(2, 4, 2, seed=0), split,
          TrainConfig(lr=0.01, max_iters=2, batch_size=4, seed=1), hooks=[saver])
    files = sorted(p.name for p in (tmp_path / "batches").glob("*.csv"))
    assert files == ["batch_0000.csv", "batch_0001.csv"]
    header = (tmp_path / "batches/batch_0000.csv").read_text().splitlines()[0]
    assert header == "f0,f1,label"


def test_batch_saver_does_not_duplicate_across_epochs(tmp_path):
    split = eight_sample_split()
    saver = BatchSaver(tmp_path / "batches")
    train(init_params(2, 4, 2, seed=0), split,
          TrainConfig(lr=0.01, max_iters=6, batch_size=4, seed=1), hooks=[saver])  # 3 epochs
    assert len(list((tmp_path / "batches").glob("*.csv"))) == 2


def test_timer_records_non_negative_wall_time(tmp_path):
    split = eight_sample_split()
    timer = Timer()
    sink = MetricSink(tmp_path)
    train(init_params(2, 4, 2, seed=0), split,
          TrainConfig(lr=0.01, max_iters=5, batch_size=4, seed=1), hooks=[timer])
    timer.finalize(sink)
    metrics = sink.metrics()
    assert metrics["train/wall_time_seconds"] >= 0.0


def test_identity_decorator_leaves_history_unchanged():
    split = eight_sample_split()
    cfg = TrainConfig(lr=0.05, max_iters=10, batch_size=4, seed=2)
    _, plain = train(init_params(2, 4, 2, seed=2), split, cfg)
    _, decorated = train(init_params(2, 4, 2, seed=2), split, cfg, hooks=[Decorator()])
    assert plain == decorated


def test_sink_is_append_only(tmp_path):
    sink = MetricSink(tmp_path)
    sink.add_metric("train/x", 1.0)
    with pytest.raises(DuplicateMetric):
        sink.add_metric("train/x", 2.0)
    assert sink.metrics() == {"train/x": 1.0}
