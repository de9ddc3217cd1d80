"""Acceptance criteria, one test per criterion.

Run with `pytest -s tests/test_acceptance.py` to see one pass/fail line
per criterion including elapsed time.
"""

import json
import math

import time
from contextlib import contextmanager

import numpy as np
import pytest
from fastapi.testclient import TestClient

from stepgate import (
    CheckKind,
    CheckSpec,
    Project,
    StepDescriptor,
    StepKind,
    StepState,
    canonical_run_dict,
    load_store,
    save_store,
)
from stepgate.backend import (
    TrainConfig,
    finite_diff_grad,
    init_params,
    loss_and_grad,
    make_blobs,
    max_rel_error,
    train,
    weight_l2_norm,
)
from stepgate.cli import main
from stepgate.recipe import (
    analyze_data_step,
    check_loss_on_init_executor,
    check_loss_on_init_step,
    default_registry,
    executor_for,
    full_training_executor,
    overfit_one_batch_executor,
    overfit_one_batch_step,
    regularize_executor,
    regularize_step,
)
from stepgate.server import create_app
from stepgate.store import RunStore


@contextmanager
def criterion(number: int, description: str):
    start = time.perf_counter()
    try:
        yield
    except Exception:
        print(f"\n[FAIL] criterion {number}: {description}")
        raise
    print(f"\n[PASS] criterion {number}: {description} ({time.perf_counter() - start:.2f}s)")


def snapshot(root):
    return {str(p.relative_to(root)): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


@pytest.fixture(scope="module")
def passed_store(tmp_path_factory):
    """A default five-step project with every step Passed."""
    store = tmp_path_factory.mktemp("acc") / "runstore"
    assert main(["init", "demo", "--store", str(store)]) == 0
    assert main(["run", "--store", str(store)]) == 0
    return store


def test_criterion_1_init_loss_identity(tmp_path):
    with criterion(1, "init loss equals ln C within 1e-6 for C in {2,3,10} across 5 data seeds, < 1s"):
        start = time.perf_counter()
        for C in (2, 3, 10):
            losses = []
            for i, data_seed in enumerate((1, 2, 3, 4, 5)):
                step = check_loss_on_init_step(
                    name=f"init_c{C}_s{i}",
                    config={"n_classes": C, "n_per_class": 10, "data_seed": data_seed},
                )
                with Project.create(f"p{C}{i}", tmp_path / f"s{C}{i}", default_registry(), steps=[step]) as p:
                    record = p.run_step(step.name, check_loss_on_init_executor())
                assert record.final_state is StepState.PASSED
                value = record.metrics["validation/cross_entropy"]
                assert abs(value - math.log(C)) <= 1e-6, (C, data_seed, value)
                losses.append(value)
            assert max(losses) - min(losses) <= 1e-12  # data-seed independence
        assert time.perf_counter() - start < 1.0


def test_criterion_2_overfit_one_batch(tmp_path):
    with criterion(2, "separable fixture overfits to <= 1e-2 in 2000 iters; contradictory pair floors at ln 2, < 5s"):
        start = time.perf_counter()
        separable = {"n_per_class": 50, "n_features": 2, "n_classes": 2, "spread": 0.1,
                     "center_scale": 2.0, "data_seed": 7,
                     "lr": 0.5, "max_iters": 2000, "batch_size": 16, "hidden_width": 16}
        with Project.create("ovf", tmp_path / "ovf", default_registry(),
                            steps=[overfit_one_batch_step(config=separable)]) as p:
            record = p.run_step("overfit_one_batch", overfit_one_batch_executor())
        assert record.final_state is StepState.PASSED
        assert record.metrics["train/cross_entropy"] <= 1e-2

        from stepgate.backend import DatasetSplit, FixedDataModule
        X = np.array([[1.0, 0.5], [1.0, 0.5]])
        pair = DatasetSplit(X, np.array([0, 1]), n_classes=2)
        contradictory = overfit_one_batch_step(
            name="overfit_contradictory",
            config={"batch_size": 2, "lr": 0.5, "max_iters": 2000, "hidden_width": 8, "n_classes": 2},
        )
        with Project.create("ovc", tmp_path / "ovc", default_registry(), steps=[contradictory]) as p:
            record = p.run_step("overfit_contradictory",
                                overfit_one_batch_executor(FixedDataModule(pair, pair)))
        assert record.final_state is StepState.FAILED
        final = record.metrics["train/cross_entropy"]
        assert final >= math.log(2) - 1e-12  # provable floor
        assert final > 1e-2  # and therefore the check fails
        assert time.perf_counter() - start < 5.0


def test_criterion_3_gradient_oracle():
    with criterion(3, "analytic gradients match central differences (h=1e-5) to 1e-4 on 100 networks, < 10s"):
        start = time.perf_counter()
        from stepgate.backend import Rng
        worst = 0.0
        for seed in range(100):
            rng = Rng(seed)
            d = 1 + rng.next_u64() % 5
            h = rng.next_u64() % 5
            C = 2 + rng.next_u64() % 4
            n = 1 + rng.next_u64() % 6
            p = init_params(d, h, C, scheme="uniform", seed=seed, scale=1.0)
            X = rng.gaussians((n, d))
            y = np.array([rng.next_u64() % C for _ in range(n)], dtype=np.int64)
            l2 = [0.0, 0.01, 0.1][seed % 3]
            _, analytic = loss_and_grad(p, X, y, l2)
            numeric = finite_diff_grad(p, X, y, l2, h_step=1e-5)
            worst = max(worst, max_rel_error(analytic, numeric))
        assert worst <= 1e-4, f"worst relative error {worst}"
        assert time.perf_counter() - start < 10.0


def test_criterion_4_gating_semantics(tmp_path, capsys):
    with criterion(4, "rigged step 2 halts run_until after steps 1-2; step 3 NotStarted; CLI exits 1"):
        store = tmp_path / "runstore"
        steps = [
            analyze_data_step(),
            StepDescriptor(
                name="check_loss_on_init",
                kind=StepKind.CHECK_LOSS_ON_INIT,
                checks=(CheckSpec(CheckKind.GREATER_THAN, "validation/accuracy", value=2.0),),
                config=dict(check_loss_on_init_step().config),
            ),
            overfit_one_batch_step(config={"max_iters": 5}),
        ]
        Project.create("rigged", store, default_registry(), steps=steps).close()

        exit_code = main(["run", "--store", str(store)])
        capsys.readouterr()
        assert exit_code == 1

        with Project.load(store) as project:
            states = project.step_states()
            assert states["analyze_data"] is StepState.PASSED
            assert states["check_loss_on_init"] is StepState.FAILED
            assert states["overfit_one_batch"] is StepState.NOT_STARTED
            assert len(project.store.runs_for_step("analyze_data")) == 1
            assert len(project.store.runs_for_step("check_loss_on_init")) == 1
            assert len(project.store.runs_for_step("overfit_one_batch")) == 0


def test_criterion_5_staleness(passed_store, capsys):
    with criterion(5, "mutating one watched source flips exactly that step; verify reports; re-run restores"):
        store = passed_store
        with Project.load(store) as project:
            assert all(s is StepState.PASSED for s in project.step_states().values())

        watched = store / "watched/regularize.txt"
        watched.write_text(watched.read_text() + "\n# tuned lambda\n")

        with Project.load(store) as project:
            states = project.step_states()
            assert states["regularize"] is StepState.STALE
            others = {n: s for n, s in states.items() if n != "regularize"}
            assert all(s is StepState.PASSED for s in others.values())
            # idempotent: recomputing the overlay changes nothing
            assert project.step_states() == states
            from stepgate.staleness import apply_staleness
            once = apply_staleness(project.base_states(), project.recorded_fingerprints(),
                                   project.current_fingerprints())
            twice = apply_staleness(once, project.recorded_fingerprints(),
                                    project.current_fingerprints())
            assert once == twice

        assert main(["verify", "--store", str(store)]) == 0
        out = capsys.readouterr().out
        assert "STALE" in out and "regularize" in out

        assert main(["run", "--store", str(store)]) == 0
        out = capsys.readouterr().out
        assert "[PASS] regularize" in out
        assert out.count("[PASS]") == 1  # only the stale step re-ran
        with Project.load(store) as project:
            assert all(s is StepState.PASSED for s in project.step_states().values())


def test_criterion_6_determinism_and_round_trip(tmp_path, capsys):
    with criterion(6, "identical seeds give canonically byte-identical records; load(save(store)) identical"):
        stores = []
        for tag in ("a", "b"):
            store = tmp_path / f"runstore_{tag}"
            assert main(["init", "demo", "--store", str(store)]) == 0
            assert main(["run", "--seed", "0", "--store", str(store)]) == 0
            stores.append(store)
        capsys.readouterr()

        manifest_a, records_a = load_store(stores[0])
        manifest_b, records_b = load_store(stores[1])
        assert [r.step_name for r in records_a] == [r.step_name for r in records_b]
        for ra, rb in zip(records_a, records_b):
            ca = json.dumps(canonical_run_dict(ra), sort_keys=True).encode()
            cb = json.dumps(canonical_run_dict(rb), sort_keys=True).encode()
            assert ca == cb, f"records differ for {ra.step_name}"

        # load(save(store)): re-serializing everything loaded reproduces the bytes
        before = snapshot(stores[0])
        manifest, records = load_store(stores[0])
        assert manifest == manifest_a
        assert records == records_a
        save_store(manifest)
        rs = RunStore(stores[0])
        for record in records:
            rs.write_run(record)
        assert snapshot(stores[0]) == before

        reloaded_manifest, reloaded_records = load_store(stores[0])
        assert reloaded_manifest == manifest
        assert reloaded_records == records


def test_criterion_7_regularization_property(tmp_path):
    with criterion(7, "weight norm non-increasing in l2; regularize gap check passes vs l2=0 baseline"):
        train_split, _ = make_blobs(16, 2, 3, 1.5, 3.0, seed=11)
        norms = []
        for l2 in (0.0, 0.01, 0.1):
            cfg = TrainConfig(lr=0.3, max_iters=1500, batch_size=16, l2=l2, seed=0, hidden_width=32)
            final, _ = train(init_params(2, 32, 3, seed=0), train_split, cfg)
            norms.append(weight_l2_norm(final))
        assert norms[0] >= norms[1] >= norms[2]
        assert norms[2] < norms[0]

        noisy = {"n_per_class": 16, "n_features": 2, "n_classes": 3, "spread": 1.5,
                 "center_scale": 3.0, "data_seed": 11,
                 "lr": 0.3, "max_iters": 1500, "batch_size": 16, "hidden_width": 32, "seed": 0}
        baseline = StepDescriptor(
            name="full_train", kind=StepKind.CUSTOM,
            checks=(CheckSpec(CheckKind.EXISTS, "validation/generalization_gap"),),
            config={**noisy, "l2": 0.0},
        )
        steps = [baseline, regularize_step(baseline_step="full_train", config={**noisy, "l2": 0.01})]
        with Project.create("reg", tmp_path / "reg", default_registry(), steps=steps) as project:
            base = project.run_step("full_train", full_training_executor())
            record = project.run_step("regularize", regularize_executor())
        assert base.final_state is StepState.PASSED
        assert record.final_state is StepState.PASSED
        gap_check = [o for o in record.check_outcomes if "ImprovedOver" in o.check]
        assert gap_check and gap_check[0].passed


def test_criterion_8_read_only_api(passed_store):
    with criterion(8, "API leaves store byte-identical; non-GET is 405; responses match records field-for-field"):
        before = snapshot(passed_store)
        with TestClient(create_app(passed_store), raise_server_exceptions=False) as client:
            project = client.get("/api/project")
            assert project.status_code == 200

            steps = client.get("/api/steps").json()["steps"]
            assert len(steps) == 5
            run_ids = []
            for view in steps:
                runs = client.get(f"/api/steps/{view['name']}/runs")
                assert runs.status_code == 200
                payload = runs.json()["runs"]
                assert payload, view["name"]
                run_ids.append(payload[0]["run_id"])
                # field-for-field against the stored record file
                stored = json.loads(
                    (passed_store / f"steps/{view['name']}/runs/{payload[0]['run_id']}.json").read_text()
                )
                assert payload[0] == stored
                single = client.get(f"/api/runs/{payload[0]['run_id']}")
                assert single.json()["run"] == stored

            compare = client.get(
                f"/api/compare?metric=validation/accuracy&runs={','.join(run_ids)}"
            )
            assert compare.status_code == 200
            pairs = compare.json()["pairs"]
            values = [v for _, v in pairs]
            assert values == sorted(values, reverse=True)  # best-first (HigherIsBetter)

            for method, url in (("post", "/api/steps"), ("put", "/api/project"),
                                ("delete", "/api/runs/x"), ("patch", "/")):
                response = getattr(client, method)(url)
                assert response.status_code == 405, (method, url)

            assert client.get("/api/steps/ghost/runs").status_code == 404
            assert client.get("/api/runs/ghost").status_code == 404
            assert client.get("/api/compare?metric=train/ghost&runs=").status_code == 404

        assert snapshot(passed_store) == before
