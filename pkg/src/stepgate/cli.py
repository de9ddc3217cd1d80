"""Command-line entry point.

Exit codes follow the CI contract: 0 when everything requested passed,
1 when any executed check failed, 2 on usage or store errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import recipe
from .core import Project
from .errors import StepgateError
from .project import StepKind, WatchedSource
from .staleness import StepState
from .views import step_views

DEFAULT_STORE = "runstore"
DEFAULT_PORT = 7777


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stepgate",
        description="Staged experiment pipeline with gated checks and a run store.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_init = sub.add_parser("init", help="create a store with the five stock steps")
    p_init.add_argument("name", help="project name")
    p_init.add_argument("--store", default=DEFAULT_STORE, help="store directory (default ./runstore)")

    p_run = sub.add_parser("run", help="execute steps in order, gated by checks")
    p_run.add_argument("--step", help="run exactly this step")
    p_run.add_argument("--to", help="run steps up to and including this one")
    p_run.add_argument("--force", action="store_true",
                       help="bypass gating for a single --step run (tags the record)")
    p_run.add_argument("--seed", type=int, default=None, help="run seed override")
    p_run.add_argument("--store", default=DEFAULT_STORE)

    p_status = sub.add_parser("status", help="print the step table")
    p_status.add_argument("--store", default=DEFAULT_STORE)

    p_verify = sub.add_parser("verify", help="recompute fingerprints and report staleness")
    p_verify.add_argument("--store", default=DEFAULT_STORE)

    p_dash = sub.add_parser("dashboard", help="serve the read-only dashboard")
    p_dash.add_argument("--port", type=int, default=DEFAULT_PORT)
    p_dash.add_argument("--store", default=DEFAULT_STORE)

    return parser


def cmd_init(args) -> int:
    store_root = Path(args.store)
    if (store_root / "project.json").exists():
        print(f"error: store already exists at {store_root}", file=sys.stderr)
        return 2

    watched_dir = store_root / "watched"
    watched_dir.mkdir(parents=True, exist_ok=True)

    def watched_for(step_name: str) -> tuple[WatchedSource, ...]:
        return (WatchedSource(label=f"{step_name}-notes", path=f"watched/{step_name}.txt"),)

    steps = recipe.standard_steps(watched_for=watched_for)
    for step in steps:
        body = (
            f"# Watched notes for step '{step.name}'.\n"
            f"# Editing this file changes the step's fingerprint and marks it stale.\n"
            + json.dumps(dict(step.config), indent=2, sort_keys=True) + "\n"
        )
        (watched_dir / f"{step.name}.txt").write_text(body, encoding="utf-8")

    with Project.create(args.name, store_root, recipe.default_registry(), steps=steps) as project:
        print(f"initialized project {args.name!r} at {store_root} with {len(project.manifest.steps)} steps")
    return 0


def _load(args) -> Project:
    return Project.load(Path(args.store))


def cmd_run(args) -> int:
    if args.force and not args.step:
        print("error: --force applies to a single --step run", file=sys.stderr)
        return 2
    if args.step and args.to:
        print("error: --step and --to are mutually exclusive", file=sys.stderr)
        return 2

    with _load(args) as project:
        if args.step:
            descriptor = project.step(args.step)
            record = project.run_step(args.step, recipe.executor_for(descriptor),
                                      seed=args.seed, force=args.force)
            records = [record]
        else:
            last = args.to or project.manifest.step_names()[-1]
            records = project.run_until(last, recipe.executor_for, seed=args.seed)

        if not records:
            print("nothing to run: requested steps already Passed")
            return 0
        failed = False
        for record in records:
            marker = "PASS" if record.final_state is StepState.PASSED else "FAIL"
            print(f"[{marker}] {record.step_name}  run={record.run_id}")
            for outcome in record.check_outcomes:
                tick = "ok " if outcome.passed else "BAD"
                print(f"       {tick} {outcome.check}: {outcome.message}")
            failed = failed or record.final_state is not StepState.PASSED
        return 1 if failed else 0


def cmd_status(args) -> int:
    with _load(args) as project:
        views = step_views(project)
        print(f"project {project.manifest.name!r} at {project.store.root} ({len(views)} steps)")
        header = f"{'STEP':<22}{'KIND':<18}{'STATE':<12}{'LATEST RUN':<22}CHECKS"
        print(header)
        print("-" * len(header))
        for v in views:
            checks = f"{v.checks_passed}/{v.checks_total}" if v.checks_total else "-"
            print(f"{v.name:<22}{v.kind:<18}{v.state:<12}{v.latest_run_id or '-':<22}{checks}")
    return 0


def cmd_verify(args) -> int:
    with _load(args) as project:
        current = project.current_fingerprints()
        recorded = project.recorded_fingerprints()
        states = project.step_states()
        stale = [n for n, s in states.items() if s is StepState.STALE]
        for name in project.manifest.step_names():
            rec = recorded[name]
            cur = current[name]
            if states[name] is StepState.STALE:
                print(f"{name:<22}STALE     recorded {rec.digest[:12]}  current {cur.digest[:12]}")
            elif rec is None:
                print(f"{name:<22}no runs   current {cur.digest[:12]}")
            else:
                print(f"{name:<22}fresh     digest {cur.digest[:12]}")
        if stale:
            print(f"{len(stale)} step(s) stale: {', '.join(stale)} (re-run to refresh)")
        else:
            print("all fingerprints match their latest runs")
    return 0


def cmd_dashboard(args) -> int:
    import uvicorn

    from .server import create_app

    app = create_app(Path(args.store))
    uvicorn.run(app, host="127.0.0.1", port=args.port, log_level="warning")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse uses its own exit codes; normalize usage errors to 2
        return 2 if exc.code else 0
    handlers = {
        "init": cmd_init,
        "run": cmd_run,
        "status": cmd_status,
        "verify": cmd_verify,
        "dashboard": cmd_dashboard,
    }
    try:
        return handlers[args.command](args)
    except StepgateError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
