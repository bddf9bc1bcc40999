"""Operator command line: serve the API, analyze logs, seed demo corpora.

Exit codes: 0 success, 1 input error, 2 analytics error.
"""

from __future__ import annotations

import json
import random
import sys
from pathlib import Path

import click

from .analytics import ReportOptions, build_report, render_text_report
from .analytics.stats import AnalyticsError
from .config import ConfigError, Principal, load_config, load_tokens, write_tokens
from .seeding import DEFAULT_SEED, generate_corpus
from .storage import (
    StorageError,
    import_exercises,
    import_performance,
    read_labels,
    read_log,
)

EXIT_INPUT_ERROR = 1
EXIT_ANALYTICS_ERROR = 2


@click.group()
def main():
    """Guardrailed programming-help service and query-log analytics."""


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path())
@click.option("--host", default=None, help="Override the configured host.")
@click.option("--port", default=None, type=int, help="Override the configured port.")
def serve(config_path: str, host: str | None, port: int | None):
    """Run the HTTP service until interrupted."""
    import uvicorn

    from .service import build_state, create_app

    try:
        config = load_config(config_path)
        tokens = load_tokens(config.tokens_path) if config.tokens_path else {}
        state = build_state(config, tokens)
    except ConfigError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_INPUT_ERROR)
    frontend = Path(__file__).resolve().parents[2] / "frontend" / "dist"
    app = create_app(state, frontend_dir=frontend if frontend.is_dir() else None)
    try:
        uvicorn.run(app, host=host or config.host, port=port or config.port)
    finally:
        state.store.close()


@main.command()
@click.argument("log_path", type=click.Path())
@click.option("--exercises", "exercises_dir", type=click.Path(), default=None)
@click.option("--performance", "performance_path", type=click.Path(), default=None)
@click.option("--labels", "labels_path", type=click.Path(), default=None)
@click.option("--dedup-k", default=0.25, show_default=True)
@click.option("--gap-seconds", default=3600.0, show_default=True)
@click.option("--exclude-user", multiple=True, help="User id to exclude; repeatable.")
@click.option("--auto-exclude-outliers", is_flag=True, default=False)
@click.option("--out", "out_dir", type=click.Path(), default=None,
              help="Directory for report.json and report.txt.")
def analyze(
    log_path: str,
    exercises_dir: str | None,
    performance_path: str | None,
    labels_path: str | None,
    dedup_k: float,
    gap_seconds: float,
    exclude_user: tuple[str, ...],
    auto_exclude_outliers: bool,
    out_dir: str | None,
):
    """Run the full analytics pipeline offline on an exported log."""
    try:
        records = read_log(log_path)
        queries = [r.to_help_request() for r in records]
        labels = read_labels(labels_path) if labels_path else None
        performance = (
            import_performance(performance_path) if performance_path else None
        )
        exercises = None
        if exercises_dir:
            exercises, problems = import_exercises(exercises_dir)
            for problem in problems:
                click.echo(f"warning: exercise skipped: {problem}", err=True)
    except (StorageError, OSError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_INPUT_ERROR)

    options = ReportOptions(
        dedup_k=dedup_k,
        gap_seconds=gap_seconds,
        exclusions=tuple(exclude_user),
        auto_exclude_outliers=auto_exclude_outliers,
    )
    try:
        report = build_report(
            queries,
            labels=labels,
            exercises=exercises,
            performance=performance,
            options=options,
        )
    except AnalyticsError as exc:
        click.echo(f"analytics error: {exc}", err=True)
        sys.exit(EXIT_ANALYTICS_ERROR)

    text = render_text_report(report)
    click.echo(text, nl=False)
    if out_dir:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(
            json.dumps(report, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
        )
        (out / "report.txt").write_text(text, encoding="utf-8")


@main.command()
@click.argument("out_dir", type=click.Path())
@click.option("--users", default=None, type=int, help="User count (custom profile).")
@click.option("--queries", default=None, type=int, help="Raw query count.")
@click.option("--profile", default="table1", show_default=True)
@click.option("--seed", default=DEFAULT_SEED, show_default=True, type=int)
def seed(out_dir: str, users: int | None, queries: int | None, profile: str, seed: int):
    """Generate a synthetic corpus plus its ground-truth manifest."""
    try:
        manifest = generate_corpus(
            out_dir,
            users=users,
            total_queries=queries,
            profile_name=profile,
            seed=seed,
        )
    except ValueError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_INPUT_ERROR)
    click.echo(
        f"seeded {manifest['total_queries']} queries "
        f"({manifest['planted_duplicates']} duplicates) for "
        f"{manifest['users']} users in {out_dir}"
    )


@main.command()
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--student", "students", multiple=True, help="Student user id.")
@click.option("--instructor", "instructors", multiple=True, help="Instructor user id.")
@click.option("--seed", default=None, type=int,
              help="Deterministic token generation (for demos/tests).")
def tokens(out_path: str, students: tuple[str, ...], instructors: tuple[str, ...],
           seed: int | None):
    """Provision bearer tokens for a class roster."""
    if not students and not instructors:
        click.echo("error: provide at least one --student or --instructor", err=True)
        sys.exit(EXIT_INPUT_ERROR)
    rng = random.Random(seed) if seed is not None else random.SystemRandom()
    principals = {}
    for user_id in students:
        principals[f"{rng.getrandbits(96):024x}"] = Principal(user_id, "student")
    for user_id in instructors:
        principals[f"{rng.getrandbits(96):024x}"] = Principal(user_id, "instructor")
    write_tokens(principals, out_path)
    click.echo(f"wrote {len(principals)} tokens to {out_path}")


if __name__ == "__main__":
    main()
