"""Command-line front end: serve the protocol, simulate scripted learners,
replay logs, and report process metrics.

Exit codes: 0 success, 1 data error (corrupt or empty logs, failed replay
verification), 2 usage error.
"""

from __future__ import annotations

import csv
import io
import json

import click

from . import __version__
from .errors import CorruptLog, EmptyLog
from .session import compute_metrics, load_log, replay, validate_log
from .sim import LearnerPolicy, run_sim
from .tracing import TracingParams


def _load_params(path: str | None) -> TracingParams:
    if path is None:
        return TracingParams()
    with open(path, encoding="utf-8") as fh:
        return TracingParams.from_dict(json.load(fh))


@click.group()
@click.version_option(__version__)
def main() -> None:
    """First-layer cube tutoring engine."""


@main.command()
@click.option("--port", type=int, default=8765, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--stdio", is_flag=True, help="Serve one session on stdin/stdout.")
@click.option("--seed", type=int, default=0, show_default=True,
              help="Engine seed for server-drawn task and scramble seeds.")
@click.option("--params-file", type=click.Path(exists=True, dir_okay=False),
              help="JSON file overriding the tracing parameters.")
@click.option("--log-dir", type=click.Path(file_okay=False),
              help="Directory for per-session event logs.")
def serve(port: int, host: str, stdio: bool, seed: int, params_file: str | None,
          log_dir: str | None) -> None:
    """Serve the wire protocol over WebSocket (or stdio with --stdio)."""
    from . import server

    params = _load_params(params_file)
    if stdio:
        log_path = None
        if log_dir:
            import pathlib
            pathlib.Path(log_dir).mkdir(parents=True, exist_ok=True)
            log_path = str(pathlib.Path(log_dir) / "stdio.jsonl")
        server.serve_stdio(params, engine_seed=seed, log_path=log_path)
        return
    if log_dir:
        import pathlib
        pathlib.Path(log_dir).mkdir(parents=True, exist_ok=True)
    try:
        server.serve_websocket(host, port, params, engine_seed=seed, log_dir=log_dir)
    except OSError as err:
        click.echo(f"cannot listen on {host}:{port}: {err}", err=True)
        raise SystemExit(1)


@main.command()
@click.option("--policy", type=click.Choice(["perfect", "noisy", "randomwalk", "hintseeker"]),
              default="perfect", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--p", "p_correct", type=float, default=0.8, show_default=True,
              help="Per-quarter-turn probability of the planned move (noisy).")
@click.option("--hint-level", type=int, default=2, show_default=True,
              help="Hint level requested per task (hintseeker).")
@click.option("--max-attempts", type=int, default=40, show_default=True)
@click.option("--params-file", type=click.Path(exists=True, dir_okay=False))
@click.option("--log", "log_path", type=click.Path(dir_okay=False),
              help="Event log output path (default: <policy>-<seed>.jsonl).")
@click.option("--format", "fmt", type=click.Choice(["table", "csv", "json"]),
              default="table", show_default=True)
def sim(policy: str, seed: int, p_correct: float, hint_level: int,
        max_attempts: int, params_file: str | None, log_path: str | None,
        fmt: str) -> None:
    """Simulate a scripted learner against the full tutoring loop."""
    params = _load_params(params_file)
    log_path = log_path or f"{policy}-{seed}.jsonl"
    result = run_sim(LearnerPolicy(policy, p=p_correct, hint_level=hint_level),
                     seed, max_attempts=max_attempts, params=params,
                     log_path=log_path)
    report = {
        "policy": policy,
        "seed": seed,
        "tasks_served": result.tasks_served,
        "closed_attempts": result.closed_attempts,
        "mastered": result.mastered,
        "skillometer": result.skill_rows,
        "metrics": result.metrics.to_dict(),
        "log": log_path,
    }
    _emit_report(report, fmt)


@main.command("replay")
@click.argument("logfile", type=click.Path(exists=True, dir_okay=False))
def replay_cmd(logfile: str) -> None:
    """Verify that a log replays to byte-identical derived events."""
    try:
        events = load_log(logfile)
        report = replay(events)
    except (CorruptLog, EmptyLog) as err:
        click.echo(f"FAIL: {err}")
        raise SystemExit(1)
    metrics = compute_metrics(events)
    if report.ok:
        click.echo(f"PASS: {report.events_checked} events reproduced byte-identically")
        click.echo(f"preparation cost: {_fmt_cost(metrics.preparation_cost)}")
        return
    click.echo(f"FAIL: first divergence at seq {report.first_divergence}")
    raise SystemExit(1)


@main.command()
@click.argument("logfile", type=click.Path(exists=True, dir_okay=False))
@click.option("--format", "fmt", type=click.Choice(["table", "csv", "json"]),
              default="table", show_default=True)
def metrics(logfile: str, fmt: str) -> None:
    """Process measures for a session log: per-component exercise counts,
    attempt durations, and the preparation cost."""
    try:
        events = load_log(logfile)
        validate_log(events)
        result = compute_metrics(events)
    except (CorruptLog, EmptyLog) as err:
        click.echo(f"error: {err}", err=True)
        raise SystemExit(1)
    _emit_report({"metrics": result.to_dict()}, fmt)


def _fmt_cost(cost: float | None) -> str:
    return "undefined (no exercise time)" if cost is None else f"{cost:.4f}"


def _emit_report(report: dict, fmt: str) -> None:
    if fmt == "json":
        click.echo(json.dumps(report, indent=2, sort_keys=True))
        return
    metrics_dict = report["metrics"]
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["kc", "exercised", "score", "mastered", "attempts"])
        rows = {r["kc"]: r for r in report.get("skillometer", [])}
        for kc, count in metrics_dict["kc_counts"].items():
            row = rows.get(kc, {})
            writer.writerow([kc, count, row.get("score", ""),
                             row.get("mastered", ""), row.get("attempts", "")])
        writer.writerow([])
        writer.writerow(["preparation_cost",
                         "" if metrics_dict["preparation_cost"] is None
                         else metrics_dict["preparation_cost"]])
        click.echo(buf.getvalue().rstrip("\n"))
        return
    for key in ("policy", "seed", "tasks_served", "closed_attempts", "mastered", "log"):
        if key in report:
            click.echo(f"{key:>16}: {report[key]}")
    if "skillometer" in report:
        click.echo(f"{'component':>16}  {'score':>5}  {'mastered':>8}  {'attempts':>8}")
        for row in report["skillometer"]:
            click.echo(f"{row['kc']:>16}  {row['score']:>5.2f}  "
                       f"{str(row['mastered']):>8}  {row['attempts']:>8}")
    click.echo(f"{'exercised kcs':>16}: {metrics_dict['distinct_kcs']}")
    counts = " ".join(f"{kc}={n}" for kc, n in metrics_dict["kc_counts"].items() if n)
    click.echo(f"{'exercise counts':>16}: {counts or '(none)'}")
    click.echo(f"{'prep cost':>16}: {_fmt_cost(metrics_dict['preparation_cost'])}")


if __name__ == "__main__":
    main()
