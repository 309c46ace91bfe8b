"""Command-line entry points: serve, repl, replay, metrics, index, turn."""

from __future__ import annotations

import json
import sys
from collections import defaultdict
from pathlib import Path

import click

from .config import load_config
from .corpus import IndexLoadError, load_index, save_index
from .engine import Engine
from .replay import FixtureError, run_replay_file
from .store import ConversationLog, compute_metrics


def _build_config(config_path, sets):
    return load_config(config_path, set_overrides=list(sets))


config_option = click.option(
    "--config", "config_path", type=click.Path(exists=True, dir_okay=False),
    default=None, help="YAML config file.",
)
set_option = click.option(
    "--set", "sets", multiple=True, metavar="KEY.PATH=VALUE",
    help="Override any config key (repeatable).",
)


@click.group()
def main():
    """Open-domain dialogue engine."""


@main.command()
@config_option
@set_option
@click.option("--port", type=int, default=None, help="Listen port.")
@click.option("--host", default=None, help="Bind address.")
def serve(config_path, sets, port, host):
    """Run the HTTP turn service."""
    import uvicorn

    from .service import create_app

    config = _build_config(config_path, sets)
    if port is not None:
        config["server"]["port"] = port
    if host is not None:
        config["server"]["host"] = host
    try:
        engine = Engine(config)
    except (IndexLoadError, FileNotFoundError, ValueError) as exc:
        raise click.ClickException(f"startup failed: {exc}") from exc
    app = create_app(engine)
    uvicorn.run(app, host=config["server"]["host"], port=config["server"]["port"])


@main.command()
@config_option
@set_option
@click.option("--seed", type=int, default=None, help="Fix the sampling seed.")
@click.option("--session-id", default="repl", show_default=True)
def repl(config_path, sets, seed, session_id):
    """Interactive terminal chat. :debug toggles turn details, :quit exits."""
    config = _build_config(config_path, sets)
    engine = Engine(config)
    overrides = {"seed": seed} if seed is not None else {}
    show_debug = False
    click.echo("chirpy repl - :debug toggles details, :quit exits")
    while True:
        try:
            user = click.prompt("you", prompt_suffix="> ")
        except (EOFError, click.Abort):
            break
        if user.strip() == ":quit":
            break
        if user.strip() == ":debug":
            show_debug = not show_debug
            click.echo(f"[debug {'on' if show_debug else 'off'}]")
            continue
        bot, ended, debug = engine.handle_turn(session_id, user, overrides)
        click.echo(f"bot> {bot}")
        if show_debug:
            click.echo(json.dumps(debug.to_dict(), indent=2))
        if ended:
            click.echo("[conversation ended]")
            break
    engine.close()


@main.command()
@click.option("--fixture", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--seed", type=int, default=None,
              help="Override the fixture seed (controlled divergence).")
def replay(fixture, seed):
    """Replay a scripted conversation fixture and diff expectations."""
    try:
        report = run_replay_file(fixture, seed=seed)
    except FixtureError as exc:
        raise click.ClickException(str(exc)) from exc
    for turn in report.turns:
        status = "ok" if not turn.mismatches else "FAIL"
        click.echo(
            f"turn {turn.turn_number:2d} [{status}] "
            f"rg={turn.responding_rg or '-'} prompt={turn.prompting_rg or '-'} "
            f"entity={turn.entity or '-'}"
        )
        for mismatch in turn.mismatches:
            click.echo(f"    {mismatch}")
    if report.seed is not None:
        click.echo(f"seed: {report.seed}")
    if not report.ok:
        click.echo(f"{len(report.failures)} turn(s) diverged", err=True)
        sys.exit(1)
    click.echo(f"all {len(report.turns)} turns matched")


@main.command()
@click.option("--log", "log_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--session-id", default=None, help="Restrict to one conversation.")
def metrics(log_path, session_id):
    """Engagement metrics per conversation from a JSONL log."""
    entries = ConversationLog(log_path).read_all()
    by_session = defaultdict(list)
    for entry in entries:
        by_session[entry.get("session_id", "?")].append(entry)
    sessions = [session_id] if session_id else sorted(by_session)
    header = f"{'session':20} {'turns':>6} {'entities':>9} {'avg user':>9} {'avg bot':>9}"
    click.echo(header)
    for sid in sessions:
        m = compute_metrics(by_session.get(sid, []))
        click.echo(
            f"{sid:20} {m.turns:>6d} {m.distinct_entities:>9d} "
            f"{m.avg_user_utterance_chars:>9.1f} {m.avg_bot_utterance_chars:>9.1f}"
        )


@main.group()
def index():
    """Entity index maintenance."""


@index.command("build")
@click.option("--in", "in_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def index_build(in_path, out_path):
    """Validate entity records and write the canonical index file."""
    try:
        built = load_index(in_path)
    except IndexLoadError as exc:
        raise click.ClickException(str(exc)) from exc
    save_index(built, out_path)
    anchors = sum(len(e.anchortexts) for e in built.entities.values())
    click.echo(
        f"indexed {len(built)} entities, {anchors} anchortexts, "
        f"{len(built.phonetic_postings)} phonetic keys -> {out_path}"
    )


@main.command()
@config_option
@set_option
@click.option("--session-id", required=True)
@click.option("--utterance", required=True)
@click.option("--seed", type=int, default=None)
@click.option("--debug", "show_debug", is_flag=True, default=False)
def turn(config_path, sets, session_id, utterance, seed, show_debug):
    """Run a single turn against the shared store and print the reply."""
    config = _build_config(config_path, sets)
    engine = Engine(config)
    overrides = {"seed": seed} if seed is not None else {}
    bot, ended, debug = engine.handle_turn(session_id, utterance, overrides)
    payload = {"bot_utterance": bot, "conversation_ended": ended}
    if show_debug:
        payload["turn_debug"] = debug.to_dict()
    click.echo(json.dumps(payload, ensure_ascii=False))
    engine.close()


if __name__ == "__main__":
    main()
