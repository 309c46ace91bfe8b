"""Scripted-conversation replay: drive the engine with fixture turns and
diff the results against per-turn expectations."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .config import load_config
from .engine import Engine


@dataclass
class TurnReport:
    turn_number: int
    user_utterance: str
    bot_utterance: str
    responding_rg: str | None
    prompting_rg: str | None
    prompt_priority: str | None
    entity: str | None
    ended: bool
    mismatches: list[str] = field(default_factory=list)


@dataclass
class ReplayReport:
    session_id: str
    seed: int | None
    turns: list[TurnReport] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(not t.mismatches for t in self.turns)

    @property
    def failures(self) -> list[TurnReport]:
        return [t for t in self.turns if t.mismatches]


class FixtureError(Exception):
    pass


def load_fixture(path: str | Path) -> dict:
    try:
        fixture = yaml.safe_load(Path(path).read_text())
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line = mark.line + 1 if mark else "?"
        raise FixtureError(f"{path}: parse error at line {line}") from exc
    if not isinstance(fixture, dict) or "turns" not in fixture:
        raise FixtureError(f"{path}: fixture must be a mapping with a 'turns' list")
    for i, turn in enumerate(fixture["turns"]):
        if "user" not in turn:
            raise FixtureError(f"{path}: turn {i + 1} lacks a 'user' utterance")
    return fixture


def _check(report: TurnReport, turn_spec: dict) -> None:
    def expect(key: str, actual):
        if key in turn_spec and turn_spec[key] != actual:
            report.mismatches.append(
                f"{key}: expected {turn_spec[key]!r}, got {actual!r}"
            )

    expect("expect_bot", report.bot_utterance)
    expect("expect_entity", report.entity)
    expect("expect_response_rg", report.responding_rg)
    expect("expect_prompt_rg", report.prompting_rg)
    expect("expect_prompt_priority", report.prompt_priority)
    expect("expect_ended", report.ended)
    contains = turn_spec.get("expect_bot_contains")
    if contains and contains not in report.bot_utterance:
        report.mismatches.append(
            f"expect_bot_contains: {contains!r} not in {report.bot_utterance!r}"
        )


def run_replay(fixture: dict, seed: int | None = None, engine: Engine | None = None) -> ReplayReport:
    """Run the fixture's turns against a fresh engine and diff expectations.

    A seed argument overrides the fixture's seed (controlled divergence
    runs); sampling-dependent expectations may then legitimately fail.
    """
    config = load_config()
    config["store_path"] = ":memory:"
    config["log_path"] = None
    for key, value in (fixture.get("config") or {}).items():
        if isinstance(value, dict) and isinstance(config.get(key), dict):
            config[key].update(value)
        else:
            config[key] = value
    engine = engine or Engine(config)

    effective_seed = fixture.get("seed", 0) if seed is None else seed
    overrides = dict(fixture.get("overrides") or {})
    overrides["seed"] = effective_seed
    session_id = fixture.get("session_id", "replay")

    report = ReplayReport(session_id=session_id, seed=effective_seed)
    for i, turn_spec in enumerate(fixture["turns"]):
        bot, ended, debug = engine.handle_turn(session_id, turn_spec["user"], overrides)
        session = engine.store.fetch(session_id)
        turn_report = TurnReport(
            turn_number=i + 1,
            user_utterance=turn_spec["user"],
            bot_utterance=bot,
            responding_rg=debug.winner_rg,
            prompting_rg=debug.prompt_rg,
            prompt_priority=debug.prompt_priority,
            entity=session.tracker.current if session else None,
            ended=ended,
        )
        _check(turn_report, turn_spec)
        report.turns.append(turn_report)
        if ended:
            break
    return report


def run_replay_file(path: str | Path, seed: int | None = None) -> ReplayReport:
    return run_replay(load_fixture(path), seed=seed)
