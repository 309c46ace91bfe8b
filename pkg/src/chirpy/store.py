"""External state table and append-only conversation log.

Turn handling is stateless: everything a turn needs is fetched from the
store at the start and written back at the end. Writes carry the new
turn number and are rejected unless it is exactly previous + 1 (or 0 for
a fresh session), which both serializes a session's turns and surfaces
duplicate or replayed requests.

The default backend is a single SQLite file; the interface is small
enough that a networked table can stand in behind it.
"""

from __future__ import annotations

import json
import sqlite3
import threading
from dataclasses import dataclass, field, replace
from pathlib import Path

from .pipeline.types import Annotations
from .tracker import EntityTrackerState


class StaleWriteError(Exception):
    """Write with a non-successor turn number: duplicate or ordering bug."""


@dataclass(frozen=True)
class SessionRecord:
    session_id: str
    turn_number: int = 0
    history: tuple[tuple[str, str], ...] = ()
    tracker: EntityTrackerState = field(default_factory=EntityTrackerState)
    rg_states: dict = field(default_factory=dict)
    annotations_last: dict = field(default_factory=dict)
    ended: bool = False
    last_responding_rg: str | None = None
    last_prompting_rg: str | None = None
    profile: dict = field(default_factory=dict)
    config_overrides: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.session_id:
            raise ValueError("session_id must be non-empty")
        if self.turn_number != len(self.history):
            raise ValueError("turn_number must equal history length")

    def advanced(
        self,
        user_utterance: str,
        bot_utterance: str,
        tracker: EntityTrackerState,
        rg_states: dict,
        annotations: Annotations | None,
        ended: bool = False,
        responding_rg: str | None = None,
        prompting_rg: str | None = None,
        profile: dict | None = None,
    ) -> "SessionRecord":
        from .manager import summarize_annotations

        return replace(
            self,
            turn_number=self.turn_number + 1,
            history=self.history + ((user_utterance, bot_utterance),),
            tracker=tracker,
            rg_states=rg_states,
            annotations_last=summarize_annotations(annotations) if annotations else {},
            ended=ended,
            last_responding_rg=responding_rg,
            last_prompting_rg=prompting_rg,
            profile=profile if profile is not None else dict(self.profile),
        )

    def to_json(self) -> str:
        return json.dumps({
            "session_id": self.session_id,
            "turn_number": self.turn_number,
            "history": [list(pair) for pair in self.history],
            "tracker": self.tracker.to_dict(),
            "rg_states": self.rg_states,
            "annotations_last": self.annotations_last,
            "ended": self.ended,
            "last_responding_rg": self.last_responding_rg,
            "last_prompting_rg": self.last_prompting_rg,
            "profile": self.profile,
            "config_overrides": self.config_overrides,
        }, ensure_ascii=False)

    @classmethod
    def from_json(cls, text: str) -> "SessionRecord":
        data = json.loads(text)
        return cls(
            session_id=data["session_id"],
            turn_number=data["turn_number"],
            history=tuple((u, b) for u, b in data["history"]),
            tracker=EntityTrackerState.from_dict(data["tracker"]),
            rg_states=data["rg_states"],
            annotations_last=data["annotations_last"],
            ended=data["ended"],
            last_responding_rg=data.get("last_responding_rg"),
            last_prompting_rg=data.get("last_prompting_rg"),
            profile=data.get("profile", {}),
            config_overrides=data.get("config_overrides", {}),
        )


class StateStore:
    """SQLite-backed session table with optimistic turn-number checks."""

    def __init__(self, path: str | Path = ":memory:"):
        self.path = str(path)
        self._lock = threading.Lock()
        self._conn = sqlite3.connect(self.path, check_same_thread=False)
        if self.path != ":memory:":
            self._conn.execute("PRAGMA journal_mode=WAL")
        self._conn.execute(
            "CREATE TABLE IF NOT EXISTS sessions ("
            " session_id TEXT PRIMARY KEY,"
            " turn_number INTEGER NOT NULL,"
            " record TEXT NOT NULL)"
        )
        self._conn.commit()

    def fetch(self, session_id: str) -> SessionRecord | None:
        with self._lock:
            row = self._conn.execute(
                "SELECT record FROM sessions WHERE session_id = ?", (session_id,)
            ).fetchone()
        return SessionRecord.from_json(row[0]) if row else None

    def write(self, record: SessionRecord) -> None:
        """Durable before return; rejects stale or out-of-order writes."""
        with self._lock, self._conn:
            row = self._conn.execute(
                "SELECT turn_number FROM sessions WHERE session_id = ?",
                (record.session_id,),
            ).fetchone()
            if row is None:
                if record.turn_number not in (0, 1):
                    raise StaleWriteError(
                        f"first write for {record.session_id} must be turn 0 or 1, "
                        f"got {record.turn_number}"
                    )
            elif record.turn_number != row[0] + 1:
                raise StaleWriteError(
                    f"session {record.session_id}: expected turn {row[0] + 1}, "
                    f"got {record.turn_number}"
                )
            self._conn.execute(
                "INSERT INTO sessions (session_id, turn_number, record) VALUES (?, ?, ?) "
                "ON CONFLICT(session_id) DO UPDATE SET turn_number = excluded.turn_number, "
                "record = excluded.record",
                (record.session_id, record.turn_number, record.to_json()),
            )

    def close(self) -> None:
        with self._lock:
            self._conn.close()


class ConversationLog:
    """One JSON object per line per turn; append-only."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()

    def append(self, entry: dict) -> None:
        line = json.dumps(entry, ensure_ascii=False)
        with self._lock:
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(line + "\n")

    def read_all(self) -> list[dict]:
        if not self.path.exists():
            return []
        entries = []
        with open(self.path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    entries.append(json.loads(line))
        return entries

    def read_session(self, session_id: str) -> list[dict]:
        return [e for e in self.read_all() if e.get("session_id") == session_id]


def make_log_entry(session_id: str, user: str, bot: str, debug) -> dict:
    return {
        "session_id": session_id,
        "turn_number": debug.turn_number,
        "user_utterance": user,
        "bot_utterance": bot,
        "debug": debug.to_dict(),
        "timings_ms": debug.timings_ms,
    }


@dataclass(frozen=True)
class EngagementMetrics:
    turns: int
    distinct_entities: int
    avg_user_utterance_chars: float
    avg_bot_utterance_chars: float

    def to_dict(self) -> dict:
        return {
            "turns": self.turns,
            "distinct_entities": self.distinct_entities,
            "avg_user_utterance_chars": round(self.avg_user_utterance_chars, 3),
            "avg_bot_utterance_chars": round(self.avg_bot_utterance_chars, 3),
        }


def compute_metrics(entries: list[dict]) -> EngagementMetrics:
    """Engagement metrics for one conversation's log entries.

    Entity distinctness counts entities that ever became current via a
    tracker set transition (any phase), not raw linker mentions.
    """
    if not entries:
        return EngagementMetrics(0, 0, 0.0, 0.0)
    entries = sorted(entries, key=lambda e: e["turn_number"])
    entities = set()
    for entry in entries:
        for transition in entry.get("debug", {}).get("tracker_transitions", []):
            after = transition.get("after")
            if after is not None and after != transition.get("before"):
                entities.add(after)
    users = [e.get("user_utterance", "") for e in entries]
    bots = [e.get("bot_utterance", "") for e in entries]
    return EngagementMetrics(
        turns=len(entries),
        distinct_entities=len(entities),
        avg_user_utterance_chars=sum(map(len, users)) / len(users),
        avg_bot_utterance_chars=sum(map(len, bots)) / len(bots),
    )
