"""Response generator contract.

Each generator is a stateless object: per-conversation state rides in the
snapshot (its own opaque dict) and comes back inside the returned
candidate. Only the chosen response's state and the chosen prompt's state
are persisted, so a generator may never rely on mutations performed on a
losing turn; anything it must "remember" regardless of selection has to
be recomputed from the history in the snapshot.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from ..corpus import Entity, EntityIndex
from ..manager import PromptCandidate, ResponseCandidate
from ..pipeline.types import Annotations
from ..tracker import EntityTrackerState


@dataclass(frozen=True)
class TurnSnapshot:
    utterance: str
    annotations: Annotations
    tracker: EntityTrackerState
    turn_number: int
    history: tuple[tuple[str, str], ...] = ()
    rg_state: dict = field(default_factory=dict)
    profile: dict = field(default_factory=dict)
    index: EntityIndex = field(default_factory=lambda: EntityIndex([]))
    rng: random.Random = field(default_factory=random.Random)
    last_responding_rg: str | None = None
    last_prompting_rg: str | None = None
    responding_rg: str | None = None  # set during the prompt phase
    config: dict = field(default_factory=dict)
    phase1_rule: str = "unchanged"

    @property
    def current_entity(self) -> Entity | None:
        if self.tracker.current is None:
            return None
        return self.index.get(self.tracker.current)

    @property
    def last_bot_utterance(self) -> str | None:
        return self.history[-1][1] if self.history else None

    @property
    def last_rg_in_control(self) -> str | None:
        """The prompting generator owns the floor when a prompt was used."""
        return self.last_prompting_rg or self.last_responding_rg

    @property
    def user_name(self) -> str | None:
        return self.profile.get("name")

    @property
    def entity_set_by_user(self) -> bool:
        return self.phase1_rule in ("high_score", "expected_type", "positive_intent_topic")

    def in_control(self, rg_name: str) -> bool:
        return self.last_rg_in_control == rg_name


class ResponseGenerator:
    """Base class; subclasses override get_response and/or get_prompt."""

    name = "?"

    def get_response(self, snapshot: TurnSnapshot) -> ResponseCandidate | None:
        return None

    def get_prompt(self, snapshot: TurnSnapshot) -> PromptCandidate | None:
        return None

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.name!r}>"
