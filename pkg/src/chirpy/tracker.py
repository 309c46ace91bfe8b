"""Three-phase current-entity tracking.

Each turn the current entity updates at most three times: after analyzing
the user's utterance, after the chosen response, and after the chosen
prompt. Phase one applies these rules in order and stops at the first
that fires:

1. negative navigational intent rejects the current entity
2. positive navigational intent with a topic promotes the best linker
   candidate inside the topic slot scoring over 1,000
3. a candidate carrying an expected category scoring over 1,000 wins
4. the top candidate wins outright over 10,000
5. otherwise the current entity is unchanged

Rejected or completed topics accumulate in `finished`; rules 3 and 4
never resurrect them, only an explicit user request (rule 2) or an RG
directive can.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from enum import Enum

from .corpus import EntityIndex
from .pipeline.types import Annotations

logger = logging.getLogger(__name__)

LOW_SCORE_THRESHOLD = 1_000
HIGH_SCORE_THRESHOLD = 10_000


class DirectiveAction(Enum):
    SET = "set"
    CLEAR = "clear"
    KEEP = "keep"


@dataclass(frozen=True)
class EntityDirective:
    action: DirectiveAction = DirectiveAction.KEEP
    entity_id: str | None = None

    @classmethod
    def set(cls, entity_id: str) -> "EntityDirective":
        return cls(DirectiveAction.SET, entity_id)

    @classmethod
    def clear(cls) -> "EntityDirective":
        return cls(DirectiveAction.CLEAR)

    @classmethod
    def keep(cls) -> "EntityDirective":
        return cls(DirectiveAction.KEEP)


@dataclass(frozen=True)
class EntityTrackerState:
    current: str | None = None
    finished: frozenset[str] = frozenset()
    expected_types: frozenset[str] = frozenset()
    user_mentioned: tuple[tuple[str, int], ...] = ()  # (entity id, turn number)

    def to_dict(self) -> dict:
        return {
            "current": self.current,
            "finished": sorted(self.finished),
            "expected_types": sorted(self.expected_types),
            "user_mentioned": [list(pair) for pair in self.user_mentioned],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "EntityTrackerState":
        return cls(
            current=data.get("current"),
            finished=frozenset(data.get("finished", ())),
            expected_types=frozenset(data.get("expected_types", ())),
            user_mentioned=tuple((eid, turn) for eid, turn in data.get("user_mentioned", ())),
        )


@dataclass(frozen=True)
class PhaseTransition:
    phase: str
    before: str | None
    after: str | None
    rule: str

    def to_dict(self) -> dict:
        return {"phase": self.phase, "before": self.before, "after": self.after, "rule": self.rule}


def _finish(state: EntityTrackerState, entity_id: str | None) -> frozenset[str]:
    if entity_id is None:
        return state.finished
    return state.finished | {entity_id}


def _transition(
    state: EntityTrackerState, new_current: str | None, finish_old: bool
) -> EntityTrackerState:
    finished = state.finished
    if finish_old and state.current is not None and state.current != new_current:
        finished = finished | {state.current}
    if new_current is not None:
        finished = finished - {new_current}  # current must never sit in finished
    return replace(state, current=new_current, finished=finished)


def update_after_user(
    state: EntityTrackerState,
    annotations: Annotations,
    index: EntityIndex,
    turn_number: int = 0,
) -> tuple[EntityTrackerState, PhaseTransition]:
    """Phase 1: apply the ordered user-analysis rules."""
    before = state.current
    candidates = annotations.linker.candidates
    nav = annotations.nav_intent

    mentioned = list(state.user_mentioned)
    seen = {eid for eid, _ in mentioned}
    for c in candidates:
        if c.score > LOW_SCORE_THRESHOLD and c.entity_id not in seen:
            mentioned.append((c.entity_id, turn_number))
            seen.add(c.entity_id)
    state = replace(state, user_mentioned=tuple(mentioned))

    new_state, rule = state, "unchanged"
    fired = False

    if nav.negative and state.current is not None:
        new_state = _transition(state, None, finish_old=True)
        rule = "rejected_by_negative_intent"
        fired = True
        state = new_state  # a same-turn positive topic may still fire below

    if nav.positive and nav.positive_topic:
        topic = nav.positive_topic
        for c in candidates:
            if c.score > LOW_SCORE_THRESHOLD and _span_in_topic(c.span, topic):
                new_state = _transition(state, c.entity_id, finish_old=True)
                rule = "positive_intent_topic"
                fired = True
                break

    if not fired and state.expected_types:
        for c in candidates:
            if c.entity_id in state.finished:
                continue
            entity = index.get(c.entity_id)
            if entity is None:
                continue
            if c.score > LOW_SCORE_THRESHOLD and entity.categories & state.expected_types:
                new_state = _transition(state, c.entity_id, finish_old=True)
                rule = "expected_type"
                fired = True
                break

    if not fired:
        for c in candidates:
            if c.entity_id in state.finished:
                continue  # rejected topics never come back on rule 4 alone
            if c.score > HIGH_SCORE_THRESHOLD:
                new_state = _transition(state, c.entity_id, finish_old=True)
                rule = "high_score"
                fired = True
            break  # only the top-priority surviving candidate is considered

    # expected types are consumed by this phase whether or not they matched
    new_state = replace(new_state, expected_types=frozenset())
    return new_state, PhaseTransition("user", before, new_state.current, rule)


def _span_in_topic(span: str, topic: str) -> bool:
    span_toks, topic_toks = span.split(), topic.split()
    n = len(span_toks)
    return any(topic_toks[i:i + n] == span_toks for i in range(len(topic_toks) - n + 1))


def _apply_directive(
    state: EntityTrackerState,
    directive: EntityDirective,
    index: EntityIndex,
    phase: str,
) -> tuple[EntityTrackerState, PhaseTransition]:
    before = state.current
    if directive.action is DirectiveAction.KEEP:
        return state, PhaseTransition(phase, before, before, "keep")
    if directive.action is DirectiveAction.CLEAR:
        new_state = _transition(state, None, finish_old=True)
        return new_state, PhaseTransition(phase, before, None, "clear")
    if directive.entity_id not in index:
        logger.error("%s directive names unknown entity %r; ignored", phase, directive.entity_id)
        return state, PhaseTransition(phase, before, before, "set_unknown_ignored")
    new_state = _transition(state, directive.entity_id, finish_old=True)
    return new_state, PhaseTransition(phase, before, new_state.current, "set")


def update_after_response(
    state: EntityTrackerState, directive: EntityDirective, index: EntityIndex
) -> tuple[EntityTrackerState, PhaseTransition]:
    """Phase 2: the priority-ranked winner's entity directive."""
    return _apply_directive(state, directive, index, "response")


def update_after_prompt(
    state: EntityTrackerState, directive: EntityDirective, index: EntityIndex
) -> tuple[EntityTrackerState, PhaseTransition]:
    """Phase 3: the sampled prompt's entity directive."""
    return _apply_directive(state, directive, index, "prompt")
