"""Per-turn orchestration.

One turn runs: annotate -> tracker phase 1 -> response fan-out over all
generators -> deterministic priority ranking -> tracker phase 2 -> prompt
fan-out (when the winner asks for one) -> weighted priority sampling ->
tracker phase 3 -> compose "response prompt". Responses are ranked
deterministically; prompts are sampled because topic changes deserve
variety, with the distribution biased hard toward staying on topic.

All per-turn randomness derives from (seed, session, turn, consumer), so
a turn replays bit-identically from the stored session state alone.
"""

from __future__ import annotations

import logging
import random
import re
import time
from concurrent.futures import ThreadPoolExecutor
from concurrent.futures import TimeoutError as FutureTimeoutError
from dataclasses import dataclass, field, replace
from enum import IntEnum, Enum

from .corpus import EntityIndex
from .pipeline.runner import AnnotatorPipeline
from .pipeline.types import Annotations, PriorTurn
from . import tracker as tracker_mod
from .tracker import EntityDirective, EntityTrackerState, PhaseTransition

logger = logging.getLogger(__name__)


class ResponsePriority(IntEnum):
    """Ordered by descending importance; lower value wins."""

    FORCE_START = 0
    STRONG_CONTINUE = 1
    CAN_START = 2
    WEAK_CONTINUE = 3
    UNIVERSAL_FALLBACK = 4


class PromptPriority(Enum):
    FORCE_START = "force_start"
    CURRENT_TOPIC = "current_topic"
    CONTEXTUAL = "contextual"
    GENERIC = "generic"


SAMPLED_PROMPT_PRIORITIES = (
    PromptPriority.CURRENT_TOPIC,
    PromptPriority.CONTEXTUAL,
    PromptPriority.GENERIC,
)

FALLBACK_RGS = frozenset({"Neural Fallback", "Fallback"})

DEFAULT_TIE_BREAK_ORDER = (
    "Offensive User",
    "Launch",
    "Complaint",
    "Closing Confirmation",
    "Alexa Commands",
    "Red Question",
    "One-Turn Scripted",
    "Movies",
    "Music",
    "Opinion",
    "Wiki",
    "Categories",
    "Neural Chat",
    "Acknowledgment",
    "Neural Fallback",
    "Fallback",
)

DEFAULT_PRIORITY_WEIGHTS = {
    PromptPriority.CURRENT_TOPIC: 0.8,
    PromptPriority.CONTEXTUAL: 0.15,
    PromptPriority.GENERIC: 0.05,
}


@dataclass(frozen=True)
class ResponseCandidate:
    rg: str
    text: str
    priority: ResponsePriority
    needs_prompt: bool = False
    directive: EntityDirective = field(default_factory=EntityDirective.keep)
    new_rg_state: dict = field(default_factory=dict)
    expected_types_next: frozenset[str] = frozenset()
    ends_conversation: bool = False
    new_profile: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.text:
            raise ValueError("response candidate text must be non-empty")
        if (self.priority is ResponsePriority.UNIVERSAL_FALLBACK
                and self.rg not in FALLBACK_RGS):
            raise ValueError(f"{self.rg} may not use UNIVERSAL_FALLBACK")


@dataclass(frozen=True)
class PromptCandidate:
    rg: str
    text: str
    priority: PromptPriority
    directive: EntityDirective = field(default_factory=EntityDirective.keep)
    new_rg_state: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.text:
            raise ValueError("prompt candidate text must be non-empty")


@dataclass
class SamplerConfig:
    priority_weights: dict[PromptPriority, float] = field(
        default_factory=lambda: dict(DEFAULT_PRIORITY_WEIGHTS))
    rg_weights_by_priority: dict[PromptPriority, dict[str, float]] = field(default_factory=dict)
    tie_break_order: tuple[str, ...] = DEFAULT_TIE_BREAK_ORDER
    rng_seed: int | None = None

    def __post_init__(self):
        weights = self.priority_weights
        total = sum(weights.values())
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"priority weights must sum to 1, got {total}")
        if not (weights[PromptPriority.CURRENT_TOPIC]
                > weights[PromptPriority.CONTEXTUAL]
                > weights[PromptPriority.GENERIC]):
            raise ValueError("weights must keep CURRENT_TOPIC > CONTEXTUAL > GENERIC")


def _tie_index(rg: str, tie_break_order: tuple[str, ...]) -> tuple[int, str]:
    try:
        return (tie_break_order.index(rg), rg)
    except ValueError:
        return (len(tie_break_order), rg)


def rank_responses(
    candidates: list[ResponseCandidate],
    tie_break_order: tuple[str, ...] = DEFAULT_TIE_BREAK_ORDER,
) -> ResponseCandidate:
    """Highest priority wins; ties break by the fixed generator ordering.

    Pure in (candidates, tie_break_order): permuting the list never
    changes the winner.
    """
    if not candidates:
        raise ValueError("no response candidates: the Fallback contract was violated")
    return min(candidates, key=lambda c: (c.priority, _tie_index(c.rg, tie_break_order)))


def sample_prompt(
    candidates: list[PromptCandidate],
    config: SamplerConfig,
    rng: random.Random,
) -> PromptCandidate:
    """FORCE_START short-circuits; otherwise sample a priority from the
    renormalized weights over the priorities present, then a generator
    from the per-priority weights (uniform by default)."""
    if not candidates:
        raise ValueError("no prompt candidates: the Fallback contract was violated")

    forced = [c for c in candidates if c.priority is PromptPriority.FORCE_START]
    if forced:
        return min(forced, key=lambda c: _tie_index(c.rg, config.tie_break_order))

    by_priority: dict[PromptPriority, list[PromptCandidate]] = {}
    for c in candidates:
        by_priority.setdefault(c.priority, []).append(c)
    present = [p for p in SAMPLED_PROMPT_PRIORITIES if p in by_priority]
    mass = sum(config.priority_weights[p] for p in present)
    roll = rng.random() * mass
    chosen_priority = present[-1]
    for p in present:
        roll -= config.priority_weights[p]
        if roll < 0:
            chosen_priority = p
            break

    pool = sorted(by_priority[chosen_priority],
                  key=lambda c: _tie_index(c.rg, config.tie_break_order))
    rg_weights = config.rg_weights_by_priority.get(chosen_priority, {})
    weights = [max(0.0, rg_weights.get(c.rg, 1.0)) for c in pool]
    total = sum(weights)
    if total <= 0:
        weights = [1.0] * len(pool)
        total = float(len(pool))
    roll = rng.random() * total
    for candidate, weight in zip(pool, weights):
        roll -= weight
        if roll < 0:
            return candidate
    return pool[-1]


_STOP_PATTERNS = [
    re.compile(p) for p in (
        r"^(?:alexa )?(?:stop|exit|quit|goodbye|good bye|bye|bye bye)$",
        r"\bi (?:want|wanna|would like|'?d like)(?: to)? stop(?: talking| chatting)?$",
        r"^(?:please )?(?:stop|quit) (?:talking|chatting)$",
        r"\b(?:let'?s|lets) stop(?: talking| chatting)?$",
        r"\bend (?:the |this )?(?:conversation|chat)\b",
        r"\bi'?m done (?:talking|chatting)\b",
    )
]


def detect_stop(utterance: str, annotations: Annotations) -> bool:
    """Explicit stop commands only; ambiguous closings are left for the
    Closing Confirmation generator to sort out."""
    text = utterance.strip()
    return any(p.search(text) for p in _STOP_PATTERNS)


GOODBYE_TEXT = "Okay, it was really nice chatting with you. Goodbye!"


@dataclass
class TurnConfig:
    pipeline: AnnotatorPipeline
    sampler: SamplerConfig = field(default_factory=SamplerConfig)
    rg_timeout: float = 1.0
    seed: int = 0
    goodbye_text: str = GOODBYE_TEXT
    collect_debug: bool = True

    @property
    def tie_break_order(self) -> tuple[str, ...]:
        return self.sampler.tie_break_order


def derive_rng(seed: int, session_id: str, turn_number: int, consumer: str) -> random.Random:
    # string seeding hashes via sha512 inside Random, stable across runs
    return random.Random(f"{seed}:{session_id}:{turn_number}:{consumer}")


@dataclass
class TurnDebug:
    turn_number: int
    user_utterance: str
    annotations: dict = field(default_factory=dict)
    response_candidates: list = field(default_factory=list)
    winner_rg: str | None = None
    prompt_candidates: list = field(default_factory=list)
    prompt_rg: str | None = None
    prompt_priority: str | None = None
    tracker_transitions: list = field(default_factory=list)
    timings_ms: dict = field(default_factory=dict)
    conversation_ended: bool = False
    rg_errors: list = field(default_factory=list)
    response_text: str | None = None
    prompt_text: str | None = None

    def to_dict(self) -> dict:
        return {
            "turn_number": self.turn_number,
            "user_utterance": self.user_utterance,
            "annotations": self.annotations,
            "response_candidates": self.response_candidates,
            "winner_rg": self.winner_rg,
            "prompt_candidates": self.prompt_candidates,
            "prompt_rg": self.prompt_rg,
            "prompt_priority": self.prompt_priority,
            "tracker_transitions": self.tracker_transitions,
            "timings_ms": self.timings_ms,
            "conversation_ended": self.conversation_ended,
            "rg_errors": self.rg_errors,
            "response_text": self.response_text,
            "prompt_text": self.prompt_text,
        }


def summarize_annotations(annotations: Annotations) -> dict:
    nav = annotations.nav_intent
    return {
        "nav_intent": {
            "positive": nav.positive,
            "negative": nav.negative,
            "positive_topic": nav.positive_topic,
            "refers_current_topic": nav.refers_current_topic,
        },
        "dialogue_act": annotations.dialogue_act,
        "is_question": annotations.is_question,
        "question_type": annotations.question_type.value,
        "sentiment": annotations.sentiment.value,
        "offense": {
            "offensive": annotations.offense.offensive,
            "critical": annotations.offense.critical,
            "type": annotations.offense.offense_type.value,
        },
        "linker_top": [
            {"span": c.span, "entity": c.entity_id,
             "score": round(c.score, 4), "method": c.method.value}
            for c in annotations.linker.candidates[:5]
        ],
    }


def _describe_directive(directive: EntityDirective) -> str:
    if directive.action is tracker_mod.DirectiveAction.SET:
        return f"set:{directive.entity_id}"
    return directive.action.value


def run_turn(session, user_utterance: str, registry, index: EntityIndex, config: TurnConfig):
    """Execute one full turn against a session record.

    Returns (bot_utterance, new_session, TurnDebug). The session object is
    not mutated; persistence belongs to the caller.
    """
    from .store import SessionRecord  # session type lives with the store

    assert isinstance(session, SessionRecord)
    t_start = time.monotonic()
    turn_number = session.turn_number
    debug = TurnDebug(turn_number=turn_number, user_utterance=user_utterance)

    last_bot = session.history[-1][1] if session.history else None
    prior = PriorTurn(
        last_bot_utterance=last_bot,
        expected_types=session.tracker.expected_types,
    )
    t0 = time.monotonic()
    annotations = config.pipeline.annotate(user_utterance, prior, index)
    debug.timings_ms["annotate"] = round((time.monotonic() - t0) * 1000, 3)
    debug.annotations = summarize_annotations(annotations)

    tracker_state, transition = tracker_mod.update_after_user(
        session.tracker, annotations, index, turn_number
    )
    debug.tracker_transitions.append(transition.to_dict())
    phase1_rule = transition.rule

    if detect_stop(user_utterance, annotations):
        debug.conversation_ended = True
        debug.response_text = config.goodbye_text
        debug.timings_ms["total"] = round((time.monotonic() - t_start) * 1000, 3)
        new_session = session.advanced(
            user_utterance, config.goodbye_text, tracker_state,
            session.rg_states, annotations, ended=True,
        )
        return config.goodbye_text, new_session, debug

    from .rgs.base import TurnSnapshot  # late import avoids a cycle

    def snapshot_for(rg_name: str, phase: str, responding_rg: str | None = None) -> TurnSnapshot:
        return TurnSnapshot(
            utterance=user_utterance,
            annotations=annotations,
            tracker=tracker_state,
            turn_number=turn_number,
            history=tuple(session.history),
            rg_state=dict(session.rg_states.get(rg_name, {})),
            profile=dict(session.profile),
            index=index,
            rng=derive_rng(config.seed, session.session_id, turn_number, f"{phase}:{rg_name}"),
            last_responding_rg=session.last_responding_rg,
            last_prompting_rg=session.last_prompting_rg,
            responding_rg=responding_rg,
            config=session.config_overrides,
            phase1_rule=phase1_rule,
        )

    def fan_out(method_name: str, phase: str, rgs, responding_rg: str | None = None):
        results = []
        with ThreadPoolExecutor(max_workers=max(1, len(rgs))) as pool:
            futures = {
                rg.name: pool.submit(getattr(rg, method_name), snapshot_for(rg.name, phase, responding_rg))
                for rg in rgs
            }
            for name, future in futures.items():
                try:
                    candidate = future.result(timeout=config.rg_timeout)
                except FutureTimeoutError:
                    debug.rg_errors.append({"rg": name, "phase": phase, "error": "timeout"})
                    logger.warning("%s timed out in %s phase", name, phase)
                    continue
                except Exception as exc:
                    debug.rg_errors.append({"rg": name, "phase": phase, "error": repr(exc)})
                    logger.exception("%s failed in %s phase", name, phase)
                    continue
                if candidate is not None:
                    results.append(candidate)
        return results

    t0 = time.monotonic()
    response_candidates = fan_out("get_response", "response", registry)
    debug.timings_ms["response_phase"] = round((time.monotonic() - t0) * 1000, 3)
    debug.response_candidates = [
        {"rg": c.rg, "text": c.text, "priority": c.priority.name,
         "needs_prompt": c.needs_prompt, "directive": _describe_directive(c.directive)}
        for c in sorted(response_candidates,
                        key=lambda c: (c.priority, _tie_index(c.rg, config.tie_break_order)))
    ]

    winner = rank_responses(response_candidates, config.tie_break_order)
    debug.winner_rg = winner.rg
    debug.response_text = winner.text

    tracker_state, transition = tracker_mod.update_after_response(
        tracker_state, winner.directive, index
    )
    debug.tracker_transitions.append(transition.to_dict())
    if winner.expected_types_next:
        tracker_state = replace(tracker_state, expected_types=winner.expected_types_next)

    new_rg_states = dict(session.rg_states)
    new_rg_states[winner.rg] = winner.new_rg_state
    new_profile = dict(session.profile)
    new_profile.update(winner.new_profile)

    prompt = None
    if winner.needs_prompt and not winner.ends_conversation:
        t0 = time.monotonic()
        prompt_rgs = [rg for rg in registry if rg.name != winner.rg]
        prompt_candidates = fan_out("get_prompt", "prompt", prompt_rgs, responding_rg=winner.rg)
        if not prompt_candidates:  # the winner's own prompt is the last resort
            own = [rg for rg in registry if rg.name == winner.rg]
            prompt_candidates = fan_out("get_prompt", "prompt", own, responding_rg=winner.rg)
        debug.timings_ms["prompt_phase"] = round((time.monotonic() - t0) * 1000, 3)
        debug.prompt_candidates = [
            {"rg": c.rg, "text": c.text, "priority": c.priority.name,
             "directive": _describe_directive(c.directive)}
            for c in prompt_candidates
        ]
        if prompt_candidates:
            rng = derive_rng(config.seed, session.session_id, turn_number, "prompt_sampler")
            prompt = sample_prompt(prompt_candidates, config.sampler, rng)
            debug.prompt_rg = prompt.rg
            debug.prompt_priority = prompt.priority.name
            debug.prompt_text = prompt.text
            tracker_state, transition = tracker_mod.update_after_prompt(
                tracker_state, prompt.directive, index
            )
            debug.tracker_transitions.append(transition.to_dict())
            new_rg_states[prompt.rg] = prompt.new_rg_state

    bot_utterance = winner.text if prompt is None else f"{winner.text} {prompt.text}"
    ended = winner.ends_conversation
    debug.conversation_ended = ended
    debug.timings_ms["total"] = round((time.monotonic() - t_start) * 1000, 3)

    new_session = session.advanced(
        user_utterance, bot_utterance, tracker_state, new_rg_states, annotations,
        ended=ended,
        responding_rg=winner.rg,
        prompting_rg=prompt.rg if prompt else None,
        profile=new_profile,
    )
    return bot_utterance, new_session, debug
