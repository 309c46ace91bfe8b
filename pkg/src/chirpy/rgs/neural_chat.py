"""Neural Chat: short empathetic discussions about the user's life.

A discussion opens with a handwritten starter question from one of seven
areas (some conditioned on time of day) and then rides the generator
adapter. Each turn we ask the adapter for a batch of samples and keep a
question-bearing one to hand the user a clear path forward; when fewer
than a third of the samples contain questions we read that as the model
losing confidence, say a non-question, and close the discussion.
"""

from __future__ import annotations

from enum import Enum

from ..manager import (
    PromptCandidate,
    PromptPriority,
    ResponseCandidate,
    ResponsePriority,
)
from ..tracker import EntityDirective
from .adapters import GeneratorAdapter
from .base import ResponseGenerator, TurnSnapshot

BASE_EMOTION_QUESTION = "I hope you don't mind me asking, how are you feeling?"

_POS_BOT = "I wanted to say that I'm feeling pretty positive today!"
_NEG_OTHERS = "I've noticed that a lot of people are feeling kind of down recently."
_NEG_BOT = "I wanted to say that I've been feeling kind of down recently."
_OPTIMISM = "But I think its important to remember that things will get better."


class EmotionStarterStrategy(Enum):
    NO_SHARE = "NO_SHARE"
    POS_OTHERS = "POS_OTHERS"
    POS_BOT = "POS_BOT"
    POS_BOT_STORY = "POS_BOT_STORY"
    NEG_OTHERS = "NEG_OTHERS"
    NEG_BOT = "NEG_BOT"
    NEG_BOT_STORY = "NEG_BOT_STORY"
    NEGOPT_OTHERS = "NEGOPT_OTHERS"
    NEGOPT_BOT = "NEGOPT_BOT"
    NEGOPT_BOT_STORY = "NEGOPT_BOT_STORY"


_EMOTION_PREAMBLES = {
    EmotionStarterStrategy.NO_SHARE: "I wanted to check in with you.",
    EmotionStarterStrategy.POS_OTHERS:
        "I've noticed that a lot of people are feeling pretty positive today!",
    EmotionStarterStrategy.POS_BOT: _POS_BOT,
    EmotionStarterStrategy.POS_BOT_STORY:
        _POS_BOT + " I just went for a walk outside, and it felt great to get some fresh air.",
    EmotionStarterStrategy.NEG_OTHERS: _NEG_OTHERS,
    EmotionStarterStrategy.NEG_BOT: _NEG_BOT,
    EmotionStarterStrategy.NEG_BOT_STORY:
        _NEG_BOT + " I've been missing my friends a lot and finding it hard to focus.",
    EmotionStarterStrategy.NEGOPT_OTHERS: _NEG_OTHERS + " " + _OPTIMISM,
    EmotionStarterStrategy.NEGOPT_BOT: _NEG_BOT + " " + _OPTIMISM,
    EmotionStarterStrategy.NEGOPT_BOT_STORY:
        _NEG_BOT + " " + _OPTIMISM
        + " Just earlier today I took a walk outside and the fresh air helped me get"
        " some perspective.",
}


def select_emotion_starter(strategy: EmotionStarterStrategy | str) -> str:
    """Preamble for the strategy followed by the shared check-in question."""
    if isinstance(strategy, str):
        try:
            strategy = EmotionStarterStrategy[strategy]
        except KeyError:
            raise ValueError(f"unknown emotion starter strategy: {strategy!r}") from None
    return f"{_EMOTION_PREAMBLES[strategy]} {BASE_EMOTION_QUESTION}"


MEAL_BY_TIME_OF_DAY = {"morning": "breakfast", "afternoon": "lunch", "evening": "dinner"}

DISCUSSION_AREAS = (
    "current_activities",
    "future_activities",
    "general_activities",
    "emotions",
    "family",
    "living_situation",
    "food",
)


def starter_question(area: str, time_of_day: str, emotion_strategy: str | None = None) -> str:
    if area == "current_activities":
        return "What did you do today?"
    if area == "future_activities":
        return (f"I hope your {time_of_day} is going well. "
                "What are your plans for the rest of today?")
    if area == "general_activities":
        return "What do you like to do to relax?"
    if area == "emotions":
        return select_emotion_starter(emotion_strategy or "NO_SHARE")
    if area == "family":
        return "Is there anyone in your family you've been thinking about lately?"
    if area == "living_situation":
        return "How do you like the place you're living in right now?"
    if area == "food":
        meal = MEAL_BY_TIME_OF_DAY.get(time_of_day, "dinner")
        return f"What did you have for {meal} today?"
    raise ValueError(f"unknown discussion area: {area!r}")


HISTORY_TOKEN_BUDGET = 800
QUESTION_FRACTION_FLOOR = 1 / 3


def truncate_history(history: list[str], budget: int = HISTORY_TOKEN_BUDGET) -> list[str]:
    """Drop oldest whole utterances until the token total fits the budget."""
    kept: list[str] = []
    total = 0
    for utterance in reversed(history):
        tokens = len(utterance.split())
        if kept and total + tokens > budget:
            break
        kept.append(utterance)
        total += tokens
    return list(reversed(kept))


def choose_sample(samples: list[str]) -> tuple[str, bool]:
    """(selected utterance, continue?) under the question-fraction rule."""
    questions = [s for s in samples if "?" in s]
    if samples and len(questions) / len(samples) >= QUESTION_FRACTION_FLOOR:
        return questions[0], True
    for s in samples:
        if "?" not in s:
            return s, False
    return (samples[0], False) if samples else ("", False)


class NeuralChatRG(ResponseGenerator):
    name = "Neural Chat"

    def __init__(self, adapter: GeneratorAdapter, sample_count: int = 20):
        self.adapter = adapter
        self.sample_count = sample_count

    def _time_of_day(self, snapshot: TurnSnapshot) -> str:
        return snapshot.config.get("time_of_day", "afternoon")

    def _emotion_strategy(self, snapshot: TurnSnapshot) -> str:
        configured = snapshot.config.get("emotion_starter_strategy")
        if configured:
            return configured
        return snapshot.rng.choice([s.name for s in EmotionStarterStrategy])

    def get_response(self, snapshot: TurnSnapshot) -> ResponseCandidate | None:
        state = dict(snapshot.rg_state)
        if not state.get("discussion_active") or not snapshot.in_control(self.name):
            return None
        nav = snapshot.annotations.nav_intent
        if snapshot.entity_set_by_user or nav.negative:
            return None  # the user steered elsewhere; drop the discussion
        history = [u for pair in snapshot.history for u in pair] + [snapshot.utterance]
        try:
            samples = self.adapter.generate(
                truncate_history(history), self.sample_count
            )
        except Exception:
            return None
        if not samples:
            return None
        text, keep_going = choose_sample(samples)
        state["discussion_active"] = keep_going
        return ResponseCandidate(
            rg=self.name,
            text=text,
            priority=ResponsePriority.STRONG_CONTINUE,
            needs_prompt=not keep_going,
            directive=EntityDirective.keep(),
            new_rg_state=state,
        )

    def get_prompt(self, snapshot: TurnSnapshot) -> PromptCandidate | None:
        state = dict(snapshot.rg_state)
        used = set(state.get("used_areas", ()))

        # scripted transition out of the launch sequence
        if snapshot.responding_rg == "Launch" and "launch_handoff" not in used:
            area = "future_activities"
            text = starter_question(area, self._time_of_day(snapshot))
            state.update({
                "discussion_active": True,
                "area": area,
                "used_areas": sorted(used | {area, "launch_handoff"}),
            })
            return PromptCandidate(
                rg=self.name,
                text=text,
                priority=PromptPriority.FORCE_START,
                directive=EntityDirective.keep(),
                new_rg_state=state,
            )

        available = [a for a in DISCUSSION_AREAS if a not in used]
        if not available:
            return None
        area = snapshot.rng.choice(available)
        text = starter_question(
            area, self._time_of_day(snapshot), self._emotion_strategy(snapshot)
        )
        state.update({
            "discussion_active": True,
            "area": area,
            "used_areas": sorted(used | {area}),
        })
        return PromptCandidate(
            rg=self.name,
            text=text,
            priority=PromptPriority.GENERIC,
            directive=EntityDirective.clear(),
            new_rg_state=state,
        )
