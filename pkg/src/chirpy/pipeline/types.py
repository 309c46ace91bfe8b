"""Annotation types shared across the pipeline and the response generators."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from ..linker import LinkerOutput

# 19 retained conversational-act labels plus the five bot-specific additions
DIALOGUE_ACT_LABELS = frozenset({
    "pos_answer",
    "neg_answer",
    "other_answers",
    "yes_no_question",
    "open_question_factual",
    "open_question_opinion",
    "statement",
    "opinion",
    "comment",
    "command",
    "dev_command",
    "appreciation",
    "opening",
    "closing",
    "hold",
    "abandon",
    "nonsense",
    "back-channeling",
    "complaint",
    "correction",
    "clarification",
    "uncertain",
    "non_compliant",
    "personal_question",
})


class QuestionType(Enum):
    FACTUAL = "factual"
    OPINION = "opinion"
    NONE = "none"


class Sentiment(Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    NEUTRAL = "neutral"


class OffenseType(Enum):
    SEXUAL = "sexual"
    INSULT = "insult"
    CRITICISM = "criticism"
    INAPPROPRIATE_TOPIC = "inappropriate_topic"
    BODILY_HARM = "bodily_harm"
    ERROR = "error"
    NONE = "none"


@dataclass(frozen=True)
class NavIntent:
    positive: bool = False
    negative: bool = False
    positive_topic: str | None = None
    refers_current_topic: bool = False

    def __post_init__(self):
        if self.positive_topic is not None and not self.positive:
            raise ValueError("positive_topic requires positive intent")


@dataclass(frozen=True)
class OffenseResult:
    offensive: bool = False
    critical: bool = False
    offense_type: OffenseType = OffenseType.NONE

    def __post_init__(self):
        flagged = self.offensive or self.critical
        if flagged != (self.offense_type is not OffenseType.NONE):
            raise ValueError("offense_type must be set exactly when flagged")


@dataclass(frozen=True)
class Annotations:
    """One value per annotator, every turn; failures fall back to defaults."""

    nav_intent: NavIntent = field(default_factory=NavIntent)
    dialogue_act: str = "statement"
    is_question: bool = False
    question_type: QuestionType = QuestionType.NONE
    sentiment: Sentiment = Sentiment.NEUTRAL
    offense: OffenseResult = field(default_factory=OffenseResult)
    linker: LinkerOutput = field(default_factory=LinkerOutput)


@dataclass(frozen=True)
class PriorTurn:
    """The slice of the previous turn the annotators may condition on."""

    last_bot_utterance: str | None = None
    expected_types: frozenset[str] = frozenset()
