from .dialogue_act import classify_dialogue_act
from .nav_intent import classify_nav_intent
from .offense import OffenseClassifier, detect_offense, load_blacklist
from .question import detect_question
from .runner import AnnotatorPipeline
from .sentiment import classify_sentiment
from .types import (
    DIALOGUE_ACT_LABELS,
    Annotations,
    NavIntent,
    OffenseResult,
    OffenseType,
    PriorTurn,
    QuestionType,
    Sentiment,
)

__all__ = [
    "AnnotatorPipeline",
    "Annotations",
    "DIALOGUE_ACT_LABELS",
    "NavIntent",
    "OffenseClassifier",
    "OffenseResult",
    "OffenseType",
    "PriorTurn",
    "QuestionType",
    "Sentiment",
    "classify_dialogue_act",
    "classify_nav_intent",
    "classify_sentiment",
    "detect_offense",
    "detect_question",
    "load_blacklist",
]
