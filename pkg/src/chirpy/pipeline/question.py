"""Question detection over raw ASR text (no punctuation available)."""

from __future__ import annotations

import re

from .types import QuestionType

_INTERROGATIVES = {"what", "who", "whose", "whom", "where", "when", "which", "why", "how"}
_AUXILIARIES = {
    "do", "does", "did", "is", "are", "was", "were", "am",
    "can", "could", "will", "would", "should", "shall", "may", "might",
    "have", "has", "had",
}
_PRONOUNS = {"you", "i", "we", "they", "he", "she", "it", "this", "that", "there"}

_OPINION_MARKERS = re.compile(
    r"\b(?:think|feel|like|love|hate|favorite|favourite|opinion|interesting|"
    r"prefer|enjoy|best|worst|fun)\b"
)


def detect_question(utterance: str) -> tuple[bool, QuestionType]:
    """(is_question, FACTUAL/OPINION/NONE) from lead word and aux inversion."""
    tokens = utterance.split()
    if not tokens:
        return False, QuestionType.NONE

    lead = tokens[0]
    second = tokens[1] if len(tokens) > 1 else ""
    is_question = False
    if lead in _INTERROGATIVES:
        is_question = True
    elif lead in _AUXILIARIES and second in _PRONOUNS:
        is_question = True  # auxiliary inversion: "do you ...", "is it ..."
    elif lead == "tell" and second == "me" and len(tokens) > 2 and tokens[2] in _INTERROGATIVES:
        is_question = True

    if not is_question:
        return False, QuestionType.NONE
    if _OPINION_MARKERS.search(utterance):
        return True, QuestionType.OPINION
    return True, QuestionType.FACTUAL
