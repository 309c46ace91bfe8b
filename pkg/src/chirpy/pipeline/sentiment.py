"""Lexicon sentiment with single-step negation flipping."""

from __future__ import annotations

from pathlib import Path

from .types import Sentiment

_DATA_DIR = Path(__file__).parent.parent / "data"
_NEGATORS = {"not", "no", "never", "dont", "don't", "didnt", "didn't",
             "doesnt", "doesn't", "isnt", "isn't", "aint", "ain't", "cant", "can't"}


def _load_lexicon(path: Path) -> frozenset[str]:
    words = set()
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.add(line)
    return frozenset(words)


class SentimentLexicon:
    def __init__(self, positive_path: Path | None = None, negative_path: Path | None = None):
        self.positive = _load_lexicon(positive_path or _DATA_DIR / "sentiment_positive.txt")
        self.negative = _load_lexicon(negative_path or _DATA_DIR / "sentiment_negative.txt")


_DEFAULT: SentimentLexicon | None = None


def default_lexicon() -> SentimentLexicon:
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = SentimentLexicon()
    return _DEFAULT


def classify_sentiment(utterance: str, lexicon: SentimentLexicon | None = None) -> Sentiment:
    lexicon = lexicon or default_lexicon()
    tokens = utterance.split()
    pos = neg = 0
    for i, token in enumerate(tokens):
        negated = any(t in _NEGATORS for t in tokens[max(0, i - 2):i])
        if token in lexicon.positive:
            if negated:
                neg += 1
            else:
                pos += 1
        elif token in lexicon.negative:
            if negated:
                pos += 1
            else:
                neg += 1
    if pos > neg:
        return Sentiment.POSITIVE
    if neg > pos:
        return Sentiment.NEGATIVE
    return Sentiment.NEUTRAL
