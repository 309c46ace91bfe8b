"""Offensive/critical utterance detection.

Phrase blacklist (one lowercase phrase per line) catches offensive
content; criticism regexes catch utterances that attack the bot's
competence rather than decency. The same checker screens bot-bound
content drawn from external fixtures before it is spoken.
"""

from __future__ import annotations

import re
from pathlib import Path

from .types import OffenseResult, OffenseType

_DATA_DIR = Path(__file__).parent.parent / "data"

_CRITICISM_PATTERNS = [
    re.compile(p) for p in (
        r"\byou (?:are|'re)(?: not very| not| so| really| pretty)? "
        r"(?:smart|intelligent|clever|bright)\b.*\bnot\b|"
        r"\byou (?:are|'re) not (?:very |so |really |that )?"
        r"(?:smart|intelligent|clever|bright|good|helpful)\b",
        r"\byou (?:are|'re) (?:so |really |pretty |very )?"
        r"(?:stupid|dumb|useless|bad|terrible|awful|annoying|broken)\b",
        r"\byou suck\b",
        r"\byou (?:don'?t|do not) (?:understand|listen|make (?:any )?sense)\b",
        r"\bthis is (?:so |really )?(?:stupid|dumb|boring|terrible|pointless)\b",
        r"\byou(?:'re| are) (?:not .*)?(?:listening|working)\b",
        r"\bworst (?:bot|robot|assistant)\b",
    )
]

# keyword routing for offense categories; blacklist hits default to INSULT
_TYPE_PATTERNS: list[tuple[OffenseType, re.Pattern]] = [
    (OffenseType.SEXUAL, re.compile(r"\b(?:sexy|naked|nude|sex|kiss me|make out)\b")),
    (OffenseType.BODILY_HARM, re.compile(
        r"\b(?:kill|hurt|punch|shoot|stab|murder)\b.*\b(?:you|yourself|myself|me|them|him|her)\b")),
    (OffenseType.INAPPROPRIATE_TOPIC, re.compile(
        r"\b(?:drugs|cocaine|heroin|porn|gambling)\b")),
    (OffenseType.INSULT, re.compile(r"\b(?:idiot|moron|loser|shut up|jerk)\b")),
]


def load_blacklist(path: str | Path | None = None) -> frozenset[str]:
    phrases = set()
    text = (Path(path) if path else _DATA_DIR / "offense_blacklist.txt").read_text(encoding="utf-8")
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            phrases.add(line)
    return frozenset(phrases)


class OffenseClassifier:
    def __init__(self, blacklist: frozenset[str] | None = None):
        self.blacklist = blacklist if blacklist is not None else load_blacklist()
        # word-boundary regex per phrase avoids substring false positives
        self._blacklist_res = [
            re.compile(r"\b" + re.escape(p) + r"\b") for p in sorted(self.blacklist)
        ]

    def classify(self, utterance: str) -> OffenseResult:
        for pattern in _CRITICISM_PATTERNS:
            if pattern.search(utterance):
                return OffenseResult(offensive=False, critical=True,
                                     offense_type=OffenseType.CRITICISM)
        blacklisted = any(p.search(utterance) for p in self._blacklist_res)
        for offense_type, pattern in _TYPE_PATTERNS:
            if pattern.search(utterance):
                return OffenseResult(offensive=True, critical=False, offense_type=offense_type)
        if blacklisted:
            return OffenseResult(offensive=True, critical=False, offense_type=OffenseType.INSULT)
        return OffenseResult()


_DEFAULT: OffenseClassifier | None = None


def detect_offense(utterance: str, classifier: OffenseClassifier | None = None) -> OffenseResult:
    global _DEFAULT
    if classifier is None:
        if _DEFAULT is None:
            _DEFAULT = OffenseClassifier()
        classifier = _DEFAULT
    return classifier.classify(utterance)
