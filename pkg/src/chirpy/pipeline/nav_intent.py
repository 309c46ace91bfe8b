"""Regex-driven navigational-intent classification.

The rule table lives in data/nav_intent_rules.yaml so patterns can be
revised without code changes. Every matching row contributes; a positive
topic that is really a change-of-subject marker ("something else") is
folded into negative intent at the current topic.
"""

from __future__ import annotations

import re
from pathlib import Path

import yaml

from .types import NavIntent

_DATA_DIR = Path(__file__).parent.parent / "data"

# "topics" that actually point back at whatever is being discussed
_CURRENT_TOPIC_MARKERS = {
    "this", "that", "it", "this more", "that more", "it more",
    "this topic", "this subject", "this some more",
}
# "topics" that mean "anything but the current one"
_CHANGE_MARKERS = {
    "something else", "anything else", "something different",
    "something new", "anything different", "other things",
}


class NavIntentRules:
    def __init__(self, path: str | Path | None = None):
        raw = yaml.safe_load((Path(path) if path else _DATA_DIR / "nav_intent_rules.yaml").read_text())
        self.negative = [self._compile(row) for row in raw.get("negative", [])]
        self.positive = [self._compile(row) for row in raw.get("positive", [])]

    @staticmethod
    def _compile(row: dict) -> tuple[re.Pattern, bool]:
        return re.compile(row["pattern"]), bool(row.get("refers_current", False))


_DEFAULT_RULES: NavIntentRules | None = None


def default_rules() -> NavIntentRules:
    global _DEFAULT_RULES
    if _DEFAULT_RULES is None:
        _DEFAULT_RULES = NavIntentRules()
    return _DEFAULT_RULES


def _clean_topic(topic: str | None) -> str | None:
    if topic is None:
        return None
    topic = topic.strip()
    for junk in (" any more", " anymore", " please"):
        if topic.endswith(junk):
            topic = topic[: -len(junk)]
    if topic.startswith("the "):
        topic = topic[4:]
    return topic or None


def classify_nav_intent(utterance: str, rules: NavIntentRules | None = None) -> NavIntent:
    rules = rules or default_rules()
    utterance = utterance.strip()
    if not utterance:
        return NavIntent()

    negative = False
    positive = False
    positive_topic: str | None = None
    refers_current = False

    for pattern, marks_current in rules.negative:
        match = pattern.search(utterance)
        if match:
            negative = True
            refers_current = refers_current or marks_current
            topic = _clean_topic(match.groupdict().get("topic"))
            if topic in _CURRENT_TOPIC_MARKERS or topic in _CHANGE_MARKERS:
                refers_current = True

    for pattern, marks_current in rules.positive:
        match = pattern.search(utterance)
        if not match:
            continue
        topic = _clean_topic(match.groupdict().get("topic"))
        if topic in _CHANGE_MARKERS:
            negative = True
            refers_current = True
            continue
        positive = True
        if marks_current or topic in _CURRENT_TOPIC_MARKERS:
            refers_current = True
        elif topic and positive_topic is None:
            positive_topic = topic

    return NavIntent(
        positive=positive,
        negative=negative,
        positive_topic=positive_topic if positive else None,
        refers_current_topic=refers_current,
    )
