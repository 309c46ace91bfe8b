"""Rule-table dialogue-act classification over (bot utterance, user reply).

Stands behind the same interface a learned classifier would use: anything
callable as (bot_utterance, user_utterance) -> label can be swapped in.
The preceding bot utterance matters because short replies like "yes" are
answers only when something was asked.
"""

from __future__ import annotations

import re
from pathlib import Path

import yaml

from .types import DIALOGUE_ACT_LABELS

_DATA_DIR = Path(__file__).parent.parent / "data"

DEFAULT_LABEL = "statement"


class DialogueActRules:
    def __init__(self, path: str | Path | None = None):
        raw = yaml.safe_load(
            (Path(path) if path else _DATA_DIR / "dialogue_act_rules.yaml").read_text()
        )
        self.rows = []
        for row in raw["rules"]:
            label = row["label"]
            if label not in DIALOGUE_ACT_LABELS:
                raise ValueError(f"unknown dialogue act label in rules: {label!r}")
            self.rows.append((
                label,
                re.compile(row["pattern"]),
                bool(row.get("requires_bot_question", False)),
                row.get("max_tokens"),
            ))


_DEFAULT_RULES: DialogueActRules | None = None


def default_rules() -> DialogueActRules:
    global _DEFAULT_RULES
    if _DEFAULT_RULES is None:
        _DEFAULT_RULES = DialogueActRules()
    return _DEFAULT_RULES


def bot_asked_question(bot_utterance: str | None) -> bool:
    return bool(bot_utterance) and bot_utterance.rstrip().endswith("?")


def classify_dialogue_act(
    bot_utterance: str | None,
    user_utterance: str,
    rules: DialogueActRules | None = None,
) -> str:
    rules = rules or default_rules()
    utterance = user_utterance.strip()
    if not utterance:
        return DEFAULT_LABEL
    asked = bot_asked_question(bot_utterance)
    n_tokens = len(utterance.split())
    for label, pattern, needs_question, max_tokens in rules.rows:
        if needs_question and not asked:
            continue
        if max_tokens is not None and n_tokens > max_tokens:
            continue
        if pattern.search(utterance):
            return label
    return DEFAULT_LABEL
