"""Fallback and Neural Fallback: the safety net at the bottom of the
priority ladder.

Fallback always has something to say. Neural Fallback asks the shared
generator for a batch and keeps the first sample that neither asks a
question nor hands out advice; it outranks Fallback only through the
tie-break order, so either is chosen solely when nothing else responded.
"""

from __future__ import annotations

import re

from ..manager import (
    PromptCandidate,
    PromptPriority,
    ResponseCandidate,
    ResponsePriority,
)
from ..tracker import EntityDirective
from .adapters import GeneratorAdapter
from .base import ResponseGenerator, TurnSnapshot

FALLBACK_RESPONSE = "Sorry, I'm not sure how to answer that"
FALLBACK_PROMPT = "So, what are you interested in?"

_ADVICE = re.compile(r"\byou (?:should|need to|ought to|have to)\b|\bi (?:suggest|recommend)\b")


class FallbackRG(ResponseGenerator):
    name = "Fallback"

    def get_response(self, snapshot: TurnSnapshot) -> ResponseCandidate:
        return ResponseCandidate(
            rg=self.name,
            text=FALLBACK_RESPONSE,
            priority=ResponsePriority.UNIVERSAL_FALLBACK,
            needs_prompt=True,
            directive=EntityDirective.keep(),
            new_rg_state=dict(snapshot.rg_state),
        )

    def get_prompt(self, snapshot: TurnSnapshot) -> PromptCandidate:
        return PromptCandidate(
            rg=self.name,
            text=FALLBACK_PROMPT,
            priority=PromptPriority.GENERIC,
            directive=EntityDirective.clear(),
            new_rg_state=dict(snapshot.rg_state),
        )


class NeuralFallbackRG(ResponseGenerator):
    name = "Neural Fallback"

    def __init__(self, adapter: GeneratorAdapter, sample_count: int = 20):
        self.adapter = adapter
        self.sample_count = sample_count

    def get_response(self, snapshot: TurnSnapshot) -> ResponseCandidate | None:
        history = [u for pair in snapshot.history for u in pair] + [snapshot.utterance]
        try:
            samples = self.adapter.generate(history, self.sample_count)
        except Exception:
            return None
        for sample in samples:
            if "?" in sample or _ADVICE.search(sample.lower()):
                continue
            return ResponseCandidate(
                rg=self.name,
                text=sample,
                priority=ResponsePriority.UNIVERSAL_FALLBACK,
                needs_prompt=True,
                directive=EntityDirective.clear(),
                new_rg_state=dict(snapshot.rg_state),
            )
        return None
