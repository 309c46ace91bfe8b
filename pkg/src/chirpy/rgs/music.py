"""Music: a short scripted exchange about music and instruments, with a
generic prompt that steers the conversation toward instruments."""

from __future__ import annotations

import re

from ..manager import (
    PromptCandidate,
    PromptPriority,
    ResponseCandidate,
    ResponsePriority,
)
from ..tracker import EntityDirective
from .base import ResponseGenerator, TurnSnapshot

ACTIVATION_KEYWORDS = re.compile(r"\b(?:music|song|songs|musician|band|concert)\b")
INSTRUMENTS = (
    "violin", "piano", "guitar", "drums", "flute", "trumpet", "cello",
    "saxophone", "harp", "clarinet", "ukulele", "banjo",
)

GENERIC_PROMPT = (
    "I've been listening to some new music today and I wanted to chat about "
    "instruments. If you were a musical instrument which one would you be?"
)

_INSTRUMENT_RE = re.compile(r"\b(" + "|".join(INSTRUMENTS) + r")\b")


class MusicRG(ResponseGenerator):
    name = "Music"

    def get_response(self, snapshot: TurnSnapshot) -> ResponseCandidate | None:
        state = dict(snapshot.rg_state)
        phase = state.get("phase")

        if snapshot.in_control(self.name) and phase == "asked_instrument":
            match = _INSTRUMENT_RE.search(snapshot.utterance)
            if match is None:
                return None  # can't do anything useful; let the fallbacks speak
            instrument = match.group(1)
            state["phase"] = "idle"
            return ResponseCandidate(
                rg=self.name,
                text=(f"The {instrument} is a great pick! I feel like it has "
                      "so much personality."),
                priority=ResponsePriority.STRONG_CONTINUE,
                needs_prompt=True,
                directive=EntityDirective.keep(),
                new_rg_state=state,
            )

        if phase is None and ACTIVATION_KEYWORDS.search(snapshot.utterance):
            state["phase"] = "asked_favorite"
            return ResponseCandidate(
                rg=self.name,
                text="I love talking about music! Who's a musician you've been enjoying lately?",
                priority=ResponsePriority.CAN_START,
                directive=EntityDirective.keep(),
                new_rg_state=state,
            )

        if snapshot.in_control(self.name) and phase == "asked_favorite":
            state["phase"] = "idle"
            return ResponseCandidate(
                rg=self.name,
                text="Nice choice! I'll have to give them a listen.",
                priority=ResponsePriority.STRONG_CONTINUE,
                needs_prompt=True,
                directive=EntityDirective.keep(),
                new_rg_state=state,
            )

        return None

    def get_prompt(self, snapshot: TurnSnapshot) -> PromptCandidate | None:
        state = dict(snapshot.rg_state)
        if state.get("generic_prompt_used"):
            return None
        state.update({"generic_prompt_used": True, "phase": "asked_instrument"})
        directive = (EntityDirective.set("Musical instrument")
                     if "Musical instrument" in snapshot.index else EntityDirective.clear())
        return PromptCandidate(
            rg=self.name,
            text=GENERIC_PROMPT,
            priority=PromptPriority.GENERIC,
            directive=directive,
            new_rg_state=state,
        )
