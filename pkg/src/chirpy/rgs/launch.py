"""Launch: the first two turns, greeting the user and learning their name."""

from __future__ import annotations

import re

from ..manager import ResponseCandidate, ResponsePriority
from ..tracker import EntityDirective
from .base import ResponseGenerator, TurnSnapshot

GREETING = (
    "Hi, this is an Alexa Prize Socialbot. I'd love to get to know you a bit "
    "better before we chat! Is it all right if I ask for your name?"
)

_NAME_PATTERNS = [
    re.compile(r"\bmy name(?:'s| is) (?P<name>[a-z]+)\b"),
    re.compile(r"\b(?:i am|i'm) (?P<name>[a-z]+)$"),
    re.compile(r"\b(?:call me|it's|its) (?P<name>[a-z]+)$"),
    re.compile(r"^(?P<name>[a-z]+)$"),
]
_REFUSALS = re.compile(
    r"\b(?:rather not|won'?t tell|not telling|no thanks|none of your business|"
    r"skip|not say|don'?t want to)\b"
)
_NOT_NAMES = {
    "no", "yes", "yeah", "nope", "sure", "okay", "ok", "hello", "hi", "hey",
    "what", "why", "nothing", "nobody", "stop",
}


def extract_name(utterance: str) -> str | None:
    if _REFUSALS.search(utterance):
        return None
    for pattern in _NAME_PATTERNS:
        match = pattern.search(utterance)
        if match:
            name = match.group("name")
            if name not in _NOT_NAMES:
                return name
    return None


class LaunchRG(ResponseGenerator):
    name = "Launch"

    def get_response(self, snapshot: TurnSnapshot) -> ResponseCandidate | None:
        phase = snapshot.rg_state.get("phase")
        if snapshot.turn_number == 0 and phase is None:
            return ResponseCandidate(
                rg=self.name,
                text=GREETING,
                priority=ResponsePriority.FORCE_START,
                needs_prompt=False,
                directive=EntityDirective.keep(),
                new_rg_state={"phase": "asked_name"},
            )
        if phase == "asked_name":
            name = extract_name(snapshot.utterance)
            if name:
                text = (f"Well it's nice to meet you, {name.capitalize()}! "
                        "I'm excited to chat with you today.")
                profile = {"name": name.capitalize()}
            else:
                text = "No problem! I'm excited to chat with you today."
                profile = {}
            return ResponseCandidate(
                rg=self.name,
                text=text,
                priority=ResponsePriority.STRONG_CONTINUE,
                needs_prompt=True,
                directive=EntityDirective.keep(),
                new_rg_state={"phase": "done"},
                new_profile=profile,
            )
        return None
