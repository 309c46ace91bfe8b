"""Offensive User: redirects offensive or critical utterances.

Critical utterances (attacks on the bot's competence) get a standing
apologetic reply. Offensive utterances get one of eight strategies fixed
per conversation: ask why, or politely avoid, each optionally naming the
user and optionally handing straight off to a prompt; plus a confront
variant and an empathetic variant, both contextualized by offense type.
Asking "why" can never be combined with avoidance or a same-turn prompt,
a question already fills the turn.
"""

from __future__ import annotations

from enum import Enum

from ..manager import ResponseCandidate, ResponsePriority
from ..pipeline.types import OffenseType
from ..tracker import EntityDirective
from .base import ResponseGenerator, TurnSnapshot


class OffenseStrategy(Enum):
    WHY = "WHY"
    WHY_NAME = "WHY_NAME"
    AVOIDANCE = "AVOIDANCE"
    AVOIDANCE_NAME = "AVOIDANCE_NAME"
    AVOIDANCE_PROMPT = "AVOIDANCE_PROMPT"
    AVOIDANCE_NAME_PROMPT = "AVOIDANCE_NAME_PROMPT"
    COUNTER_PROMPT = "COUNTER_PROMPT"
    EMPATHETIC_PROMPT = "EMPATHETIC_PROMPT"


CRITICAL_RESPONSE = "I know you feel frustrated. I'm always trying to get better."

_COUNTER_BY_TYPE = {
    OffenseType.SEXUAL: "That is a very suggestive thing to say.",
    OffenseType.INSULT: "That is a very hurtful thing to say.",
    OffenseType.BODILY_HARM: "That is a very alarming thing to say.",
    OffenseType.INAPPROPRIATE_TOPIC: "That is not a topic I think we should get into.",
}
_COUNTER_DEFAULT = "That is a surprising thing to say."

_EMPATHETIC_BY_TYPE = {
    OffenseType.SEXUAL: "I get that some topics feel exciting to bring up.",
    OffenseType.INSULT: "I understand wanting to vent a little.",
    OffenseType.BODILY_HARM: "I hear that something intense is on your mind.",
    OffenseType.INAPPROPRIATE_TOPIC: "I understand being curious about edgy topics.",
}
_EMPATHETIC_DEFAULT = "I understand the urge to push the boundaries a bit."


def strategy_text(strategy: OffenseStrategy, user_name: str | None,
                  offense_type: OffenseType) -> tuple[str, bool]:
    """(bot text, wants a same-turn prompt) for an offensive utterance."""
    name_suffix = f", {user_name}" if user_name else ""
    if strategy in (OffenseStrategy.WHY, OffenseStrategy.WHY_NAME):
        suffix = name_suffix if strategy is OffenseStrategy.WHY_NAME else ""
        return f"Why did you say that{suffix}?", False
    if strategy in (OffenseStrategy.AVOIDANCE, OffenseStrategy.AVOIDANCE_NAME,
                    OffenseStrategy.AVOIDANCE_PROMPT, OffenseStrategy.AVOIDANCE_NAME_PROMPT):
        named = strategy in (OffenseStrategy.AVOIDANCE_NAME,
                             OffenseStrategy.AVOIDANCE_NAME_PROMPT)
        prompted = strategy in (OffenseStrategy.AVOIDANCE_PROMPT,
                                OffenseStrategy.AVOIDANCE_NAME_PROMPT)
        suffix = name_suffix if named else ""
        return f"I'd rather not talk about that{suffix}.", prompted
    if strategy is OffenseStrategy.COUNTER_PROMPT:
        opener = _COUNTER_BY_TYPE.get(offense_type, _COUNTER_DEFAULT)
        return f"{opener} I don't think we should be talking about that. Let's move on.", True
    opener = _EMPATHETIC_BY_TYPE.get(offense_type, _EMPATHETIC_DEFAULT)
    return f"{opener} If I could talk about it I would, but I really couldn't. Sorry to disappoint.", True


class OffensiveUserRG(ResponseGenerator):
    name = "Offensive User"

    def _strategy(self, snapshot: TurnSnapshot, state: dict) -> OffenseStrategy:
        if "strategy" in state:
            return OffenseStrategy[state["strategy"]]
        configured = snapshot.config.get("offense_strategy")
        if configured:
            chosen = OffenseStrategy[configured]
        else:
            chosen = snapshot.rng.choice(list(OffenseStrategy))
        state["strategy"] = chosen.name
        return chosen

    def get_response(self, snapshot: TurnSnapshot) -> ResponseCandidate | None:
        state = dict(snapshot.rg_state)
        offense = snapshot.annotations.offense

        # second half of the WHY exchange: acknowledge and hand off
        if state.get("phase") == "awaiting_why_answer" and snapshot.in_control(self.name):
            state["phase"] = "idle"
            return ResponseCandidate(
                rg=self.name,
                text="OK.",
                priority=ResponsePriority.STRONG_CONTINUE,
                needs_prompt=True,
                directive=EntityDirective.clear(),
                new_rg_state=state,
            )

        if offense.critical:
            state["phase"] = "idle"
            return ResponseCandidate(
                rg=self.name,
                text=CRITICAL_RESPONSE,
                priority=ResponsePriority.FORCE_START,
                needs_prompt=True,
                directive=EntityDirective.clear(),
                new_rg_state=state,
            )

        if not offense.offensive:
            return None

        strategy = self._strategy(snapshot, state)
        text, wants_prompt = strategy_text(strategy, snapshot.user_name, offense.offense_type)
        if strategy in (OffenseStrategy.WHY, OffenseStrategy.WHY_NAME):
            state["phase"] = "awaiting_why_answer"
        else:
            state["phase"] = "idle"
        return ResponseCandidate(
            rg=self.name,
            text=text,
            priority=ResponsePriority.FORCE_START,
            needs_prompt=wants_prompt,
            directive=EntityDirective.clear(),
            new_rg_state=state,
        )
