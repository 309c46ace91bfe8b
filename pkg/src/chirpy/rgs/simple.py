"""The small single-purpose generators: Complaint, Closing Confirmation,
Alexa Commands, One-Turn Scripted, and Red Question."""

from __future__ import annotations

import re
from pathlib import Path

import yaml

from ..manager import ResponseCandidate, ResponsePriority
from ..tracker import EntityDirective
from .base import ResponseGenerator, TurnSnapshot

_DATA_DIR = Path(__file__).parent.parent / "data"


class ComplaintRG(ResponseGenerator):
    """Typed complaint handling: misheard, clarification, repetition, and
    privacy complaints each get a tailored apology; anything the dialogue
    act classifier flags as a complaint gets the generic one."""

    name = "Complaint"

    _SUBTYPES = [
        ("misheard", re.compile(
            r"\bthat'?s not what i said\b|\byou (?:misheard|misunderstood) me\b|"
            r"\bi didn'?t say that\b|\byou'?re not hearing me\b"),
         "Oh no, I think I misheard you. Could you say that one more time?",
         False),
        ("clarification", re.compile(
            r"\bwhat do you mean\b|\byou'?re not making (?:any )?sense\b|"
            r"\bthat (?:doesn'?t|does not) make (?:any )?sense\b|\bi'?m confused\b"),
         "Sorry if I wasn't clear!",
         True),
        ("repetition", re.compile(
            r"\byou (?:already )?said that\b|\byou'?re repeating yourself\b|"
            r"\byou keep saying (?:that|the same)\b"),
         "Oops, sorry for repeating myself. Let's try something new.",
         True),
        ("privacy", re.compile(
            r"\b(?:i don'?t want to (?:tell|share|say)|none of your business|"
            r"that'?s (?:private|personal)|why do you (?:want|need) to know)\b"),
         "That's totally fine, we don't have to talk about that. Sorry for asking.",
         True),
    ]
    _GENERIC = ("I'm sorry, I'm still learning and I really appreciate your patience.", True)

    def get_response(self, snapshot: TurnSnapshot) -> ResponseCandidate | None:
        state = dict(snapshot.rg_state)
        matched = None
        for subtype, pattern, text, needs_prompt in self._SUBTYPES:
            if pattern.search(snapshot.utterance):
                matched = (subtype, text, needs_prompt)
                break
        if matched is None and snapshot.annotations.dialogue_act == "complaint":
            matched = ("generic", *self._GENERIC)
        if matched is None:
            return None
        subtype, text, needs_prompt = matched
        state["last_complaint"] = subtype
        return ResponseCandidate(
            rg=self.name,
            text=text,
            priority=ResponsePriority.FORCE_START,
            needs_prompt=needs_prompt,
            directive=EntityDirective.keep(),
            new_rg_state=state,
        )


class ClosingConfirmationRG(ResponseGenerator):
    """Ambiguous exit signals get a confirmation question; a confirmed
    yes ends the conversation."""

    name = "Closing Confirmation"

    _AMBIGUOUS = re.compile(
        r"\bdo you (?:just )?keep talking\b|\bare (?:you|we) still (?:there|talking|chatting)\b|"
        r"\bwhat'?s happening\b|\bare we done\b|\bcan i go\b|\bhow do i (?:leave|exit|stop)\b"
    )
    CONFIRM_QUESTION = "Just to check: would you like to end our chat?"
    GOODBYE = "Okay! It was lovely chatting with you. Goodbye!"
    STAY = "Great, happy to keep chatting!"

    def get_response(self, snapshot: TurnSnapshot) -> ResponseCandidate | None:
        state = dict(snapshot.rg_state)
        if state.get("phase") == "awaiting_confirmation" and snapshot.in_control(self.name):
            state["phase"] = "idle"
            if snapshot.annotations.dialogue_act == "pos_answer":
                return ResponseCandidate(
                    rg=self.name,
                    text=self.GOODBYE,
                    priority=ResponsePriority.STRONG_CONTINUE,
                    directive=EntityDirective.clear(),
                    new_rg_state=state,
                    ends_conversation=True,
                )
            return ResponseCandidate(
                rg=self.name,
                text=self.STAY,
                priority=ResponsePriority.STRONG_CONTINUE,
                needs_prompt=True,
                directive=EntityDirective.keep(),
                new_rg_state=state,
            )
        triggered = (self._AMBIGUOUS.search(snapshot.utterance)
                     or snapshot.annotations.dialogue_act == "closing")
        if not triggered:
            return None
        state["phase"] = "awaiting_confirmation"
        return ResponseCandidate(
            rg=self.name,
            text=self.CONFIRM_QUESTION,
            priority=ResponsePriority.FORCE_START,
            directive=EntityDirective.keep(),
            new_rg_state=state,
        )


class AlexaCommandsRG(ResponseGenerator):
    """Detects device commands aimed at the wrong assistant."""

    name = "Alexa Commands"

    _COMMANDS = re.compile(
        r"^(?:alexa )?(?:play|pause|resume|skip|turn (?:on|off|up|down)|"
        r"set (?:a |an |the )?(?:timer|alarm|reminder)|add .+ to my|volume \d|"
        r"open|launch|order|buy)\b"
    )
    TEXT = (
        "This is an Alexa Prize Socialbot, so I can't run regular Alexa commands "
        "like that one. If you want to stop chatting, just say stop, and then "
        "you can try your command again. But I'd love to keep talking to you!"
    )

    def get_response(self, snapshot: TurnSnapshot) -> ResponseCandidate | None:
        if not self._COMMANDS.search(snapshot.utterance):
            return None
        return ResponseCandidate(
            rg=self.name,
            text=self.TEXT,
            priority=ResponsePriority.FORCE_START,
            needs_prompt=True,
            directive=EntityDirective.keep(),
            new_rg_state=dict(snapshot.rg_state),
        )


class OneTurnScriptedRG(ResponseGenerator):
    """Handwritten responses to common standalone utterances."""

    name = "One-Turn Scripted"

    def __init__(self, table_path: str | Path | None = None):
        raw = yaml.safe_load(
            (Path(table_path) if table_path else _DATA_DIR / "one_turn.yaml").read_text()
        )
        self.rows = [
            (re.compile(row["pattern"]), row["response"], bool(row.get("needs_prompt", True)))
            for row in raw["responses"]
        ]

    def get_response(self, snapshot: TurnSnapshot) -> ResponseCandidate | None:
        if snapshot.turn_number == 0:
            return None  # the launch sequence owns the opening turn
        for pattern, response, needs_prompt in self.rows:
            if pattern.search(snapshot.utterance):
                return ResponseCandidate(
                    rg=self.name,
                    text=response,
                    priority=ResponsePriority.CAN_START,
                    needs_prompt=needs_prompt,
                    directive=EntityDirective.keep(),
                    new_rg_state=dict(snapshot.rg_state),
                )
        return None


class RedQuestionRG(ResponseGenerator):
    """Declines medical, legal, and financial advice questions."""

    name = "Red Question"

    _DOMAINS = re.compile(
        r"\b(?:medicine|medication|aspirin|ibuprofen|dosage|diagnose|diagnosis|"
        r"symptom|symptoms|prescription|vaccine|cancer|treatment|"
        r"lawyer|legal|illegal|sue|lawsuit|court|arrested|contract|"
        r"invest|investment|stocks|shares|bitcoin|crypto|mortgage|loan|taxes)\b"
    )
    _ADVICE_SHAPE = re.compile(r"^(?:should i|can i|is it (?:safe|legal|ok|okay)|how much|what should i)\b")
    TEXT = (
        "I'm not able to give medical, legal, or financial advice, so I'll have "
        "to pass on that one. But I'm happy to keep chatting about other things!"
    )

    def get_response(self, snapshot: TurnSnapshot) -> ResponseCandidate | None:
        utterance = snapshot.utterance
        looks_like_request = snapshot.annotations.is_question or self._ADVICE_SHAPE.search(utterance)
        if not (looks_like_request and self._DOMAINS.search(utterance)):
            return None
        return ResponseCandidate(
            rg=self.name,
            text=self.TEXT,
            priority=ResponsePriority.FORCE_START,
            needs_prompt=True,
            directive=EntityDirective.keep(),
            new_rg_state=dict(snapshot.rg_state),
        )
