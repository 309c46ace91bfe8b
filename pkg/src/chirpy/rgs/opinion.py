"""Opinion exchange over a whitelist of safe entities.

Three agreement policies govern an episode:

* ALWAYS_AGREE      - mirror the user's sentiment, trade reasons
* LISTEN_FIRST_DISAGREE - hear their reason out, then push back once
* CONVINCED_AGREE   - push back first, let their reason win us over

Episodes the user starts by asking to talk about a whitelisted entity run
the full script and end by switching to a related entity (always agreeing
there). When the user volunteers an opinion mid-conversation ("i love
cats"), the bot interjects a shorter exchange and yields the floor after
giving its wrap-up reason so the topic can continue elsewhere.

Interest is checked on every reply to an open step: fewer than four words
with no agreement word ends the episode. Replies to yes/no steps are
exempt, a one-word "yes" there is a normal answer.
"""

from __future__ import annotations

import json
import re
from pathlib import Path

from ..manager import ResponseCandidate, ResponsePriority
from ..pipeline.types import Sentiment
from ..tracker import EntityDirective
from .base import ResponseGenerator, TurnSnapshot

_DATA_DIR = Path(__file__).parent.parent / "data"

POLICIES = ("ALWAYS_AGREE", "LISTEN_FIRST_DISAGREE", "CONVINCED_AGREE")
# mirrors the traffic split the policies were evaluated under
POLICY_WEIGHTS = {"ALWAYS_AGREE": 0.5, "LISTEN_FIRST_DISAGREE": 0.3, "CONVINCED_AGREE": 0.2}

AGREEMENT_WORDS = ("same", "me too", "agree", "totally", "exactly", "right")

EXPRESSED_OPINION = re.compile(
    r"\bi (?P<verb>love|like|admire|adore|hate|don'?t like|dislike)\s+"
    r"(?P<topic>[a-z ]+?)(?:\s+because\s+(?P<reason>.+))?$"
)

_NEGATIVE_VERBS = {"hate", "don't like", "dont like", "dislike"}


def load_whitelist(path: str | Path | None = None) -> dict:
    return json.loads((Path(path) if path else _DATA_DIR / "opinion_whitelist.json").read_text())


def contains_agreement_word(utterance: str) -> bool:
    return any(re.search(rf"\b{re.escape(w)}\b", utterance) for w in AGREEMENT_WORDS)


def lost_interest(utterance: str) -> bool:
    """The hand-off rule: under four words and no agreement word."""
    return len(utterance.split()) < 4 and not contains_agreement_word(utterance)


def scan_expressed_opinion(utterance: str) -> tuple[str, Sentiment] | None:
    """(topic text, sentiment) when the user volunteers an opinion."""
    match = EXPRESSED_OPINION.search(utterance)
    if not match:
        return None
    verb = match.group("verb").replace("'", "")
    sentiment = Sentiment.NEGATIVE if verb in _NEGATIVE_VERBS else Sentiment.POSITIVE
    return match.group("topic").strip(), sentiment


class OpinionRG(ResponseGenerator):
    name = "Opinion"

    def __init__(self, whitelist: dict | None = None):
        self.whitelist = whitelist if whitelist is not None else load_whitelist()

    # --- policy/state helpers -------------------------------------------

    def _policy(self, snapshot: TurnSnapshot, state: dict) -> str:
        if "policy" in state:
            return state["policy"]
        configured = snapshot.config.get("opinion_policy")
        if configured in POLICIES:
            state["policy"] = configured
            return configured
        roll = snapshot.rng.random()
        acc = 0.0
        chosen = POLICIES[0]
        for policy in POLICIES:
            acc += POLICY_WEIGHTS[policy]
            if roll < acc:
                chosen = policy
                break
        state["policy"] = chosen
        return chosen

    def _entry(self, snapshot: TurnSnapshot, state: dict):
        """(entity id, user sentiment or None) when a new episode can start."""
        entity = snapshot.current_entity
        if entity is None or entity.id not in self.whitelist:
            return None
        if entity.id in set(state.get("done_entities", ())):
            return None
        expressed = scan_expressed_opinion(snapshot.utterance)
        if expressed is not None:
            topic, sentiment = expressed
            hits = {e.id for e in snapshot.index.lookup_exact(topic)}
            for span in topic.split():
                hits |= {e.id for e in snapshot.index.lookup_exact(span)}
            if entity.id in hits or topic == self.whitelist[entity.id]["plural"]:
                return entity.id, sentiment
        if snapshot.entity_set_by_user or snapshot.annotations.nav_intent.positive:
            return entity.id, None
        return None

    def _candidate(self, state: dict, text: str, *, needs_prompt=False,
                   directive=None, priority=ResponsePriority.STRONG_CONTINUE):
        return ResponseCandidate(
            rg=self.name,
            text=text,
            priority=priority,
            needs_prompt=needs_prompt,
            directive=directive or EntityDirective.keep(),
            new_rg_state=state,
        )

    def _finish(self, state: dict, entity_id: str, phase: str = "done") -> dict:
        done = set(state.get("done_entities", ()))
        done.add(entity_id)
        state.update({"phase": phase, "done_entities": sorted(done)})
        return state

    # --- the script ------------------------------------------------------

    def get_response(self, snapshot: TurnSnapshot) -> ResponseCandidate | None:
        state = dict(snapshot.rg_state)
        phase = state.get("phase")
        active = snapshot.in_control(self.name) and phase not in (None, "done")

        if active:
            return self._continue_episode(snapshot, state, phase)
        return self._maybe_start(snapshot, state)

    def _maybe_start(self, snapshot: TurnSnapshot, state: dict) -> ResponseCandidate | None:
        entry = self._entry(snapshot, state)
        if entry is None:
            return None
        entity_id, sentiment = entry
        row = self.whitelist[entity_id]
        plural = row["plural"]
        policy = self._policy(snapshot, state)
        state.update({"entity": entity_id, "user_sentiment": None})

        if sentiment is None:
            state["phase"] = "awaiting_sentiment"
            return self._candidate(
                state, f"Ok! Do you like {plural}?",
                priority=ResponsePriority.CAN_START,
            )

        # the user already told us how they feel; shorter interjection path
        state["user_sentiment"] = sentiment.value
        if sentiment is Sentiment.POSITIVE and policy == "CONVINCED_AGREE":
            disagree = row["negative"]["disagree"].replace("they", plural, 1)
            state["phase"] = "awaiting_reason_interject"
            return self._candidate(
                state,
                f"Good to hear you like {plural}. I have to be honest though, "
                f"I'm not a big fan of {plural}. I feel like {disagree}, "
                f"but I would love to hear why you like {plural}?",
                priority=ResponsePriority.CAN_START,
            )
        if sentiment is Sentiment.POSITIVE:
            state["phase"] = "awaiting_reason_share"
            return self._candidate(
                state,
                f"Sounds like you like {plural}. Me too! I feel like "
                f"{row['positive']['share']}. What about you?",
                priority=ResponsePriority.CAN_START,
            )
        state["phase"] = "awaiting_reason_negative"
        return self._candidate(
            state,
            f"Sounds like {plural} aren't your thing. I get that, I feel like "
            f"{row['negative']['disagree']}. What is it for you?",
            priority=ResponsePriority.CAN_START,
        )

    def _continue_episode(self, snapshot, state: dict, phase: str) -> ResponseCandidate | None:
        entity_id = state.get("entity")
        if entity_id not in self.whitelist:
            return None
        row = self.whitelist[entity_id]
        plural = row["plural"]
        policy = state.get("policy", "ALWAYS_AGREE")
        utterance = snapshot.utterance
        act = snapshot.annotations.dialogue_act

        open_step = phase in (
            "awaiting_reason_share", "awaiting_reason_listen", "awaiting_reason_convinced",
            "awaiting_reason_interject", "awaiting_reason_negative",
            "awaiting_agreement", "awaiting_related_agreement", "awaiting_related_more",
        )
        if open_step and lost_interest(utterance):
            self._finish(state, entity_id)
            return self._candidate(
                state, "No worries, we can leave it there.",
                needs_prompt=True, directive=EntityDirective.clear(),
            )

        if phase == "awaiting_sentiment":
            positive = act == "pos_answer" or snapshot.annotations.sentiment is Sentiment.POSITIVE
            state["user_sentiment"] = (
                Sentiment.POSITIVE.value if positive else Sentiment.NEGATIVE.value
            )
            if not positive:
                state["phase"] = "awaiting_reason_negative"
                return self._candidate(
                    state,
                    f"Sounds like {plural} aren't your thing. I get that, I feel like "
                    f"{row['negative']['disagree']}. What is it for you?",
                )
            if policy == "ALWAYS_AGREE":
                state["phase"] = "awaiting_reason_share"
                return self._candidate(
                    state,
                    f"Sounds like you like {plural}. Me too! I feel like "
                    f"{row['positive']['share']}. What about you?",
                )
            if policy == "LISTEN_FIRST_DISAGREE":
                state["phase"] = "awaiting_reason_listen"
                return self._candidate(
                    state, f"What's your favorite thing about {plural}?"
                )
            state["phase"] = "awaiting_reason_convinced"
            return self._candidate(
                state,
                f"Glad to meet a fan of {plural}! I have to be honest though, "
                f"I'm not a big fan of {plural} actually. I feel like "
                f"{row['negative']['disagree']}. But I'm interested to hear why "
                f"you like {plural}?",
            )

        if phase == "awaiting_reason_share":
            state["phase"] = "awaiting_agreement"
            return self._candidate(
                state,
                f"That's so true. That reminds me of another reason I love {plural}. "
                f"I feel like {row['positive']['another']}. Do you agree?",
            )

        if phase == "awaiting_reason_listen":
            state["phase"] = "awaiting_agreement"
            return self._candidate(
                state,
                f"That make sense. I have to be honest though, I'm not a big fan of "
                f"{plural} actually. I feel like {row['negative']['disagree']}. "
                f"Can we agree on that?",
            )

        if phase == "awaiting_reason_convinced":
            state["phase"] = "awaiting_agreement"
            return self._candidate(
                state,
                f"That make sense. Now that I think about it, there are a few things "
                f"I like about {plural}. For example, {row['negative']['converted']}. "
                f"What do you think?",
            )

        if phase == "awaiting_reason_interject":
            self._finish(state, entity_id)
            return self._candidate(
                state,
                f"That make sense. Now that I think about it, one good reason to like "
                f"{plural} is that {row['positive']['wrapup']}.",
                needs_prompt=True,
            )

        if phase == "awaiting_reason_negative":
            self._finish(state, entity_id)
            return self._candidate(
                state,
                "That's fair, thanks for telling me how you see it.",
                needs_prompt=True,
            )

        if phase == "awaiting_agreement":
            related = row.get("related")
            if related and related in self.whitelist and related in snapshot.index:
                rel_plural = self.whitelist[related]["plural"]
                state.update({"phase": "awaiting_related_sentiment", "related": related})
                return self._candidate(
                    state,
                    f"What about {rel_plural}? Do you like {rel_plural}?",
                    directive=EntityDirective.set(related),
                )
            self._finish(state, entity_id)
            return self._candidate(
                state,
                "Thanks for sharing! It's nice to know your likes and dislikes.",
                needs_prompt=True,
            )

        related = state.get("related")
        rel = self.whitelist.get(related, {})
        rel_plural = rel.get("plural", "them")

        if phase == "awaiting_related_sentiment":
            positive = act == "pos_answer" or snapshot.annotations.sentiment is Sentiment.POSITIVE
            if not positive:
                self._finish(state, entity_id)
                return self._candidate(
                    state,
                    "That's fair! It's nice to know your likes and dislikes.",
                    needs_prompt=True,
                )
            state["phase"] = "awaiting_related_agreement"
            return self._candidate(
                state,
                f"Me too! You know, I think the reason I'm a fan of {rel_plural} is "
                f"because {rel['positive']['share']}. What do you think?",
            )

        if phase == "awaiting_related_agreement":
            state["phase"] = "awaiting_related_more"
            return self._candidate(
                state,
                f"Totally. I also like {rel_plural} because of "
                f"{rel['positive']['another']}. Do you feel the same way?",
            )

        if phase == "awaiting_related_more":
            self._finish(state, entity_id)
            if related:
                done = set(state.get("done_entities", ()))
                done.add(related)
                state["done_entities"] = sorted(done)
            return self._candidate(
                state,
                f"Thanks for sharing! It's nice to know your likes and dislikes. "
                f"Do you want to know more about {rel_plural}?",
            )

        return None
