"""Wiki: grounded discussion of the current entity.

First contact with an entity asks an open-ended question (kind-specific
when the entity belongs to a known kind). Contentful answers are matched
back to the entity's article sentences by TF-IDF cosine overlap; when the
user's answer raises another coverable entity we pivot to it. The
generator also serves the two prompt flavors the engine samples from: an
on-topic teaser for the current entity, and a callback to something the
user mentioned but never got to discuss.
"""

from __future__ import annotations

import math
from pathlib import Path

import yaml

from ..linker import load_stopwords
from ..manager import (
    PromptCandidate,
    PromptPriority,
    ResponseCandidate,
    ResponsePriority,
)
from ..corpus import Entity
from ..tracker import EntityDirective
from .base import ResponseGenerator, TurnSnapshot

_DATA_DIR = Path(__file__).parent.parent / "data"

SNIPPET_SCORE_THRESHOLD = 0.1


def _tokens(text: str, stopwords: frozenset[str]) -> list[str]:
    cleaned = "".join(c if (c.isalnum() or c.isspace()) else " " for c in text.lower())
    return [t for t in cleaned.split() if t not in stopwords]


def select_snippet(
    user_utterance: str,
    article_sentences: list[str] | tuple[str, ...],
    stopwords: frozenset[str] | None = None,
    threshold: float = SNIPPET_SCORE_THRESHOLD,
) -> tuple[str, float] | None:
    """Best article sentence by TF-IDF cosine overlap with the utterance.

    IDF is computed over the article's own sentences (natural log of
    N/df, raw term frequency). Returns None when nothing clears the
    threshold; ties go to the earliest sentence.
    """
    if not article_sentences:
        return None
    stopwords = stopwords if stopwords is not None else load_stopwords()
    docs = [_tokens(s, stopwords) for s in article_sentences]
    n_docs = len(docs)
    df: dict[str, int] = {}
    for doc in docs:
        for term in set(doc):
            df[term] = df.get(term, 0) + 1
    idf = {term: math.log(n_docs / count) for term, count in df.items()}

    def vectorize(tokens: list[str]) -> dict[str, float]:
        vec: dict[str, float] = {}
        for term in tokens:
            if term in idf:
                vec[term] = vec.get(term, 0.0) + 1.0
        return {term: tf * idf[term] for term, tf in vec.items()}

    query = vectorize(_tokens(user_utterance, stopwords))
    if not query:
        return None
    q_norm = math.sqrt(sum(w * w for w in query.values()))
    best: tuple[str, float] | None = None
    for sentence, doc in zip(article_sentences, docs):
        vec = vectorize(doc)
        norm = math.sqrt(sum(w * w for w in vec.values()))
        if norm == 0 or q_norm == 0:
            continue
        dot = sum(w * vec.get(t, 0.0) for t, w in query.items())
        score = dot / (q_norm * norm)
        if score >= threshold and (best is None or score > best[1]):
            best = (sentence, score)
    return best


class WikiQuestionBank:
    def __init__(self, path: str | Path | None = None):
        raw = yaml.safe_load((Path(path) if path else _DATA_DIR / "wiki_questions.yaml").read_text())
        self.generic: list[str] = raw["generic"]
        self.typed: dict[str, list[str]] = raw["typed"]

    def question_for(self, entity: Entity, ordinal: int) -> str:
        for category in sorted(entity.categories):
            if category in self.typed:
                bank = self.typed[category]
                return bank[ordinal % len(bank)].format(entity=entity.display_name)
        return self.generic[ordinal % len(self.generic)]


def _has_content(entity: Entity | None) -> bool:
    return entity is not None and bool(entity.article_sentences or entity.tils)


class WikiRG(ResponseGenerator):
    name = "Wiki"

    def __init__(self, question_bank: WikiQuestionBank | None = None,
                 stopwords: frozenset[str] | None = None):
        self.bank = question_bank or WikiQuestionBank()
        self.stopwords = stopwords if stopwords is not None else load_stopwords()

    # --- responses --------------------------------------------------------

    def get_response(self, snapshot: TurnSnapshot) -> ResponseCandidate | None:
        state = dict(snapshot.rg_state)
        phase = state.get("phase")
        if not snapshot.in_control(self.name) or phase in (None, "idle"):
            return None
        entity = snapshot.index.get(state.get("entity", ""))
        if entity is None:
            return None
        act = snapshot.annotations.dialogue_act

        if phase == "offered_til":
            if act == "pos_answer":
                return self._give_til(snapshot, state, entity)
            state["phase"] = "idle"
            return self._wrap(state, "No problem, we can skip it.")

        if phase == "offered_more_tils":
            if act == "pos_answer":
                return self._give_til(snapshot, state, entity)
            state["phase"] = "idle"
            return self._wrap(state, "Alright!")

        if phase == "offered_entity":
            if act in ("pos_answer", "statement", "opinion"):
                return self._ask_open_question(state, entity, keep=True)
            state["phase"] = "idle"
            return self._wrap(state, "No worries.")

        if phase == "asked_open":
            return self._handle_open_answer(snapshot, state, entity)

        return None

    def _give_til(self, snapshot, state: dict, entity: Entity) -> ResponseCandidate:
        given = set(state.get("tils_given", ()))
        remaining = [t for t in entity.tils if t not in given]
        if not remaining:
            if entity.article_sentences:
                return self._ask_open_question(state, entity, keep=True)
            state["phase"] = "idle"
            return self._wrap(state, "Hmm, I've told you everything I know about that one!")
        til = remaining[0]
        state["tils_given"] = sorted(given | {til})
        more = [t for t in entity.tils if t not in state["tils_given"]]
        if more:
            state["phase"] = "offered_more_tils"
            text = f"Here's something I learned recently. {til} Want to hear another one?"
        elif entity.article_sentences:
            state["phase"] = "asked_open"
            ordinal = state.get("open_q_count", 0)
            state["open_q_count"] = ordinal + 1
            text = (f"Here's something I learned recently. {til} "
                    f"{self.bank.question_for(entity, ordinal)}")
        else:
            state["phase"] = "idle"
            return self._wrap(state, f"Here's something I learned recently. {til}")
        return ResponseCandidate(
            rg=self.name, text=text, priority=ResponsePriority.STRONG_CONTINUE,
            directive=EntityDirective.keep(), new_rg_state=state,
        )

    def _ask_open_question(self, state: dict, entity: Entity, keep: bool) -> ResponseCandidate:
        ordinal = state.get("open_q_count", 0)
        state.update({"phase": "asked_open", "entity": entity.id,
                      "open_q_count": ordinal + 1})
        return ResponseCandidate(
            rg=self.name,
            text=self.bank.question_for(entity, ordinal),
            priority=ResponsePriority.STRONG_CONTINUE,
            directive=EntityDirective.keep() if keep else EntityDirective.set(entity.id),
            new_rg_state=state,
        )

    def _handle_open_answer(self, snapshot, state: dict, entity: Entity) -> ResponseCandidate | None:
        match = select_snippet(snapshot.utterance, entity.article_sentences, self.stopwords)
        pivot = self._pivot_entity(snapshot, state, exclude=entity.id)
        if match is not None:
            snippet, _ = match
            discussed = set(state.get("discussed", ())) | {entity.id}
            state["discussed"] = sorted(discussed)
            if pivot is not None:
                ordinal = state.get("open_q_count", 0)
                state.update({"phase": "asked_open", "entity": pivot.id,
                              "open_q_count": ordinal + 1,
                              "discussed": sorted(discussed)})
                question = self.bank.question_for(pivot, ordinal)
                return ResponseCandidate(
                    rg=self.name,
                    text=f"I liked that {snippet} {question}",
                    priority=ResponsePriority.STRONG_CONTINUE,
                    directive=EntityDirective.set(pivot.id),
                    new_rg_state=state,
                )
            state["phase"] = "idle"
            return self._wrap(state, f"I liked that {snippet}")
        if entity.tils:
            return self._give_til(snapshot, state, entity)
        state["phase"] = "idle"
        return self._wrap(state, "That's a really interesting way to see it.")

    def _pivot_entity(self, snapshot, state: dict, exclude: str) -> Entity | None:
        discussed = set(state.get("discussed", ())) | {exclude}
        for candidate in snapshot.annotations.linker.candidates:
            if candidate.entity_id in discussed:
                continue
            if candidate.entity_id in snapshot.tracker.finished:
                continue
            entity = snapshot.index.get(candidate.entity_id)
            if entity is not None and entity.article_sentences:
                return entity
        return None

    def _wrap(self, state: dict, text: str) -> ResponseCandidate:
        return ResponseCandidate(
            rg=self.name, text=text, priority=ResponsePriority.WEAK_CONTINUE,
            needs_prompt=True, directive=EntityDirective.keep(), new_rg_state=state,
        )

    # --- prompts -----------------------------------------------------------

    def get_prompt(self, snapshot: TurnSnapshot) -> PromptCandidate | None:
        state = dict(snapshot.rg_state)
        offered = set(state.get("prompt_offered", ()))
        entity = snapshot.current_entity

        if (_has_content(entity) and entity.id not in offered
                and state.get("entity") != entity.id):
            state.update({
                "phase": "offered_til" if entity.tils else "offered_entity",
                "entity": entity.id,
                "prompt_offered": sorted(offered | {entity.id}),
            })
            return PromptCandidate(
                rg=self.name,
                text=f"Wanna know something interesting about {entity.display_name.lower()}?",
                priority=PromptPriority.CURRENT_TOPIC,
                directive=EntityDirective.keep(),
                new_rg_state=state,
            )

        mentioned = self._unvisited_mention(snapshot, state, offered)
        if mentioned is not None:
            state.update({
                "phase": "offered_entity",
                "entity": mentioned.id,
                "prompt_offered": sorted(offered | {mentioned.id}),
            })
            return PromptCandidate(
                rg=self.name,
                text=(f"I remember you mentioned {mentioned.display_name}. "
                      "Would you like to talk more about it?"),
                priority=PromptPriority.CONTEXTUAL,
                directive=EntityDirective.set(mentioned.id),
                new_rg_state=state,
            )
        return None

    def _unvisited_mention(self, snapshot, state: dict, offered: set) -> Entity | None:
        discussed = set(state.get("discussed", ())) | offered
        current = snapshot.tracker.current
        for entity_id, _turn in snapshot.tracker.user_mentioned:
            if entity_id == current or entity_id in discussed:
                continue
            if entity_id in snapshot.tracker.finished:
                continue
            entity = snapshot.index.get(entity_id)
            if _has_content(entity):
                return entity
        return None
