"""Movies: a scripted dialogue graph about films, backed by a small
local knowledge base (movie -> actors, fun fact)."""

from __future__ import annotations

import json
import re
from pathlib import Path

from ..manager import ResponseCandidate, ResponsePriority
from ..tracker import EntityDirective
from ..treelets import StepContext, TreeletGraph, load_graph
from .base import ResponseGenerator, TurnSnapshot

_DATA_DIR = Path(__file__).parent.parent / "data"

ACTIVATION_KEYWORDS = re.compile(r"\b(?:movie|movies|film|films|cinema)\b")

INTRO_TEXT = (
    "Me too! I love watching movies; I get to learn so much about what the "
    "world is like outside of the cloud! Have you seen any movies recently?"
)
REJECTION_TEXT = "OK, no problem."


def load_movie_kb(path: str | Path | None = None) -> dict:
    return json.loads((Path(path) if path else _DATA_DIR / "movies_kb.json").read_text())


class MoviesRG(ResponseGenerator):
    name = "Movies"

    def __init__(self, graph: TreeletGraph | None = None, kb: dict | None = None):
        self.graph = graph or load_graph(_DATA_DIR / "treelets" / "movies.yaml")
        defects = self.graph.validate()
        if defects:
            raise ValueError(f"movies treelet graph is malformed: {defects}")
        self.kb = kb if kb is not None else load_movie_kb()

    def _fill_kb_slots(self, state: dict, snapshot: TurnSnapshot) -> dict:
        """Resolve {movie}/{actor}/{fun_fact} slots for the active movie."""
        entity = snapshot.current_entity
        if entity is not None and "film" in entity.categories:
            state["movie_id"] = entity.id
        movie_id = state.get("movie_id")
        if movie_id:
            movie = snapshot.index.get(movie_id)
            state["movie"] = movie.display_name if movie else movie_id
            kb_row = self.kb.get(movie_id, {})
            actors = kb_row.get("actors") or []
            if actors:
                state["actor_id"] = actors[0]
                actor = snapshot.index.get(actors[0])
                state["actor"] = actor.display_name if actor else actors[0]
            state["fun_fact"] = kb_row.get(
                "fun_fact", f"I could talk about {state['movie']} all day."
            )
        return state

    def _topic_dropped(self, snapshot: TurnSnapshot) -> bool:
        if snapshot.annotations.nav_intent.negative:
            return True
        entity = snapshot.current_entity
        if entity is None:
            return False
        movie_related = {"film", "actor", "fictional character"}
        return not (entity.categories & movie_related) and snapshot.entity_set_by_user

    def get_response(self, snapshot: TurnSnapshot) -> ResponseCandidate | None:
        state = dict(snapshot.rg_state)
        node = state.get("node")
        active = snapshot.in_control(self.name) and node

        if active:
            if self._topic_dropped(snapshot):
                state["node"] = None
                return ResponseCandidate(
                    rg=self.name,
                    text=REJECTION_TEXT,
                    priority=ResponsePriority.STRONG_CONTINUE,
                    needs_prompt=True,
                    directive=EntityDirective.clear(),
                    new_rg_state=state,
                )
            state = self._fill_kb_slots(state, snapshot)
            result = self.graph.step(node, StepContext(
                utterance=snapshot.utterance,
                annotations=snapshot.annotations,
                rg_state=state,
                current_entity=snapshot.current_entity,
            ))
            if result.text is None:
                return None
            return ResponseCandidate(
                rg=self.name,
                text=result.text,
                priority=ResponsePriority.STRONG_CONTINUE,
                needs_prompt=result.needs_prompt,
                directive=result.directive,
                new_rg_state=result.rg_state,
            )

        # activation: movie keyword, or the user raised a film entity
        entity = snapshot.current_entity
        if ACTIVATION_KEYWORDS.search(snapshot.utterance):
            state.update({"node": "ask_movie"})
            return ResponseCandidate(
                rg=self.name,
                text=INTRO_TEXT,
                priority=ResponsePriority.FORCE_START,
                directive=EntityDirective.set("Film") if "Film" in snapshot.index
                else EntityDirective.keep(),
                new_rg_state=state,
                expected_types_next=frozenset({"film"}),
            )
        if (entity is not None and "film" in entity.categories
                and snapshot.entity_set_by_user):
            state = self._fill_kb_slots(dict(state, node="ask_movie"), snapshot)
            result = self.graph.step("ask_movie", StepContext(
                utterance=snapshot.utterance,
                annotations=snapshot.annotations,
                rg_state=state,
                current_entity=entity,
            ))
            if result.text is None:
                return None
            return ResponseCandidate(
                rg=self.name,
                text=result.text,
                priority=ResponsePriority.FORCE_START,
                needs_prompt=result.needs_prompt,
                directive=result.directive,
                new_rg_state=result.rg_state,
            )
        return None
