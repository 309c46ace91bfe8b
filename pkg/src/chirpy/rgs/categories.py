"""Categories: handwritten topic-opener questions.

Three surface strategies exist for raising a category: just the question,
just a statement, or the statement followed by the question (the form
that draws out the most new entities). The strategy is fixed per
conversation via config or a seeded draw. The generator's own response
duty is small: if its question flopped it acknowledges a don't-know and
tries a fresh category, and once the user names something it gets out of
the way so entity-driven generators take over.
"""

from __future__ import annotations

from enum import Enum
from pathlib import Path

import yaml

from ..manager import (
    PromptCandidate,
    PromptPriority,
    ResponseCandidate,
    ResponsePriority,
)
from ..tracker import EntityDirective
from .base import ResponseGenerator, TurnSnapshot

_DATA_DIR = Path(__file__).parent.parent / "data"


class CategoryStrategy(Enum):
    QUESTION = "QUESTION"
    STATEMENT = "STATEMENT"
    STATEMENT_QUESTION = "STATEMENT_QUESTION"


def load_category_bank(path: str | Path | None = None) -> dict:
    return yaml.safe_load((Path(path) if path else _DATA_DIR / "categories.yaml").read_text())


def category_surface(category: dict, strategy: CategoryStrategy | str) -> str:
    """The strategy's surface form for one category entry."""
    if isinstance(strategy, str):
        strategy = CategoryStrategy[strategy]
    if strategy is CategoryStrategy.QUESTION:
        return category["question"]
    if strategy is CategoryStrategy.STATEMENT:
        return category["statement"]
    return f"{category['statement']} {category['question']}"


class CategoriesRG(ResponseGenerator):
    name = "Categories"

    def __init__(self, bank: dict | None = None):
        bank = bank or load_category_bank()
        self.lead_in: str = bank["lead_in"]
        self.categories: list[dict] = bank["categories"]

    def _strategy(self, snapshot: TurnSnapshot, state: dict) -> CategoryStrategy:
        if "strategy" in state:
            return CategoryStrategy[state["strategy"]]
        configured = snapshot.config.get("categories_strategy")
        if configured:
            chosen = CategoryStrategy[configured]
        else:
            chosen = snapshot.rng.choice(list(CategoryStrategy))
        state["strategy"] = chosen.name
        return chosen

    def _next_category(self, snapshot: TurnSnapshot, used: set) -> dict | None:
        for category in self.categories:
            if category["name"] in used:
                continue
            return category
        return None

    def get_response(self, snapshot: TurnSnapshot) -> ResponseCandidate | None:
        state = dict(snapshot.rg_state)
        if not snapshot.in_control(self.name) or state.get("phase") != "awaiting_answer":
            return None
        if snapshot.entity_set_by_user:
            return None  # the user named something; let entity generators run
        if snapshot.annotations.dialogue_act != "uncertain":
            return None  # defer unparseable replies to the fallbacks
        used = set(state.get("used", ()))
        strategy = self._strategy(snapshot, state)
        category = self._next_category(snapshot, used)
        if category is None:
            state["phase"] = "idle"
            return ResponseCandidate(
                rg=self.name,
                text="No worries, it's a hard question!",
                priority=ResponsePriority.STRONG_CONTINUE,
                needs_prompt=True,
                directive=EntityDirective.clear(),
                new_rg_state=state,
            )
        state.update({"used": sorted(used | {category["name"]}), "phase": "awaiting_answer"})
        directive = (EntityDirective.set(category["entity"])
                     if category.get("entity") in snapshot.index else EntityDirective.clear())
        return ResponseCandidate(
            rg=self.name,
            text=f"That's okay, it can be hard to pick! {category_surface(category, strategy)}",
            priority=ResponsePriority.STRONG_CONTINUE,
            directive=directive,
            new_rg_state=state,
        )

    def get_prompt(self, snapshot: TurnSnapshot) -> PromptCandidate | None:
        state = dict(snapshot.rg_state)
        used = set(state.get("used", ()))
        strategy = self._strategy(snapshot, state)

        current = snapshot.current_entity
        if current is not None:
            for category in self.categories:
                if category["name"] in used:
                    continue
                if category["name"] in current.categories or category.get("entity") == current.id:
                    state.update({"used": sorted(used | {category["name"]}),
                                  "phase": "awaiting_answer"})
                    return PromptCandidate(
                        rg=self.name,
                        text=category_surface(category, strategy),
                        priority=PromptPriority.CURRENT_TOPIC,
                        directive=EntityDirective.keep(),
                        new_rg_state=state,
                    )

        category = self._next_category(snapshot, used)
        if category is None:
            return None
        state.update({"used": sorted(used | {category["name"]}), "phase": "awaiting_answer"})
        directive = (EntityDirective.set(category["entity"])
                     if category.get("entity") in snapshot.index else EntityDirective.clear())
        return PromptCandidate(
            rg=self.name,
            text=f"{self.lead_in} {category_surface(category, strategy)}",
            priority=PromptPriority.GENERIC,
            directive=directive,
            new_rg_state=state,
        )
