"""Treelets: one-turn dialogue-tree nodes.

A treelet classifies the user's turn into a branch via ordered
predicates, emits that branch's template as the bot response, and names
the treelet that takes over next turn. Graphs are data (YAML) so dialogue
content can change without code changes; cycles are allowed.

Branch predicates may combine regexes, pipeline annotations (dialogue
act, sentiment, question flag, navigational intent), and properties of
the current entity. A branch with ``default: true`` must close every
treelet so classification is total. ``template: null`` encodes a branch
that deliberately yields no response (the owning generator bows out).
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .corpus import Entity
from .pipeline.types import Annotations, Sentiment
from .tracker import EntityDirective

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StepContext:
    utterance: str
    annotations: Annotations
    rg_state: dict
    current_entity: Entity | None = None

    def slots(self) -> dict:
        values = dict(self.rg_state)
        if self.current_entity is not None:
            values.setdefault("entity", self.current_entity.display_name)
        return values


@dataclass(frozen=True)
class Branch:
    id: str
    when: dict
    template: str | None
    next: str | None
    entity: dict | str | None = None
    needs_prompt: bool = False
    is_default: bool = False

    def matches(self, ctx: StepContext) -> bool:
        if self.is_default:
            return True
        for kind, value in self.when.items():
            if not _evaluate(kind, value, ctx):
                return False
        return True

    def directive(self, ctx: StepContext) -> EntityDirective:
        spec = self.entity
        if spec in (None, "keep"):
            return EntityDirective.keep()
        if spec == "clear":
            return EntityDirective.clear()
        if isinstance(spec, dict) and "set" in spec:
            target = spec["set"]
            if isinstance(target, str) and target.startswith("$"):
                resolved = ctx.rg_state.get(target[1:])
                if not resolved:
                    logger.warning("entity slot %s unresolved; keeping current", target)
                    return EntityDirective.keep()
                return EntityDirective.set(resolved)
            return EntityDirective.set(target)
        raise ValueError(f"bad entity directive spec: {spec!r}")


def _evaluate(kind: str, value, ctx: StepContext) -> bool:
    ann = ctx.annotations
    if kind == "regex":
        return re.search(value, ctx.utterance) is not None
    if kind == "dialogue_act":
        labels = value if isinstance(value, list) else [value]
        return ann.dialogue_act in labels
    if kind == "sentiment":
        return ann.sentiment is Sentiment[value.upper()]
    if kind == "question":
        return ann.is_question is bool(value)
    if kind == "nav_negative":
        return ann.nav_intent.negative is bool(value)
    if kind == "nav_positive":
        return ann.nav_intent.positive is bool(value)
    if kind == "entity_type":
        return ctx.current_entity is not None and value in ctx.current_entity.categories
    if kind == "entity_is":
        current = ctx.current_entity.id if ctx.current_entity else None
        return current == value
    if kind == "entity_missing":
        return (ctx.current_entity is None) is bool(value)
    if kind == "state_equals":
        return all(ctx.rg_state.get(k) == v for k, v in value.items())
    raise ValueError(f"unknown predicate kind: {kind!r}")


@dataclass(frozen=True)
class Treelet:
    name: str
    branches: tuple[Branch, ...]

    def classify(self, ctx: StepContext) -> Branch:
        for branch in self.branches:
            if branch.matches(ctx):
                return branch
        raise LookupError(f"treelet {self.name!r} has no default branch")

    @property
    def default_branch(self) -> Branch | None:
        for branch in self.branches:
            if branch.is_default:
                return branch
        return None


@dataclass(frozen=True)
class StepResult:
    text: str | None
    directive: EntityDirective
    next_treelet: str | None
    rg_state: dict
    branch_id: str
    needs_prompt: bool = False


@dataclass(frozen=True)
class TreeletGraph:
    name: str
    entry: str
    treelets: dict[str, Treelet] = field(default_factory=dict)

    def step(self, current: str, ctx: StepContext) -> StepResult:
        """Classify, render, and advance. Deterministic for fixed inputs.

        A template with an unresolvable slot falls back to the default
        branch with a warning rather than failing the turn.
        """
        treelet = self.treelets[current]
        branch = treelet.classify(ctx)
        text = _render(branch, ctx)
        if text is _RENDER_FAILED:
            fallback = treelet.default_branch
            if fallback is not None and fallback is not branch:
                logger.warning(
                    "treelet %s branch %s had unresolved slots; using default branch",
                    current, branch.id,
                )
                branch = fallback
                text = _render(branch, ctx)
            if text is _RENDER_FAILED:
                text = None
        new_state = dict(ctx.rg_state)
        new_state["node"] = branch.next
        return StepResult(
            text=text,
            directive=branch.directive(ctx),
            next_treelet=branch.next,
            rg_state=new_state,
            branch_id=branch.id,
            needs_prompt=branch.needs_prompt,
        )

    def validate(self) -> list[str]:
        """Structural defects; empty list iff the graph is well-formed."""
        defects = []
        if self.entry not in self.treelets:
            defects.append(f"entry treelet {self.entry!r} does not exist")
        for name, treelet in self.treelets.items():
            if treelet.default_branch is None:
                defects.append(f"treelet {name!r} lacks a default branch")
            for branch in treelet.branches:
                if branch.next is not None and branch.next not in self.treelets:
                    defects.append(
                        f"treelet {name!r} branch {branch.id!r} points at missing "
                        f"treelet {branch.next!r}"
                    )
        reachable = set()
        frontier = [self.entry] if self.entry in self.treelets else []
        while frontier:
            node = frontier.pop()
            if node in reachable:
                continue
            reachable.add(node)
            for branch in self.treelets[node].branches:
                if branch.next in self.treelets and branch.next not in reachable:
                    frontier.append(branch.next)
        for name in self.treelets:
            if name not in reachable:
                defects.append(f"treelet {name!r} is unreachable from entry")
        return defects


class _RenderFailed:
    pass


_RENDER_FAILED = _RenderFailed()


def _render(branch: Branch, ctx: StepContext):
    if branch.template is None:
        return None
    try:
        return branch.template.format_map(ctx.slots())
    except (KeyError, IndexError):
        return _RENDER_FAILED


def load_graph(path: str | Path) -> TreeletGraph:
    """Load and validate a treelet graph resource; defects are fatal here
    because graphs are registered at startup."""
    raw = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
    return build_graph(raw)


def build_graph(raw: dict) -> TreeletGraph:
    treelets = {}
    for name, node in raw["treelets"].items():
        branches = []
        for i, b in enumerate(node["branches"]):
            if "template" not in b:
                raise ValueError(f"treelet {name!r} branch {i} lacks a template key")
            branches.append(Branch(
                id=b.get("id", f"{name}:{i}"),
                when=b.get("when") or {},
                template=b["template"],
                next=b.get("next"),
                entity=b.get("entity"),
                needs_prompt=bool(b.get("needs_prompt", False)),
                is_default=bool(b.get("default", False)),
            ))
        treelets[name] = Treelet(name, tuple(branches))
    graph = TreeletGraph(name=raw.get("name", "graph"), entry=raw["entry"], treelets=treelets)
    return graph
