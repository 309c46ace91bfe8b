"""Entity index: loads line-delimited entity records and serves exact and
phonetic anchortext lookups.

Record format (one JSON object per line, UTF-8):
    {"id": "Cat", "pageviews": 10000, "anchortexts": {"cat": 100, "cats": 40},
     "categories": ["animal"], "article_sentences": [...], "tils": [...]}
categories, article_sentences and tils are optional and default to empty.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from . import phonetics


class IndexLoadError(Exception):
    """Raised for malformed or duplicate entity records; names the line."""


@dataclass(frozen=True, eq=False)
class Entity:
    id: str
    pageviews: int
    anchortexts: dict[str, int]
    categories: frozenset[str] = field(default_factory=frozenset)
    article_sentences: tuple[str, ...] = ()
    tils: tuple[str, ...] = ()

    # id is unique within an index, so identity tracks it for sets/dicts
    def __hash__(self) -> int:
        return hash(self.id)

    def __eq__(self, other) -> bool:
        return isinstance(other, Entity) and self.id == other.id

    @property
    def total_anchortext_count(self) -> int:
        return sum(self.anchortexts.values())

    @property
    def display_name(self) -> str:
        """Name as spoken in bot utterances: drops any disambiguation suffix."""
        return self.id.split(" (")[0]


def anchortext_prob(entity: Entity, anchortext: str) -> float:
    """P(anchortext | entity): link count normalized over the entity's
    anchortext distribution. 0.0 when the string is not an anchortext."""
    count = entity.anchortexts.get(anchortext)
    if count is None:
        return 0.0
    return count / entity.total_anchortext_count


class EntityIndex:
    """Immutable after build; safe for unsynchronized concurrent reads."""

    def __init__(self, entities: list[Entity]):
        self.entities: dict[str, Entity] = {}
        self.anchortext_postings: dict[str, set[str]] = {}
        # per-word metaphone code -> {(anchortext, entity id)}; token-level
        # keys let a span with one garbled word still reach the entity
        self.phonetic_postings: dict[str, set[tuple[str, str]]] = {}
        self._anchortext_keys: dict[str, phonetics.PhoneticKey] = {}
        for entity in entities:
            if entity.id in self.entities:
                raise IndexLoadError(f"duplicate entity id: {entity.id!r}")
            self.entities[entity.id] = entity
            for anchor in entity.anchortexts:
                self.anchortext_postings.setdefault(anchor, set()).add(entity.id)
                key = self._anchortext_keys.get(anchor)
                if key is None:
                    key = phonetics.encode(anchor)
                    self._anchortext_keys[anchor] = key
                for code in set(key.token_codes):
                    self.phonetic_postings.setdefault(code, set()).add((anchor, entity.id))

    def __len__(self) -> int:
        return len(self.entities)

    def __contains__(self, entity_id: str) -> bool:
        return entity_id in self.entities

    def get(self, entity_id: str) -> Entity | None:
        return self.entities.get(entity_id)

    def anchortext_key(self, anchortext: str) -> phonetics.PhoneticKey:
        return self._anchortext_keys[anchortext]

    def lookup_exact(self, span: str) -> set[Entity]:
        """All entities having the (lowercased) span among their anchortexts."""
        return {self.entities[eid] for eid in self.anchortext_postings.get(span, ())}

    def lookup_phonetic(self, span: str) -> set[tuple[str, Entity]]:
        """(anchortext, entity) pairs sharing a phonetic token code with the span."""
        key = phonetics.encode(span)
        hits: set[tuple[str, Entity]] = set()
        for code in set(key.token_codes):
            for anchor, eid in self.phonetic_postings.get(code, ()):
                hits.add((anchor, self.entities[eid]))
        return hits


def _parse_record(obj: dict, line_no: int) -> Entity:
    try:
        entity_id = obj["id"]
        pageviews = obj["pageviews"]
        anchortexts = obj["anchortexts"]
    except (KeyError, TypeError) as exc:
        raise IndexLoadError(f"line {line_no}: missing field {exc}") from exc
    if not isinstance(entity_id, str) or not entity_id:
        raise IndexLoadError(f"line {line_no}: id must be a non-empty string")
    if not isinstance(pageviews, int) or pageviews < 0:
        raise IndexLoadError(f"line {line_no}: pageviews must be a non-negative integer")
    if not isinstance(anchortexts, dict) or not anchortexts:
        raise IndexLoadError(f"line {line_no}: at least one anchortext required")
    for anchor, count in anchortexts.items():
        if anchor != anchor.lower():
            raise IndexLoadError(f"line {line_no}: anchortext {anchor!r} not lowercased")
        if not isinstance(count, int) or count <= 0:
            raise IndexLoadError(f"line {line_no}: anchortext count for {anchor!r} must be positive")
    return Entity(
        id=entity_id,
        pageviews=pageviews,
        anchortexts=dict(anchortexts),
        categories=frozenset(obj.get("categories") or ()),
        article_sentences=tuple(obj.get("article_sentences") or ()),
        tils=tuple(obj.get("tils") or ()),
    )


def load_index(path: str | Path) -> EntityIndex:
    """Build an EntityIndex from a line-delimited record file.

    Idempotent for the same file. Malformed records and duplicate ids
    raise IndexLoadError naming the offending line.
    """
    entities = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise IndexLoadError(f"line {line_no}: invalid JSON ({exc.msg})") from exc
            entities.append(_parse_record(obj, line_no))
    return EntityIndex(entities)


def save_index(index: EntityIndex, path: str | Path) -> None:
    """Write the index back out as canonical line-delimited records."""
    with open(path, "w", encoding="utf-8") as fh:
        for entity in index.entities.values():
            record = {
                "id": entity.id,
                "pageviews": entity.pageviews,
                "anchortexts": entity.anchortexts,
                "categories": sorted(entity.categories),
                "article_sentences": list(entity.article_sentences),
                "tils": list(entity.tils),
            }
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")
