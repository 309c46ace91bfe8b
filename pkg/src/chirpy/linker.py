"""Entity linker: maps an utterance to a priority-ordered list of
(span, entity) candidates.

Exact channel: score(s, E) = pageviews(E) * P(s | E) with P taken from the
anchortext link-count distribution. Phonetic channel (consulted only for
spans with no exact match): anchortexts are retrieved by shared metaphone
token codes, each anchortext is assigned its best-matching span, pairs
below 0.8 similarity are dropped, and the surviving count*sim weights are
normalized per entity before the pageview product.

Ordering is a total, deterministic key over the curated features:
expected-type match, containment in a larger linked span, score, span
length, then the span text itself. Spans whose most common unigram is too
frequent are demoted below everything else rather than dropped.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from . import phonetics
from .corpus import Entity, EntityIndex, anchortext_prob

_DATA_DIR = Path(__file__).parent / "data"

PHONETIC_SIM_THRESHOLD = 0.8
MAX_SPAN_TOKENS = 5
DEFAULT_MAX_UNIGRAM_FREQ = 0.001


def _load_token_file(path: str | Path) -> dict[str, float]:
    """Token (+ optional count/frequency) per line; '#' starts a comment."""
    table: dict[str, float] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            table[parts[0]] = float(parts[1]) if len(parts) > 1 else 0.0
    return table


def load_stopwords(path: str | Path | None = None) -> frozenset[str]:
    return frozenset(_load_token_file(path or _DATA_DIR / "stopwords.txt"))


def load_unigram_freqs(path: str | Path | None = None) -> dict[str, float]:
    return _load_token_file(path or _DATA_DIR / "unigram_freq.txt")


class LinkMethod(Enum):
    EXACT = "exact"
    PHONETIC = "phonetic"


@dataclass(frozen=True)
class LinkedSpan:
    span: str
    entity_id: str
    score: float
    method: LinkMethod
    expected_type_match: bool = False
    max_unigram_freq: float = 0.0


@dataclass(frozen=True)
class LinkerOutput:
    candidates: tuple[LinkedSpan, ...] = ()

    def top(self) -> LinkedSpan | None:
        return self.candidates[0] if self.candidates else None

    def entity_ids(self) -> list[str]:
        return [c.entity_id for c in self.candidates]


def candidate_spans(utterance: str, stopwords: frozenset[str]) -> set[str]:
    """All 1..5-gram spans of the whitespace-tokenized utterance, minus
    spans consisting only of stopwords."""
    tokens = utterance.split()
    spans = set()
    for n in range(1, MAX_SPAN_TOKENS + 1):
        for i in range(len(tokens) - n + 1):
            words = tokens[i:i + n]
            if all(w in stopwords for w in words):
                continue
            spans.add(" ".join(words))
    return spans


def score_exact(index: EntityIndex, span: str) -> list[tuple[Entity, float]]:
    """pageviews(E) * P(span | E) for every entity holding span as anchortext."""
    return [
        (entity, entity.pageviews * anchortext_prob(entity, span))
        for entity in sorted(index.lookup_exact(span), key=lambda e: e.id)
    ]


def score_phonetic(
    index: EntityIndex, spans: set[str]
) -> list[tuple[str, Entity, float]]:
    """Phonetically recovered (span, entity, score) triples for the given spans."""
    span_keys = {s: phonetics.encode(s) for s in spans}
    span_keys = {s: k for s, k in span_keys.items() if not k.empty}
    if not span_keys:
        return []

    retrieved: set[tuple[str, str]] = set()
    for span, key in span_keys.items():
        for code in set(key.token_codes):
            retrieved.update(index.phonetic_postings.get(code, ()))

    # each anchortext goes to its best-matching span; < 0.8 sim is discarded
    best_span: dict[str, tuple[str, float]] = {}
    for anchor in {a for a, _ in retrieved}:
        anchor_key = index.anchortext_key(anchor)
        best = max(
            ((s, phonetics.key_sim(k, anchor_key)) for s, k in span_keys.items()),
            key=lambda pair: (pair[1], pair[0]),
        )
        if best[1] >= PHONETIC_SIM_THRESHOLD:
            best_span[anchor] = best

    # per entity: weight(a) = count(a -> E) * sim(s*(a), a), normalized over
    # the entity's surviving anchortexts; P(s|E) takes the max weight per span
    by_entity: dict[str, dict[str, float]] = {}
    totals: dict[str, float] = {}
    for anchor, eid in retrieved:
        if anchor not in best_span:
            continue
        span, similarity = best_span[anchor]
        weight = index.entities[eid].anchortexts[anchor] * similarity
        spans_for_entity = by_entity.setdefault(eid, {})
        spans_for_entity[span] = max(spans_for_entity.get(span, 0.0), weight)
        totals[eid] = totals.get(eid, 0.0) + weight

    results = []
    for eid, span_weights in by_entity.items():
        entity = index.entities[eid]
        for span, weight in span_weights.items():
            score = entity.pageviews * (weight / totals[eid])
            if score > 0:
                results.append((span, entity, score))
    results.sort(key=lambda triple: (-triple[2], triple[0], triple[1].id))
    return results


@dataclass
class LinkerConfig:
    stopwords: frozenset[str] = field(default_factory=load_stopwords)
    unigram_freqs: dict[str, float] = field(default_factory=load_unigram_freqs)
    max_unigram_freq: float = DEFAULT_MAX_UNIGRAM_FREQ


def _max_unigram_freq(
    span: str, freqs: dict[str, float], stopwords: frozenset[str]
) -> float:
    # measured over content words only: stopwords inside a span are already
    # tolerated by candidate generation and would otherwise demote every
    # "the X" span regardless of how specific X is
    return max(
        (freqs.get(tok, 0.0) for tok in span.split() if tok not in stopwords),
        default=0.0,
    )


def _contained_in(span: str, other: str) -> bool:
    if span == other:
        return False
    span_toks, other_toks = span.split(), other.split()
    n, m = len(span_toks), len(other_toks)
    return any(other_toks[i:i + n] == span_toks for i in range(m - n + 1))


def link(
    index: EntityIndex,
    utterance: str,
    expected_types: frozenset[str] | set[str] = frozenset(),
    config: LinkerConfig | None = None,
) -> LinkerOutput:
    """Run both channels over the utterance and return ordered candidates.

    Exact wins on (span, entity) duplicates, and only the best-ranked span
    per entity is kept. Deterministic for a fixed index and utterance.
    """
    config = config or LinkerConfig()
    spans = candidate_spans(utterance, config.stopwords)
    if not spans:
        return LinkerOutput()

    scored: dict[tuple[str, str], tuple[float, LinkMethod]] = {}
    spans_with_exact = set()
    for span in spans:
        for entity, score in score_exact(index, span):
            if score > 0:
                scored[(span, entity.id)] = (score, LinkMethod.EXACT)
                spans_with_exact.add(span)

    # best-matching spans are computed over all spans so that an anchortext
    # sticks to its literal mention; recovered candidates are then kept only
    # for spans with no exact evidence of their own
    for span, entity, score in score_phonetic(index, spans):
        if span in spans_with_exact:
            continue
        if (span, entity.id) not in scored and score > 0:
            scored[(span, entity.id)] = (score, LinkMethod.PHONETIC)

    linked_spans = {span for span, _ in scored}
    candidates = []
    for (span, eid), (score, method) in scored.items():
        entity = index.entities[eid]
        candidates.append(LinkedSpan(
            span=span,
            entity_id=eid,
            score=score,
            method=method,
            expected_type_match=bool(entity.categories & set(expected_types)),
            max_unigram_freq=_max_unigram_freq(span, config.unigram_freqs, config.stopwords),
        ))

    def sort_key(c: LinkedSpan):
        demoted = c.max_unigram_freq > config.max_unigram_freq
        contained = any(_contained_in(c.span, other) for other in linked_spans)
        return (
            demoted,                          # too-common unigrams go last
            not c.expected_type_match,
            contained,                        # larger spans beat their sub-spans
            -c.score,
            c.method is not LinkMethod.EXACT,  # exact above phonetic at equal score
            -len(c.span),
            c.span,
            c.entity_id,
        )

    candidates.sort(key=sort_key)

    seen_entities = set()
    deduped = []
    for c in candidates:
        if c.entity_id in seen_entities:
            continue
        seen_entities.add(c.entity_id)
        deduped.append(c)
    return LinkerOutput(tuple(deduped))
