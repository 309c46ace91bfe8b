"""Annotator DAG execution.

Annotators declare dependencies and receive a context restricted to the
shared inputs plus their declared dependencies' outputs, so an annotator
cannot read a value outside its dependency closure. Each annotator runs
under its own timeout; failure or timeout substitutes that annotator's
neutral default and never aborts the turn.
"""

from __future__ import annotations

import logging
import random
import time
from concurrent.futures import ThreadPoolExecutor
from concurrent.futures import TimeoutError as FutureTimeoutError
from dataclasses import dataclass, field
from typing import Any, Callable

from ..corpus import EntityIndex
from ..linker import LinkerConfig, LinkerOutput, link
from . import dialogue_act as da
from . import nav_intent as nav
from .offense import OffenseClassifier
from .question import detect_question
from .sentiment import SentimentLexicon, classify_sentiment
from .types import Annotations, NavIntent, OffenseResult, PriorTurn, QuestionType, Sentiment

logger = logging.getLogger(__name__)

SHARED_KEYS = ("utterance", "prior", "index")
DEFAULT_ANNOTATOR_TIMEOUT = 0.2  # seconds
DEFAULT_TOTAL_BUDGET = 1.0


@dataclass(frozen=True)
class AnnotatorSpec:
    name: str
    fn: Callable[[dict], Any]
    default: Callable[[], Any]
    deps: tuple[str, ...] = ()


class RestrictedContext(dict):
    """Raises on reads outside the declared dependency closure."""

    def __init__(self, allowed: dict, owner: str):
        super().__init__(allowed)
        self._owner = owner

    def __missing__(self, key):
        raise KeyError(
            f"annotator {self._owner!r} read {key!r} outside its declared dependencies"
        )


class AnnotatorPipeline:
    def __init__(
        self,
        nav_rules: nav.NavIntentRules | None = None,
        da_rules: da.DialogueActRules | None = None,
        sentiment_lexicon: SentimentLexicon | None = None,
        offense_classifier: OffenseClassifier | None = None,
        linker_config: LinkerConfig | None = None,
        annotator_timeout: float = DEFAULT_ANNOTATOR_TIMEOUT,
        total_budget: float = DEFAULT_TOTAL_BUDGET,
    ):
        self.nav_rules = nav_rules or nav.default_rules()
        self.da_rules = da_rules or da.default_rules()
        self.sentiment_lexicon = sentiment_lexicon or SentimentLexicon()
        self.offense_classifier = offense_classifier or OffenseClassifier()
        self.linker_config = linker_config or LinkerConfig()
        self.annotator_timeout = annotator_timeout
        self.total_budget = total_budget
        self.annotators = self._build_annotators()
        self._check_dag()

    def _build_annotators(self) -> list[AnnotatorSpec]:
        return [
            AnnotatorSpec(
                "nav_intent",
                lambda ctx: nav.classify_nav_intent(ctx["utterance"], self.nav_rules),
                NavIntent,
            ),
            AnnotatorSpec(
                "question",
                lambda ctx: detect_question(ctx["utterance"]),
                lambda: (False, QuestionType.NONE),
            ),
            AnnotatorSpec(
                "sentiment",
                lambda ctx: classify_sentiment(ctx["utterance"], self.sentiment_lexicon),
                lambda: Sentiment.NEUTRAL,
            ),
            AnnotatorSpec(
                "offense",
                lambda ctx: self.offense_classifier.classify(ctx["utterance"]),
                OffenseResult,
            ),
            AnnotatorSpec(
                "dialogue_act",
                lambda ctx: da.classify_dialogue_act(
                    ctx["prior"].last_bot_utterance, ctx["utterance"], self.da_rules
                ),
                lambda: da.DEFAULT_LABEL,
                deps=("question",),
            ),
            AnnotatorSpec(
                "linker",
                lambda ctx: link(
                    ctx["index"],
                    ctx["utterance"],
                    ctx["prior"].expected_types,
                    self.linker_config,
                ),
                LinkerOutput,
            ),
        ]

    def _check_dag(self) -> None:
        names = {a.name for a in self.annotators}
        for a in self.annotators:
            unknown = set(a.deps) - names
            if unknown:
                raise ValueError(f"annotator {a.name!r} depends on unknown {unknown}")
        # cycle check via repeated ready-set extraction
        remaining = {a.name: set(a.deps) for a in self.annotators}
        while remaining:
            ready = [n for n, deps in remaining.items() if not deps]
            if not ready:
                raise ValueError(f"annotator dependency cycle among {set(remaining)}")
            for n in ready:
                del remaining[n]
            for deps in remaining.values():
                deps.difference_update(ready)

    def annotate(
        self,
        utterance: str,
        prior: PriorTurn | None = None,
        index: EntityIndex | None = None,
        schedule_rng: random.Random | None = None,
    ) -> Annotations:
        """Run all annotators respecting declared dependencies.

        schedule_rng, when given, shuffles the order in which ready
        annotators launch; results must not depend on it.
        """
        prior = prior or PriorTurn()
        index = index if index is not None else EntityIndex([])
        shared = {"utterance": utterance, "prior": prior, "index": index}
        results: dict[str, Any] = {}
        deadline = time.monotonic() + self.total_budget
        specs = {a.name: a for a in self.annotators}
        pending = set(specs)

        with ThreadPoolExecutor(max_workers=len(specs)) as pool:
            while pending:
                ready = [n for n in pending if all(d in results for d in specs[n].deps)]
                if schedule_rng is not None:
                    schedule_rng.shuffle(ready)
                else:
                    ready.sort()
                if not ready:  # unreachable given _check_dag, defensive
                    break
                futures = {}
                for name in ready:
                    spec = specs[name]
                    allowed = dict(shared)
                    allowed.update({d: results[d] for d in spec.deps})
                    ctx = RestrictedContext(allowed, name)
                    futures[name] = pool.submit(spec.fn, ctx)
                for name in ready:
                    spec = specs[name]
                    budget = min(self.annotator_timeout, max(0.0, deadline - time.monotonic()))
                    try:
                        results[name] = futures[name].result(timeout=budget)
                    except FutureTimeoutError:
                        logger.warning("annotator %s timed out; using default", name)
                        futures[name].cancel()
                        results[name] = spec.default()
                    except Exception:
                        logger.exception("annotator %s failed; using default", name)
                        results[name] = spec.default()
                    pending.discard(name)

        is_question, question_type = results["question"]
        return Annotations(
            nav_intent=results["nav_intent"],
            dialogue_act=results["dialogue_act"],
            is_question=is_question,
            question_type=question_type,
            sentiment=results["sentiment"],
            offense=results["offense"],
            linker=results["linker"],
        )
