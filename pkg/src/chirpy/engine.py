"""Engine: wires config into an index, pipeline, generator registry, state
store, and conversation log, and drives complete turns against sessions."""

from __future__ import annotations

import logging
from pathlib import Path

from . import config as config_mod
from .corpus import EntityIndex, load_index
from .linker import LinkerConfig, load_stopwords, load_unigram_freqs
from .manager import (
    DEFAULT_TIE_BREAK_ORDER,
    PromptPriority,
    SamplerConfig,
    TurnConfig,
    TurnDebug,
    run_turn,
)
from .pipeline.offense import OffenseClassifier, load_blacklist
from .pipeline.runner import AnnotatorPipeline
from .rgs import MockGenerator, ScriptedGenerator, build_registry
from .rgs.categories import load_category_bank
from .rgs.movies import load_movie_kb
from .rgs.opinion import load_whitelist
from .store import ConversationLog, SessionRecord, StateStore, make_log_entry

logger = logging.getLogger(__name__)

_PRIORITY_KEYS = {
    "current_topic": PromptPriority.CURRENT_TOPIC,
    "contextual": PromptPriority.CONTEXTUAL,
    "generic": PromptPriority.GENERIC,
}

# per-session override keys accepted from requests / the REPL / fixtures
SESSION_OVERRIDE_KEYS = (
    "seed",
    "time_of_day",
    "opinion_policy",
    "offense_strategy",
    "categories_strategy",
    "emotion_starter_strategy",
)


def build_adapter(adapter_config: dict):
    kind = adapter_config.get("kind", "mock")
    if kind == "mock":
        return MockGenerator(question_ratio=float(adapter_config.get("question_ratio", 0.6)))
    if kind == "scripted":
        return ScriptedGenerator(
            script=adapter_config.get("script") or {},
            default=adapter_config.get("default_samples") or None,
        )
    raise ValueError(f"unknown adapter kind: {kind!r}")


def build_sampler_config(config: dict) -> SamplerConfig:
    sampler = config.get("sampler", {})
    weights_raw = sampler.get("priority_weights", {})
    weights = {
        _PRIORITY_KEYS[key]: float(value)
        for key, value in weights_raw.items()
        if key in _PRIORITY_KEYS
    }
    rg_weights = {
        _PRIORITY_KEYS[key]: dict(value)
        for key, value in (sampler.get("rg_weights") or {}).items()
        if key in _PRIORITY_KEYS
    }
    tie_break = tuple(config.get("tie_break_order") or DEFAULT_TIE_BREAK_ORDER)
    return SamplerConfig(
        priority_weights=weights,
        rg_weights_by_priority=rg_weights,
        tie_break_order=tie_break,
        rng_seed=config.get("seed"),
    )


class Engine:
    def __init__(self, config: dict | None = None):
        self.config = config or config_mod.load_config()
        resources = self.config.get("resources", {})

        index_path = self.config.get("index_path") or config_mod.default_index_path()
        self.index: EntityIndex = load_index(index_path)

        stopwords = load_stopwords(resources.get("stopwords_path") or None)
        linker_config = LinkerConfig(stopwords=stopwords, unigram_freqs=load_unigram_freqs())
        blacklist_path = resources.get("blacklist_path")
        offense = OffenseClassifier(load_blacklist(blacklist_path) if blacklist_path else None)
        self.pipeline = AnnotatorPipeline(
            linker_config=linker_config,
            offense_classifier=offense,
            annotator_timeout=float(self.config.get("annotator_timeout", 0.2)),
        )

        whitelist_path = resources.get("opinion_whitelist_path")
        kb_path = resources.get("movies_kb_path")
        categories_path = resources.get("categories_path")
        self.adapter = build_adapter(self.config.get("adapter", {}))
        self.registry = build_registry(
            adapter=self.adapter,
            opinion_whitelist=load_whitelist(whitelist_path) if whitelist_path else None,
            movie_kb=load_movie_kb(kb_path) if kb_path else None,
            category_bank=load_category_bank(categories_path) if categories_path else None,
        )

        self.sampler_config = build_sampler_config(self.config)
        self.store = StateStore(self.config.get("store_path") or ":memory:")
        log_path = self.config.get("log_path")
        self.log = ConversationLog(log_path) if log_path else None

    # -- session plumbing ---------------------------------------------------

    def _session_defaults(self) -> dict:
        strategies = self.config.get("strategies", {})
        overrides = {k: v for k, v in strategies.items() if v}
        overrides["time_of_day"] = self.config.get("time_of_day") or "afternoon"
        return overrides

    def open_session(self, session_id: str, config_overrides: dict | None = None) -> SessionRecord:
        existing = self.store.fetch(session_id)
        if existing is not None:
            return existing
        overrides = self._session_defaults()
        for key, value in (config_overrides or {}).items():
            if key in SESSION_OVERRIDE_KEYS and value is not None:
                overrides[key] = value
        return SessionRecord(session_id=session_id, config_overrides=overrides)

    def turn_config(self, session: SessionRecord) -> TurnConfig:
        seed = session.config_overrides.get("seed")
        if seed is None:
            seed = self.config.get("seed", 0)
        return TurnConfig(
            pipeline=self.pipeline,
            sampler=self.sampler_config,
            rg_timeout=float(self.config.get("rg_timeout", 1.0)),
            seed=int(seed),
            collect_debug=bool(self.config.get("debug", True)),
        )

    # -- the public turn API --------------------------------------------------

    def handle_turn(
        self,
        session_id: str,
        user_utterance: str,
        config_overrides: dict | None = None,
    ) -> tuple[str, bool, TurnDebug]:
        """Fetch state, run one turn, persist state, log, and reply."""
        session = self.open_session(session_id, config_overrides)
        if session.ended:
            debug = TurnDebug(turn_number=session.turn_number, user_utterance=user_utterance)
            debug.conversation_ended = True
            return "This conversation has ended. Start a new session to keep chatting!", True, debug
        bot, new_session, debug = run_turn(
            session, user_utterance, self.registry, self.index, self.turn_config(session)
        )
        self.store.write(new_session)
        if self.log is not None:
            self.log.append(make_log_entry(session_id, user_utterance, bot, debug))
        return bot, new_session.ended, debug

    def close(self) -> None:
        self.store.close()
