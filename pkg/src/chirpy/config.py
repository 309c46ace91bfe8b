"""Engine configuration: YAML file, CHIRPY_* environment overrides, and
dotted-path overrides from CLI flags, in increasing precedence."""

from __future__ import annotations

import copy
import os
from pathlib import Path
from typing import Any

import yaml

_DATA_DIR = Path(__file__).parent / "data"

DEFAULTS: dict[str, Any] = {
    "index_path": None,          # null -> bundled demo index
    "store_path": ":memory:",
    "log_path": None,            # null -> store-side logging disabled
    "seed": 0,
    "time_of_day": "afternoon",
    "rg_timeout": 1.0,
    "annotator_timeout": 0.2,
    "debug": True,
    "slow_turn_ms": 1000,
    "sampler": {
        "priority_weights": {"current_topic": 0.8, "contextual": 0.15, "generic": 0.05},
        "rg_weights": {},
    },
    "tie_break_order": None,     # null -> built-in default ordering
    "strategies": {
        "opinion_policy": None,
        "offense_strategy": None,
        "categories_strategy": None,
        "emotion_starter_strategy": None,
    },
    "adapter": {
        "kind": "mock",          # mock | scripted
        "question_ratio": 0.6,
        "script": {},
        "default_samples": [],
    },
    "resources": {
        "blacklist_path": None,
        "stopwords_path": None,
        "opinion_whitelist_path": None,
        "movies_kb_path": None,
        "categories_path": None,
    },
    "server": {"host": "127.0.0.1", "port": 8080},
}

ENV_PREFIX = "CHIRPY_"


def default_index_path() -> Path:
    return _DATA_DIR / "demo_entities.jsonl"


def _deep_merge(base: dict, override: dict) -> dict:
    merged = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def _coerce(raw: str) -> Any:
    return yaml.safe_load(raw)


def apply_env_overrides(config: dict, environ: dict | None = None) -> dict:
    """CHIRPY_FOO=1 sets config['foo']; CHIRPY_SERVER__PORT=9 nests."""
    environ = environ if environ is not None else os.environ
    for key, raw in environ.items():
        if not key.startswith(ENV_PREFIX):
            continue
        path = key[len(ENV_PREFIX):].lower().split("__")
        node = config
        for part in path[:-1]:
            node = node.setdefault(part, {})
        node[path[-1]] = _coerce(raw)
    return config


def apply_set_overrides(config: dict, assignments: list[str]) -> dict:
    """--set sampler.priority_weights.generic=0.1 style overrides."""
    for assignment in assignments:
        if "=" not in assignment:
            raise ValueError(f"--set expects key.path=value, got {assignment!r}")
        dotted, raw = assignment.split("=", 1)
        node = config
        parts = dotted.strip().split(".")
        for part in parts[:-1]:
            node = node.setdefault(part, {})
        node[parts[-1]] = _coerce(raw)
    return config


def load_config(
    path: str | Path | None = None,
    set_overrides: list[str] | None = None,
    environ: dict | None = None,
) -> dict:
    config = copy.deepcopy(DEFAULTS)
    if path is not None:
        loaded = yaml.safe_load(Path(path).read_text()) or {}
        config = _deep_merge(config, loaded)
    apply_env_overrides(config, environ)
    if set_overrides:
        apply_set_overrides(config, set_overrides)
    return config
