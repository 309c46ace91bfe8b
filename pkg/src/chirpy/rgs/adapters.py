"""Pluggable text-generation adapters.

The conversational generators ask an adapter for a batch of candidate
replies and apply their own control logic on top. Production deployments
would point this at a hosted model; the bundled adapters are
deterministic so every control path is testable offline.
"""

from __future__ import annotations

import hashlib
from typing import Protocol


class GeneratorAdapter(Protocol):
    def generate(self, history: list[str], n: int) -> list[str]:
        """Return exactly n candidate utterances for the given history."""
        ...


def _pad(samples: list[str], n: int) -> list[str]:
    if not samples:
        samples = ["That's interesting, tell me more?"]
    out = list(samples[:n])
    i = 0
    while len(out) < n:
        out.append(samples[i % len(samples)])
        i += 1
    return out


class MockGenerator:
    """Hash-seeded template responses; stable for a fixed history."""

    _QUESTION_TEMPLATES = [
        "That sounds lovely. What happened next?",
        "Oh interesting! How did that make you feel?",
        "I see. What do you enjoy most about that?",
        "That reminds me of something similar. Do you do that often?",
        "Nice! Who were you with?",
    ]
    _STATEMENT_TEMPLATES = [
        "That sounds really nice.",
        "I'm glad you shared that with me.",
        "That makes a lot of sense to me.",
        "I can imagine that being a big deal.",
        "That seems like it matters to you.",
    ]

    def __init__(self, question_ratio: float = 0.6):
        self.question_ratio = question_ratio

    def generate(self, history: list[str], n: int) -> list[str]:
        digest = hashlib.sha256("\n".join(history).encode("utf-8")).digest()
        samples = []
        for i in range(n):
            byte = digest[i % len(digest)]
            if (byte / 255.0) < self.question_ratio:
                samples.append(self._QUESTION_TEMPLATES[byte % len(self._QUESTION_TEMPLATES)])
            else:
                samples.append(self._STATEMENT_TEMPLATES[byte % len(self._STATEMENT_TEMPLATES)])
        return samples


class ScriptedGenerator:
    """Returns scripted sample lists keyed by the latest user utterance.

    Used by replay fixtures: the key is matched against the last history
    entry; unknown utterances fall back to the default samples.
    """

    def __init__(self, script: dict[str, list[str]] | None = None,
                 default: list[str] | None = None):
        self.script = dict(script or {})
        self.default = list(default or MockGenerator._STATEMENT_TEMPLATES)

    def generate(self, history: list[str], n: int) -> list[str]:
        key = history[-1] if history else ""
        samples = self.script.get(key, self.default)
        return _pad(samples, n)
