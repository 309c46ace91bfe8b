"""Response generator pack and registry construction."""

from __future__ import annotations

from .acknowledgment import AcknowledgmentRG
from .adapters import GeneratorAdapter, MockGenerator, ScriptedGenerator
from .base import ResponseGenerator, TurnSnapshot
from .categories import CategoriesRG, CategoryStrategy, category_surface
from .fallback import FallbackRG, NeuralFallbackRG
from .launch import LaunchRG
from .movies import MoviesRG
from .music import MusicRG
from .neural_chat import (
    EmotionStarterStrategy,
    NeuralChatRG,
    select_emotion_starter,
)
from .offensive_user import OffenseStrategy, OffensiveUserRG
from .opinion import OpinionRG
from .simple import (
    AlexaCommandsRG,
    ClosingConfirmationRG,
    ComplaintRG,
    OneTurnScriptedRG,
    RedQuestionRG,
)
from .wiki import WikiRG, select_snippet


def build_registry(
    adapter: GeneratorAdapter | None = None,
    opinion_whitelist: dict | None = None,
    movie_kb: dict | None = None,
    category_bank: dict | None = None,
) -> list[ResponseGenerator]:
    """All generators, in the default tie-break order."""
    adapter = adapter or MockGenerator()
    return [
        OffensiveUserRG(),
        LaunchRG(),
        ComplaintRG(),
        ClosingConfirmationRG(),
        AlexaCommandsRG(),
        RedQuestionRG(),
        OneTurnScriptedRG(),
        MoviesRG(kb=movie_kb),
        MusicRG(),
        OpinionRG(whitelist=opinion_whitelist),
        WikiRG(),
        CategoriesRG(bank=category_bank),
        NeuralChatRG(adapter),
        AcknowledgmentRG(),
        NeuralFallbackRG(adapter),
        FallbackRG(),
    ]


__all__ = [
    "AcknowledgmentRG",
    "AlexaCommandsRG",
    "CategoriesRG",
    "CategoryStrategy",
    "ClosingConfirmationRG",
    "ComplaintRG",
    "EmotionStarterStrategy",
    "FallbackRG",
    "GeneratorAdapter",
    "LaunchRG",
    "MockGenerator",
    "MoviesRG",
    "MusicRG",
    "NeuralChatRG",
    "NeuralFallbackRG",
    "OffenseStrategy",
    "OffensiveUserRG",
    "OneTurnScriptedRG",
    "OpinionRG",
    "RedQuestionRG",
    "ResponseGenerator",
    "ScriptedGenerator",
    "TurnSnapshot",
    "WikiRG",
    "build_registry",
    "category_surface",
    "select_emotion_starter",
    "select_snippet",
]
