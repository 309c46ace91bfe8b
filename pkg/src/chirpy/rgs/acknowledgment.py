"""Acknowledgment: a one-turn scripted reaction when the user raises a
new entity of a recognizable kind, before other generators dig in."""

from __future__ import annotations

from ..manager import ResponseCandidate, ResponsePriority
from ..tracker import EntityDirective
from .base import ResponseGenerator, TurnSnapshot

CATEGORY_TEMPLATES = {
    "book": "Oh yeah, I read {entity} last year - I couldn't put it down!",
    "film": "Oh, {entity}! I saw that one recently; what a ride.",
    "food": "Mmm, {entity}. Now you're making me hungry!",
    "city": "{entity}! I've always wanted to visit.",
    "game": "{entity} is such a fun one. I've sunk way too many hours into it.",
    "musician": "Oh nice, I've had {entity} playing on repeat lately!",
}


class AcknowledgmentRG(ResponseGenerator):
    name = "Acknowledgment"

    def get_response(self, snapshot: TurnSnapshot) -> ResponseCandidate | None:
        entity = snapshot.current_entity
        if entity is None or not snapshot.entity_set_by_user:
            return None
        acked = set(snapshot.rg_state.get("acknowledged", ()))
        if entity.id in acked:
            return None  # one turn per entity, ever
        template = None
        for category in sorted(entity.categories):
            if category in CATEGORY_TEMPLATES:
                template = CATEGORY_TEMPLATES[category]
                break
        if template is None:
            return None
        return ResponseCandidate(
            rg=self.name,
            text=template.format(entity=entity.display_name),
            priority=ResponsePriority.CAN_START,
            needs_prompt=True,
            directive=EntityDirective.keep(),
            new_rg_state={"acknowledged": sorted(acked | {entity.id})},
        )
