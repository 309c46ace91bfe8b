import random
from pathlib import Path

import pytest

from chirpy.corpus import load_index
from chirpy.linker import LinkedSpan, LinkerOutput, LinkMethod
from chirpy.pipeline.types import Annotations
from chirpy.rgs.base import TurnSnapshot
from chirpy.tracker import EntityTrackerState

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def demo_index():
    from chirpy.config import default_index_path

    return load_index(default_index_path())


def make_snapshot(
    utterance="",
    annotations=None,
    index=None,
    current=None,
    rg_state=None,
    turn_number=3,
    history=((u, b) for u, b in ()),
    in_control_of=None,
    profile=None,
    config=None,
    seed=0,
    phase1_rule="unchanged",
    responding_rg=None,
    tracker=None,
):
    from chirpy.corpus import EntityIndex

    index = index if index is not None else EntityIndex([])
    tracker = tracker or EntityTrackerState(current=current)
    return TurnSnapshot(
        utterance=utterance,
        annotations=annotations or Annotations(),
        tracker=tracker,
        turn_number=turn_number,
        history=tuple(history),
        rg_state=rg_state or {},
        profile=profile or {},
        index=index,
        rng=random.Random(seed),
        last_responding_rg=in_control_of,
        last_prompting_rg=None,
        responding_rg=responding_rg,
        config=config or {},
        phase1_rule=phase1_rule,
    )


def linked(*pairs):
    return LinkerOutput(tuple(
        LinkedSpan(span=eid.lower(), entity_id=eid, score=score, method=LinkMethod.EXACT)
        for eid, score in pairs
    ))
