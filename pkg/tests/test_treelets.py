import pytest

from chirpy.corpus import Entity
from chirpy.pipeline.types import Annotations, Sentiment
from chirpy.tracker import DirectiveAction
from chirpy.treelets import StepContext, build_graph


def ctx(utterance="", rg_state=None, entity=None, sentiment=Sentiment.NEUTRAL,
        dialogue_act="statement"):
    return StepContext(
        utterance=utterance,
        annotations=Annotations(sentiment=sentiment, dialogue_act=dialogue_act),
        rg_state=rg_state or {},
        current_entity=entity,
    )


GRAPH = build_graph({
    "name": "toy",
    "entry": "greet",
    "treelets": {
        "greet": {
            "branches": [
                {"id": "film", "when": {"entity_type": "film"},
                 "template": "Nice! Did you like {movie}?",
                 "entity": {"set": "$movie_id"}, "next": "opinion"},
                {"id": "again", "when": {"regex": "again"},
                 "template": "Here we go again!", "next": "greet"},
                {"id": "fallthrough", "default": True,
                 "template": "Seen anything good?", "next": "greet"},
            ],
        },
        "opinion": {
            "branches": [
                {"id": "liked", "when": {"sentiment": "positive"},
                 "template": "Glad you liked it!", "needs_prompt": True,
                 "entity": "clear", "next": None},
                {"id": "default", "default": True,
                 "template": "Fair enough.", "next": "greet"},
            ],
        },
    },
})


class TestStep:
    def test_classify_and_fill(self):
        movie = Entity("The Matrix", 1, {"the matrix": 1}, frozenset({"film"}))
        state = {"movie": "The Matrix", "movie_id": "The Matrix"}
        result = GRAPH.step("greet", ctx("i saw the matrix", state, movie))
        assert result.text == "Nice! Did you like The Matrix?"
        assert result.next_treelet == "opinion"
        assert result.directive.action is DirectiveAction.SET
        assert result.directive.entity_id == "The Matrix"

    def test_default_branch_fires(self):
        result = GRAPH.step("greet", ctx("nothing in particular"))
        assert result.branch_id == "fallthrough"
        assert result.text == "Seen anything good?"

    def test_self_loop_allowed(self):
        result = GRAPH.step("greet", ctx("again and again"))
        assert result.next_treelet == "greet"

    def test_unresolved_slot_falls_back_to_default(self):
        movie = Entity("The Matrix", 1, {"the matrix": 1}, frozenset({"film"}))
        # no movie slot in state: the film branch template cannot render
        result = GRAPH.step("greet", ctx("i saw the matrix", {}, movie))
        assert result.branch_id == "fallthrough"

    def test_deterministic(self):
        results = [GRAPH.step("greet", ctx("hello")) for _ in range(3)]
        assert results[0] == results[1] == results[2]

    def test_exactly_one_branch_fires(self):
        # positive sentiment also matches the default; first match wins
        result = GRAPH.step("opinion", ctx("loved it", sentiment=Sentiment.POSITIVE))
        assert result.branch_id == "liked"
        assert result.needs_prompt


class TestValidate:
    def test_well_formed_graph(self):
        assert GRAPH.validate() == []

    def test_dangling_successor(self):
        graph = build_graph({
            "entry": "a",
            "treelets": {
                "a": {"branches": [
                    {"id": "x", "default": True, "template": "t", "next": "missing"},
                ]},
            },
        })
        defects = graph.validate()
        assert any("missing" in d for d in defects)

    def test_unreachable_node(self):
        graph = build_graph({
            "entry": "a",
            "treelets": {
                "a": {"branches": [{"default": True, "template": "t", "next": "a"}]},
                "island": {"branches": [{"default": True, "template": "t", "next": None}]},
            },
        })
        defects = graph.validate()
        assert any("unreachable" in d for d in defects)

    def test_missing_default_branch(self):
        graph = build_graph({
            "entry": "a",
            "treelets": {
                "a": {"branches": [{"id": "only", "when": {"regex": "x"},
                                    "template": "t", "next": None}]},
            },
        })
        defects = graph.validate()
        assert any("default" in d for d in defects)

    def test_missing_template_key_rejected_at_build(self):
        with pytest.raises(ValueError, match="template"):
            build_graph({
                "entry": "a",
                "treelets": {"a": {"branches": [{"default": True, "next": None}]}},
            })

    def test_bundled_movies_graph_is_well_formed(self):
        from chirpy.rgs.movies import MoviesRG

        assert MoviesRG().graph.validate() == []
