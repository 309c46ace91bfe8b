import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chirpy import phonetics
from chirpy.corpus import (
    Entity,
    EntityIndex,
    IndexLoadError,
    anchortext_prob,
    load_index,
    save_index,
)


def write_records(tmp_path, records, name="entities.jsonl"):
    path = tmp_path / name
    path.write_text("\n".join(json.dumps(r) for r in records) + "\n")
    return path


CAT = {"id": "Cat", "pageviews": 10000, "anchortexts": {"cat": 100, "cats": 40}}
FORD_V_FERRARI = {
    "id": "Ford v Ferrari",
    "pageviews": 8000,
    "anchortexts": {"ford v ferrari": 50},
    "categories": ["film"],
}


class TestLoadIndex:
    def test_single_entity_lookup(self, tmp_path):
        index = load_index(write_records(tmp_path, [CAT]))
        assert {e.id for e in index.lookup_exact("cat")} == {"Cat"}

    def test_phonetic_postings_cover_garbled_title(self, tmp_path):
        index = load_index(write_records(tmp_path, [FORD_V_FERRARI]))
        key = phonetics.encode("ford v ferrari")
        for code in key.token_codes:
            assert ("ford v ferrari", "Ford v Ferrari") in index.phonetic_postings[code]

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.jsonl"
        path.write_text("")
        index = load_index(path)
        assert len(index) == 0
        assert index.lookup_exact("cat") == set()
        assert index.lookup_phonetic("cat") == set()

    def test_malformed_record_names_line(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text(json.dumps(CAT) + "\nnot json\n")
        with pytest.raises(IndexLoadError, match="line 2"):
            load_index(path)

    def test_duplicate_id_rejected(self, tmp_path):
        with pytest.raises(IndexLoadError, match="duplicate"):
            load_index(write_records(tmp_path, [CAT, CAT]))

    def test_uppercase_anchortext_rejected(self, tmp_path):
        bad = {"id": "X", "pageviews": 1, "anchortexts": {"Cat": 5}}
        with pytest.raises(IndexLoadError, match="lowercased"):
            load_index(write_records(tmp_path, [bad]))

    def test_nonpositive_count_rejected(self, tmp_path):
        bad = {"id": "X", "pageviews": 1, "anchortexts": {"x": 0}}
        with pytest.raises(IndexLoadError, match="positive"):
            load_index(write_records(tmp_path, [bad]))

    def test_idempotent_for_same_file(self, tmp_path):
        path = write_records(tmp_path, [CAT, FORD_V_FERRARI])
        first, second = load_index(path), load_index(path)
        assert first.anchortext_postings == second.anchortext_postings
        assert first.phonetic_postings == second.phonetic_postings


class TestAnchortextProb:
    def test_hand_evaluated_distribution(self):
        cat = Entity("Cat", 10000, {"cat": 100, "cats": 40})
        assert anchortext_prob(cat, "cat") == pytest.approx(100 / 140)

    def test_single_anchortext_is_certain(self):
        e = Entity("X", 5, {"x": 7})
        assert anchortext_prob(e, "x") == 1.0

    def test_absent_anchortext(self):
        cat = Entity("Cat", 10000, {"cat": 100, "cats": 40})
        assert anchortext_prob(cat, "dog") == 0.0

    @given(
        st.dictionaries(
            st.text(alphabet="abcdefg", min_size=1, max_size=5),
            st.integers(min_value=1, max_value=1000),
            min_size=1,
            max_size=8,
        )
    )
    @settings(max_examples=100)
    def test_distribution_sums_to_one(self, anchortexts):
        e = Entity("X", 1, anchortexts)
        total = sum(anchortext_prob(e, a) for a in anchortexts)
        assert total == pytest.approx(1.0, abs=1e-9)


class TestLookups:
    def test_shared_span_returns_both(self, tmp_path):
        a = {"id": "A", "pageviews": 1, "anchortexts": {"shared": 1}}
        b = {"id": "B", "pageviews": 2, "anchortexts": {"shared": 3}}
        index = load_index(write_records(tmp_path, [a, b]))
        assert {e.id for e in index.lookup_exact("shared")} == {"A", "B"}

    def test_unknown_span_empty(self, tmp_path):
        index = load_index(write_records(tmp_path, [CAT]))
        assert index.lookup_exact("dog") == set()

    def test_phonetic_retrieves_garbled_span(self, tmp_path):
        index = load_index(write_records(tmp_path, [FORD_V_FERRARI]))
        hits = index.lookup_phonetic("four v ferrari")
        assert ("ford v ferrari", index.get("Ford v Ferrari")) in hits

    def test_exact_anchortext_phonetically_retrievable(self, tmp_path):
        index = load_index(write_records(tmp_path, [CAT, FORD_V_FERRARI]))
        for span in ["cat", "cats", "ford v ferrari"]:
            entities = {e.id for _, e in index.lookup_phonetic(span)}
            assert {e.id for e in index.lookup_exact(span)} <= entities

    def test_no_phonetic_neighbors(self, tmp_path):
        index = load_index(write_records(tmp_path, [CAT]))
        assert index.lookup_phonetic("zzz") == set()


class TestRoundTrip:
    def test_save_then_load_preserves_queries(self, tmp_path):
        records = [
            CAT,
            FORD_V_FERRARI,
            {
                "id": "The Matrix",
                "pageviews": 20000,
                "anchortexts": {"the matrix": 500, "matrix": 200},
                "categories": ["film"],
                "article_sentences": ["The Matrix is a 1999 film."],
                "tils": ["the matrix code is sushi recipes"],
            },
        ]
        original = load_index(write_records(tmp_path, records))
        out = tmp_path / "roundtrip.jsonl"
        save_index(original, out)
        reloaded = load_index(out)

        spans = {a for r in records for a in r["anchortexts"]} | {"four v ferrari"}
        for span in spans:
            assert {e.id for e in original.lookup_exact(span)} == {
                e.id for e in reloaded.lookup_exact(span)
            }
            assert {(a, e.id) for a, e in original.lookup_phonetic(span)} == {
                (a, e.id) for a, e in reloaded.lookup_phonetic(span)
            }
        assert reloaded.get("The Matrix").tils == original.get("The Matrix").tils
