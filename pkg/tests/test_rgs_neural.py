import random

import pytest

from chirpy.rgs.adapters import MockGenerator, ScriptedGenerator
from chirpy.rgs.fallback import FallbackRG, NeuralFallbackRG
from chirpy.rgs.neural_chat import (
    EmotionStarterStrategy,
    NeuralChatRG,
    choose_sample,
    select_emotion_starter,
    starter_question,
    truncate_history,
)

from conftest import make_snapshot

BASE_Q = "I hope you don't mind me asking, how are you feeling?"


class TestEmotionStarters:
    def test_no_share(self):
        assert select_emotion_starter("NO_SHARE") == (
            "I wanted to check in with you. " + BASE_Q
        )

    def test_negopt_bot_composes_negative_plus_optimism(self):
        text = select_emotion_starter(EmotionStarterStrategy.NEGOPT_BOT)
        assert text.startswith(
            "I wanted to say that I've been feeling kind of down recently. "
            "But I think its important to remember that things will get better."
        )
        assert text.endswith(BASE_Q)

    def test_story_variants_extend_their_base(self):
        base = select_emotion_starter("POS_BOT")
        story = select_emotion_starter("POS_BOT_STORY")
        assert story != base
        assert story.startswith("I wanted to say that I'm feeling pretty positive today!")
        assert "walk outside" in story

    def test_all_ten_strategies_resolve(self):
        texts = {select_emotion_starter(s) for s in EmotionStarterStrategy}
        assert len(texts) == 10
        assert all(t.endswith(BASE_Q) for t in texts)

    def test_unknown_strategy_rejected(self):
        with pytest.raises(ValueError):
            select_emotion_starter("SHRUG")


class TestStarterQuestions:
    def test_food_conditioned_on_time_of_day(self):
        assert "breakfast" in starter_question("food", "morning")
        assert "lunch" in starter_question("food", "afternoon")
        assert "dinner" in starter_question("food", "evening")

    def test_launch_handoff_starter(self):
        text = starter_question("future_activities", "afternoon")
        assert text == ("I hope your afternoon is going well. "
                        "What are your plans for the rest of today?")


class TestQuestionRatioControl:
    def test_ratio_above_third_continues_with_question(self):
        samples = ["q?"] * 12 + ["s."] * 8
        text, keep_going = choose_sample(samples)
        assert keep_going and "?" in text

    def test_ratio_below_third_ends_with_non_question(self):
        samples = ["q?"] * 4 + ["s."] * 16
        text, keep_going = choose_sample(samples)
        assert not keep_going and "?" not in text

    def test_randomized_trials(self):
        """10k random sample batches: continue iff question fraction >= 1/3,
        and the selected utterance is a question whenever continuing."""
        rng = random.Random(2024)
        for _ in range(10_000):
            n = 20
            n_questions = rng.randint(0, n)
            samples = [f"question {i}?" for i in range(n_questions)]
            samples += [f"statement {i}." for i in range(n - n_questions)]
            rng.shuffle(samples)
            text, keep_going = choose_sample(samples)
            assert keep_going == (n_questions / n >= 1 / 3)
            if keep_going:
                assert "?" in text
            else:
                assert ("?" not in text) or n_questions == n


class TestHistoryTruncation:
    def test_budget_enforced_dropping_oldest(self):
        history = [f"utterance {i} " + "word " * 99 for i in range(20)]  # 101 tokens each
        kept = truncate_history(history, budget=800)
        assert kept == history[-7:]
        assert sum(len(u.split()) for u in kept) <= 800

    def test_single_oversized_utterance_survives(self):
        history = ["word " * 2000]
        assert truncate_history(history, budget=800) == history


class TestNeuralChatRG:
    def test_discussion_continues_on_question_rich_samples(self):
        adapter = ScriptedGenerator(default=["what happened next?"] * 20)
        rg = NeuralChatRG(adapter)
        candidate = rg.get_response(make_snapshot(
            utterance="we went hiking",
            rg_state={"discussion_active": True},
            in_control_of="Neural Chat",
        ))
        assert candidate is not None
        assert candidate.new_rg_state["discussion_active"] is True
        assert not candidate.needs_prompt

    def test_discussion_ends_on_question_poor_samples(self):
        adapter = ScriptedGenerator(
            default=["that sounds nice."] * 15 + ["really? how come?"] * 5
        )
        candidate = NeuralChatRG(adapter).get_response(make_snapshot(
            utterance="we went hiking",
            rg_state={"discussion_active": True},
            in_control_of="Neural Chat",
        ))
        assert candidate.new_rg_state["discussion_active"] is False
        assert candidate.needs_prompt
        assert "?" not in candidate.text

    def test_inactive_without_control(self):
        adapter = MockGenerator()
        candidate = NeuralChatRG(adapter).get_response(make_snapshot(
            utterance="we went hiking",
            rg_state={"discussion_active": True},
            in_control_of="Movies",
        ))
        assert candidate is None

    def test_adapter_failure_yields_none(self):
        class Boom:
            def generate(self, history, n):
                raise RuntimeError("no gpu")

        candidate = NeuralChatRG(Boom()).get_response(make_snapshot(
            utterance="hi",
            rg_state={"discussion_active": True},
            in_control_of="Neural Chat",
        ))
        assert candidate is None

    def test_launch_handoff_prompt_is_force_start(self):
        candidate = NeuralChatRG(MockGenerator()).get_prompt(make_snapshot(
            utterance="my name is chris",
            responding_rg="Launch",
            config={"time_of_day": "afternoon"},
        ))
        assert candidate.priority.name == "FORCE_START"
        assert "plans for the rest of today" in candidate.text


class TestNeuralFallback:
    def test_filters_questions_and_advice(self):
        adapter = ScriptedGenerator(default=[
            "what do you think?",
            "you should try harder.",
            "I like the violin, but I'm more of a classical music player.",
        ])
        candidate = NeuralFallbackRG(adapter).get_response(make_snapshot("anything"))
        assert candidate.text == "I like the violin, but I'm more of a classical music player."
        assert candidate.needs_prompt

    def test_all_samples_filtered_yields_none(self):
        adapter = ScriptedGenerator(default=["really though?", "you should rest."])
        assert NeuralFallbackRG(adapter).get_response(make_snapshot("anything")) is None

    def test_adapter_timeout_yields_none(self):
        class Boom:
            def generate(self, history, n):
                raise TimeoutError

        assert NeuralFallbackRG(Boom()).get_response(make_snapshot("hi")) is None


class TestFallback:
    def test_always_present(self):
        rg = FallbackRG()
        for utterance in ["", "anything", "qwerty"]:
            response = rg.get_response(make_snapshot(utterance))
            assert response.text == "Sorry, I'm not sure how to answer that"
            prompt = rg.get_prompt(make_snapshot(utterance))
            assert prompt.text == "So, what are you interested in?"
