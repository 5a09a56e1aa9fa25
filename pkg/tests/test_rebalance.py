"""
File:           test_rebalance.py
Author:         xlembed developers
Created on:     16/10/26, 2:00 pm
"""
from collections import Counter
import time

import numpy as np
import pytest

from src.rebalance.constant import CommonVoiceHours, AlphaGrid
from src.rebalance.sampler import (
    LanguageStats, RebalancePlan, compute_ratios, apply_rebalance, draw_training_subset,
    language_draw_sizes, read_corpus_tsv, write_ids_tsv,
)
from src.utils.exception import ParameterError, ValidationError


TABLE = LanguageStats.from_mapping(CommonVoiceHours.HOURS)


def single_language_plan(ratio: float, n: int, seed: int = 0) -> RebalancePlan:
    return RebalancePlan(
        alpha=1.0, langs=("xx",), counts=np.array([float(n)]), ratios=np.array([ratio]), seed=seed
    )


class TestLanguageStats:

    def test_rejects_duplicates(self):
        with pytest.raises(ValidationError):
            LanguageStats(entries=(("en", 3), ("en", 4)))

    def test_rejects_zero_count(self):
        with pytest.raises(ValidationError):
            LanguageStats.from_mapping({"en": 0})

    def test_rejects_empty(self):
        with pytest.raises(ValidationError):
            LanguageStats(entries=())

    def test_from_tsv(self, tmp_path):
        path = tmp_path / "stats.tsv"
        path.write_text("EN\t2000\nLV\t7\n", encoding="utf-8")
        stats = LanguageStats.from_tsv(path)
        assert stats.langs == ["EN", "LV"]
        np.testing.assert_array_equal(stats.counts, [2000, 7])


class TestComputeRatios:

    def test_alpha_one_is_identity(self):
        plan = compute_ratios(TABLE, 1.0)
        np.testing.assert_allclose(plan.ratios, 1.0, atol=1e-12)

    def test_two_languages_by_hand(self):
        plan = compute_ratios(LanguageStats.from_mapping({"a": 900, "b": 100}), 0.5)
        np.testing.assert_allclose(plan.ratios, [5 / 6, 5 / 2], rtol=1e-12)
        np.testing.assert_allclose(plan.target_counts, [750, 250], rtol=1e-12)

    def test_table_counts_near_uniform(self):
        start = time.perf_counter()
        plan = compute_ratios(TABLE, AlphaGrid.DEFAULT)
        assert plan.ratio_of("EN") < 1.0 < plan.ratio_of("LV")
        assert np.max(np.abs(plan.shares - 1 / 25)) < 0.01
        emitted = 0
        for n, ratio in zip(plan.counts, plan.ratios):
            whole, partial = language_draw_sizes(int(n), ratio)
            emitted += whole * int(n) + partial
        assert abs(emitted - TABLE.counts.sum()) <= 25
        assert time.perf_counter() - start < 1.0

    def test_limit_towards_uniform(self):
        plan = compute_ratios(TABLE, 0.01)
        uniform = TABLE.counts.sum() / 25
        assert np.max(np.abs(plan.shares - 1 / 25)) < 0.02
        assert np.max(np.abs(plan.target_counts - uniform)) / TABLE.counts.sum() < 0.02

    def test_low_resource_share_grows_as_alpha_shrinks(self):
        previous = None
        for alpha in AlphaGrid.CURVE:
            plan = compute_ratios(TABLE, alpha)
            spread = plan.ratio_of("LV") / plan.ratio_of("EN")
            if previous is not None:
                assert spread > previous
            previous = spread

    def test_conservation(self):
        rng = np.random.default_rng(3)
        start = time.perf_counter()
        for _ in range(1000):
            n_langs = int(rng.integers(1, 30))
            counts = rng.integers(1, 100000, size=n_langs)
            stats = LanguageStats(entries=tuple((f"l{i}", int(c)) for i, c in enumerate(counts)))
            alpha = float(rng.uniform(1e-3, 1.0))
            plan = compute_ratios(stats, alpha)
            total = counts.sum()
            assert abs((counts * plan.ratios).sum() - total) / total < 1e-9
        assert time.perf_counter() - start < 5.0

    @pytest.mark.parametrize("alpha", [0.0, -0.1, 1.5])
    def test_alpha_out_of_range(self, alpha):
        with pytest.raises(ParameterError):
            compute_ratios(TABLE, alpha)

    def test_table(self):
        df = compute_ratios(LanguageStats.from_mapping({"a": 900, "b": 100}), 0.5).table()
        assert df.columns.tolist() == ["lang", "n_l", "p_l", "lambda_l", "target_count"]
        assert df["target_count"].round(9).tolist() == [750.0, 250.0]


class TestApplyRebalance:

    def test_identity_plan_is_a_permutation(self):
        corpus = {"a": [f"a{i}" for i in range(30)], "b": [f"b{i}" for i in range(7)]}
        plan = compute_ratios(LanguageStats.from_corpus(corpus), 1.0, seed=4)
        out = apply_rebalance(corpus, plan)
        assert Counter(out) == Counter(corpus["a"] + corpus["b"])

    def test_integer_repetition(self):
        ids = [f"x{i}" for i in range(5)]
        out = apply_rebalance({"xx": ids}, single_language_plan(2.0, 5))
        assert len(out) == 10
        assert Counter(out) == Counter({x: 2 for x in ids})

    def test_down_sampling_is_deterministic(self):
        ids = [f"x{i}" for i in range(1000)]
        first = apply_rebalance({"xx": ids}, single_language_plan(0.5, 1000, seed=9))
        second = apply_rebalance({"xx": ids}, single_language_plan(0.5, 1000, seed=9))
        assert len(first) == 500
        assert len(set(first)) == 500
        assert first == second

    def test_partial_copy(self):
        ids = [f"x{i}" for i in range(10)]
        out = apply_rebalance({"xx": ids}, single_language_plan(1.25, 10))
        # round(2.5) is 2 under half-to-even
        assert len(out) == 12
        assert set(out) == set(ids)

    def test_total_within_one_per_language(self):
        corpus = {lang: [f"{lang}{i}" for i in range(int(n))] for lang, n in CommonVoiceHours.HOURS.items()}
        plan = compute_ratios(TABLE, 0.3, seed=1)
        out = apply_rebalance(corpus, plan)
        counts = Counter(x.rstrip("0123456789") for x in out)
        for lang, target in zip(plan.langs, plan.target_counts):
            assert abs(counts[lang] - target) <= 1
        assert abs(len(out) - TABLE.counts.sum()) <= 25

    def test_missing_language(self):
        plan = compute_ratios(LanguageStats.from_mapping({"a": 2, "b": 2}), 0.5)
        with pytest.raises(ValidationError):
            apply_rebalance({"a": ["a0", "a1"]}, plan)

    def test_training_subset(self):
        ids = [f"x{i}" for i in range(100)]
        subset = draw_training_subset(ids, 10, seed=2)
        assert len(subset) == 10 and len(set(subset)) == 10
        assert subset == draw_training_subset(ids, 10, seed=2)
        with pytest.raises(ParameterError):
            draw_training_subset(ids, 101, seed=2)

    def test_corpus_files(self, tmp_path):
        path = tmp_path / "corpus.tsv"
        write_ids_tsv(["u1", "u2", "u3"], {"u1": "EN", "u2": "LV", "u3": "EN"}, path)
        assert read_corpus_tsv(path) == {"EN": ["u1", "u3"], "LV": ["u2"]}
