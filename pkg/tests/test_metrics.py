"""
File:           test_metrics.py
Author:         xlembed developers
Created on:     16/10/26, 11:30 am
"""
import json

import numpy as np
import pandas as pd
import pytest

from src.evaluation.metrics import (
    recall_at_1, recall_at_k, word_error_rate, word_edit_ops, tokenize, EvaluationCase
)
from src.evaluation.report import MetricReport, evaluate, language_breakdown, resource_group_summary
from src.utils.exception import ShapeError, EmptyEvaluationError, ValidationError


def levenshtein(a, b) -> int:
    """ Textbook two-row edit distance """
    previous = list(range(len(b) + 1))
    for i, x in enumerate(a, start=1):
        current = [i]
        for j, y in enumerate(b, start=1):
            current.append(min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + (x != y)))
        previous = current
    return previous[-1]


class TestRecallAt1:

    def test_perfect(self):
        assert recall_at_1([0, 1, 2], [0, 1, 2]) == 100.0

    def test_half(self):
        assert recall_at_1([0, 9, 2, 9], [0, 1, 2, 3]) == 50.0

    def test_independent_tally(self):
        rng = np.random.default_rng(5)
        r = rng.integers(0, 4, size=10000)
        u = rng.integers(0, 4, size=10000)
        hits = 0
        for a, b in zip(r.tolist(), u.tolist()):
            hits += a == b
        assert recall_at_1(r, u) == pytest.approx(100.0 * hits / 10000, abs=1e-12)

    def test_length_mismatch(self):
        with pytest.raises(ShapeError):
            recall_at_1([0, 1], [0])

    def test_empty(self):
        with pytest.raises(EmptyEvaluationError):
            recall_at_1([], [])


class TestRecallAtK:

    def test_k1_matches_recall_at_1(self, rng):
        topk = rng.integers(0, 20, size=(100, 5))
        u = rng.integers(0, 20, size=100)
        assert recall_at_k(topk, u, 1) == recall_at_1(topk[:, 0], u)

    def test_boundary_rank(self):
        u = [3, 7]
        topk = [[0, 1, 2, 4, 3], [0, 1, 2, 4, 7]]
        assert recall_at_k(topk, u, 5) == 100.0
        assert recall_at_k(topk, u, 4) == 0.0

    def test_membership_oracle_and_monotone(self, rng):
        topk = rng.integers(0, 30, size=(300, 10))
        u = rng.integers(0, 30, size=300)
        previous = 0.0
        for k in range(1, 11):
            expected = 100.0 * sum(int(u[i]) in set(topk[i, :k].tolist()) for i in range(300)) / 300
            value = recall_at_k(topk, u, k)
            assert value == pytest.approx(expected, abs=1e-12)
            assert value >= previous
            previous = value

    def test_empty(self):
        with pytest.raises(EmptyEvaluationError):
            recall_at_k(np.zeros((0, 3), dtype=np.int64), [], 3)


class TestWordErrorRate:

    def test_identical(self):
        assert word_error_rate(["a b c", "x y"], ["a b c", "x y"]) == 0.0

    def test_substitution_and_deletion(self):
        assert word_error_rate(["a x c"], ["a b c d"]) == 50.0
        counts = word_edit_ops(["a", "x", "c"], ["a", "b", "c", "d"])
        assert (counts.substitutions, counts.deletions, counts.insertions) == (1, 1, 0)

    def test_not_clamped(self):
        assert word_error_rate(["a b c"], ["a"]) == 200.0

    def test_casefold_and_punctuation(self):
        assert tokenize("Hello,  WORLD\tagain") == ["hello,", "world", "again"]
        assert word_error_rate(["HELLO world"], ["hello world"]) == 0.0
        assert word_error_rate(["HELLO world"], ["hello world"], casefold=False) == 50.0
        assert word_error_rate(["hello world"], ["hello world."]) == 50.0

    def test_corpus_pooling(self):
        # 1 edit over 1 word plus 0 edits over 3 words: pooled 25, mean of per pair rates would be 50
        assert word_error_rate(["b", "x y z"], ["a", "x y z"]) == 25.0

    def test_empty_reference_names_pair(self):
        with pytest.raises(ValidationError, match="pair 1"):
            word_error_rate(["a", "b"], ["a", "   "])

    def test_dynamic_programming_oracle(self):
        rng = np.random.default_rng(11)
        vocab = ["a", "b", "c", "d", "e"]
        for _ in range(500):
            ref = [vocab[i] for i in rng.integers(0, 5, size=int(rng.integers(1, 9)))]
            hyp = [vocab[i] for i in rng.integers(0, 5, size=int(rng.integers(0, 9)))]
            expected = 100.0 * levenshtein(ref, hyp) / len(ref)
            assert word_error_rate([" ".join(hyp)], [" ".join(ref)]) == pytest.approx(expected, abs=1e-9)
        # Completely wrong hypothesis of the same length scores 100
        assert word_error_rate(["x y z"], ["a b c"]) == 100.0


class TestEvaluationCase:

    def test_indices_in_range(self):
        EvaluationCase(u=np.array([0, 4])).validate(5)
        with pytest.raises(ValidationError):
            EvaluationCase(u=np.array([0, 5])).validate(5)

    def test_string_counts(self):
        with pytest.raises(ShapeError):
            EvaluationCase(u=np.array([0, 1]), references=("a",)).validate(5)

    def test_negative_index_without_bank_size(self):
        EvaluationCase(u=np.array([0, 99])).validate()
        with pytest.raises(ValidationError):
            EvaluationCase(u=np.array([-1, 0])).validate()

    def test_evaluate_checks_the_case(self):
        with pytest.raises(ValidationError):
            evaluate(np.array([[0], [1]]), [0, 3], 1, search_size=3)
        with pytest.raises(ShapeError):
            evaluate(np.array([[0], [1]]), [0, 1], 1, ["a"], ["a", "b"])
        assert evaluate(np.array([[0], [1]]), [0, 2], 1, search_size=3).r_at_1 == 50.0


class TestMetricReport:

    def test_json_keys_without_wer(self):
        report = evaluate(np.array([[0, 1], [2, 1]]), [0, 1], 2)
        assert json.loads(report.to_json()) == {"n_queries": 2, "r_at_1": 50.0, "r_at_k": 100.0, "k": 2}

    def test_json_with_wer(self):
        report = evaluate(np.array([[0], [1]]), [0, 1], 1, ["a b", "c"], ["a b", "d"])
        assert json.loads(report.to_json())["wer"] == pytest.approx(100.0 / 3)

    def test_rejects_recall_inversion(self):
        with pytest.raises(ValueError):
            MetricReport(n_queries=1, r_at_1=100.0, r_at_k=0.0, k=5)

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            MetricReport(n_queries=1, r_at_1=120.0, r_at_k=120.0, k=5)


class TestLanguageBreakdown:

    def test_per_language_and_average(self):
        topk = np.array([[0, 1], [5, 1], [2, 3], [9, 8]])
        u = np.array([0, 1, 2, 3])
        df = language_breakdown(topk, u, ["EN", "EN", "LV", "LV"], 2)
        assert df["lang"].tolist() == ["EN", "LV", "avg"]
        assert df["r_at_1"].tolist() == [50.0, 50.0, 50.0]
        assert df["r_at_2"].tolist() == [100.0, 50.0, 75.0]
        assert df["wer"].isna().all()
        low = resource_group_summary(df, ["LV"])
        assert low["r_at_2"] == 50.0

    def test_language_count_mismatch(self):
        with pytest.raises(ShapeError):
            language_breakdown(np.array([[0]]), [0], ["EN", "FR"], 1)

    def test_breakdown_is_a_frame(self):
        df = language_breakdown(np.array([[0]]), [0], ["EN"], 1, ["a"], ["a"])
        assert isinstance(df, pd.DataFrame)
        assert df.loc[0, "wer"] == 0.0
