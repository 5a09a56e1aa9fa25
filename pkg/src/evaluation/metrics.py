"""
File:           metrics.py
Author:         xlembed developers
Created on:     10/10/26, 10:05 am
"""
from typing import Sequence, Optional, List, Tuple
from dataclasses import dataclass

import numpy as np

from src.utils.exception import ShapeError, EmptyEvaluationError, ParameterError, ValidationError


@dataclass(frozen=True)
class EvaluationCase:
    """ Ground truth search index per query, with the optional reference and retrieved sentences """
    u: np.ndarray
    references: Optional[Tuple[str, ...]] = None
    retrieved_texts: Optional[Tuple[str, ...]] = None

    def validate(self, search_size: Optional[int] = None) -> None:
        """ Indices must be non-negative, and below search_size when it is known """
        u = np.asarray(self.u)
        if u.size and u.min() < 0:
            raise ValidationError(f"Ground truth index {int(u.min())} is negative")
        if u.size and search_size is not None and u.max() >= search_size:
            raise ValidationError(f"Ground truth indices must lie in [0, {search_size})")
        for name in ("references", "retrieved_texts"):
            texts = getattr(self, name)
            if texts is not None and len(texts) != u.size:
                raise ShapeError(f"{len(texts)} {name} for {u.size} queries")


@dataclass(frozen=True)
class WordErrorCounts:
    substitutions: int = 0
    deletions: int = 0
    insertions: int = 0
    reference_words: int = 0

    @property
    def edits(self) -> int:
        return self.substitutions + self.deletions + self.insertions

    def __add__(self, other: "WordErrorCounts") -> "WordErrorCounts":
        return WordErrorCounts(
            self.substitutions + other.substitutions,
            self.deletions + other.deletions,
            self.insertions + other.insertions,
            self.reference_words + other.reference_words,
        )


def _check_pair(r: np.ndarray, u: np.ndarray) -> None:
    if r.shape[0] != u.shape[0]:
        raise ShapeError(f"Prediction length {r.shape[0]} differs from ground truth length {u.shape[0]}")
    if u.shape[0] == 0:
        raise EmptyEvaluationError("Cannot evaluate an empty query set")


def recall_at_1(r: Sequence[int], u: Sequence[int]) -> float:
    """ ACC = 100 * #{i : r_i = u_i} / N """
    r = np.asarray(r).reshape(-1)
    u = np.asarray(u).reshape(-1)
    _check_pair(r, u)
    hits = int(np.count_nonzero(r == u))
    return 100.0 * hits / u.shape[0]


def recall_at_k(topk: Sequence[Sequence[int]], u: Sequence[int], k: int) -> float:
    """ Percentage of queries whose ground truth appears among the first k ranked indices """
    u = np.asarray(u).reshape(-1)
    if k < 1:
        raise ParameterError(f"k must be positive, got {k}")
    if isinstance(topk, np.ndarray) and topk.ndim == 2:
        ranked = topk
    else:
        if any(len(row) < k for row in topk):
            raise ParameterError(f"Every ranked list needs at least {k} entries")
        ranked = np.array([list(row)[:k] for row in topk]).reshape(len(topk), k)
    if ranked.shape[0] != u.shape[0]:
        raise ShapeError(f"{ranked.shape[0]} ranked lists for {u.shape[0]} ground truth entries")
    if u.shape[0] == 0:
        raise EmptyEvaluationError("Cannot evaluate an empty query set")
    if ranked.shape[1] < k:
        raise ParameterError(f"Ranked lists hold {ranked.shape[1]} entries, fewer than k={k}")
    hits = int(np.count_nonzero(np.any(ranked[:, :k] == u[:, None], axis=1)))
    return 100.0 * hits / u.shape[0]


def tokenize(text: str, casefold: bool = True) -> List[str]:
    """ Split on Unicode whitespace, optionally casefolded. Punctuation stays attached """
    return (text.casefold() if casefold else text).split()


def word_edit_ops(hypothesis: Sequence[str], reference: Sequence[str]) -> WordErrorCounts:
    """
    Minimum word level edit distance between hypothesis and reference, broken down into
    substitutions, deletions and insertions along one optimal alignment.
    """
    n_ref, n_hyp = len(reference), len(hypothesis)
    # dp[i][j] = (cost, subs, dels, ins) aligning reference[:i] with hypothesis[:j]
    dp = np.zeros((n_ref + 1, n_hyp + 1, 4), dtype=np.int64)
    dp[1:, 0] = np.stack([np.arange(1, n_ref + 1), np.zeros(n_ref), np.arange(1, n_ref + 1), np.zeros(n_ref)], axis=1)
    dp[0, 1:] = np.stack([np.arange(1, n_hyp + 1), np.zeros(n_hyp), np.zeros(n_hyp), np.arange(1, n_hyp + 1)], axis=1)
    for i in range(1, n_ref + 1):
        for j in range(1, n_hyp + 1):
            if reference[i - 1] == hypothesis[j - 1]:
                dp[i, j] = dp[i - 1, j - 1]
                continue
            sub = dp[i - 1, j - 1] + (1, 1, 0, 0)
            dele = dp[i - 1, j] + (1, 0, 1, 0)
            ins = dp[i, j - 1] + (1, 0, 0, 1)
            # Prefer substitution, then deletion, then insertion on equal cost
            dp[i, j] = min((sub, dele, ins), key=lambda x: x[0])
    cost, subs, dels, ins = (int(x) for x in dp[n_ref, n_hyp])
    return WordErrorCounts(substitutions=subs, deletions=dels, insertions=ins, reference_words=n_ref)


def word_error_counts(
        hypotheses: Sequence[str], references: Sequence[str], casefold: bool = True
) -> WordErrorCounts:
    """ Corpus level edit counts: per pair edits and reference lengths summed in pair order """
    if len(hypotheses) != len(references):
        raise ShapeError(f"{len(hypotheses)} hypotheses for {len(references)} references")
    if not references:
        raise EmptyEvaluationError("Cannot compute WER over zero sentence pairs")
    total = WordErrorCounts()
    for index, (hyp, ref) in enumerate(zip(hypotheses, references)):
        ref_tokens = tokenize(ref, casefold)
        if not ref_tokens:
            raise ValidationError(f"Reference of pair {index} has no words")
        total = total + word_edit_ops(tokenize(hyp, casefold), ref_tokens)
    return total


def word_error_rate(hypotheses: Sequence[str], references: Sequence[str], casefold: bool = True) -> float:
    """ 100 * (S + D + I) / reference words, pooled over the corpus. Not clamped at 100 """
    counts = word_error_counts(hypotheses, references, casefold)
    return 100.0 * counts.edits / counts.reference_words
