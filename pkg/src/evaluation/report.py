"""
File:           report.py
Author:         xlembed developers
Created on:     10/10/26, 3:40 pm
"""
from typing import Optional, Sequence, Iterable
from pathlib import Path

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field, validator, root_validator

from src.evaluation.metrics import recall_at_1, recall_at_k, word_error_rate, EvaluationCase
from src.retrieval.similarity import RetrievalResult
from src.utils.exception import ArtifactIOError, ShapeError


class MetricReport(BaseModel):
    """ Retrieval scores of one run. Serialised as the eval JSON report """
    n_queries: int = Field(..., ge=1)
    r_at_1: float
    r_at_k: float
    k: int = Field(..., ge=1)
    wer: Optional[float] = None

    @validator("r_at_1", "r_at_k")
    def percentage_range(cls, value: float) -> float:
        if not 0.0 <= value <= 100.0:
            raise ValueError(f"{value} is not a percentage")
        return value

    @validator("wer")
    def non_negative_wer(cls, value: Optional[float]) -> Optional[float]:
        if value is not None and value < 0:
            raise ValueError(f"WER {value} is negative")
        return value

    @root_validator(skip_on_failure=True)
    def recall_is_monotone(cls, values):
        if values["r_at_k"] < values["r_at_1"]:
            raise ValueError("R@k is smaller than R@1")
        return values

    def to_json(self) -> str:
        """ JSON with full float precision; wer omitted when no sentences were scored """
        return self.json(exclude_none=True)

    def save(self, path: Path) -> None:
        try:
            with open(path, mode="w", encoding="utf-8") as fp_:
                fp_.write(self.to_json() + "\n")
        except OSError as err:
            raise ArtifactIOError(f"Cannot write {path}: {err}") from err


def evaluate(
        topk: np.ndarray,
        u: Sequence[int],
        k: int,
        hypotheses: Optional[Sequence[str]] = None,
        references: Optional[Sequence[str]] = None,
        casefold: bool = True,
        search_size: Optional[int] = None,
) -> MetricReport:
    """ Score ranked index lists against the ground truth """
    topk = np.asarray(topk)
    u = np.asarray(u).reshape(-1)
    EvaluationCase(
        u=u,
        references=None if references is None else tuple(references),
        retrieved_texts=None if hypotheses is None else tuple(hypotheses),
    ).validate(search_size)
    wer = None
    if hypotheses is not None and references is not None:
        wer = word_error_rate(hypotheses, references, casefold=casefold)
    return MetricReport(
        n_queries=int(u.shape[0]),
        r_at_1=recall_at_1(topk[:, 0], u),
        r_at_k=recall_at_k(topk, u, k),
        k=k,
        wer=wer,
    )


def evaluate_result(
        result: RetrievalResult,
        u: Sequence[int],
        k: Optional[int] = None,
        search_texts: Optional[Sequence[str]] = None,
        casefold: bool = True,
        search_size: Optional[int] = None,
) -> MetricReport:
    """ Score a RetrievalResult; WER uses the search bank sentences when they are given """
    k = k or result.k
    hypotheses = references = None
    if search_texts is not None:
        hypotheses = [search_texts[int(j)] for j in result.r]
        references = [search_texts[int(j)] for j in u]
    return evaluate(result.indices, u, k, hypotheses, references, casefold, search_size)


def language_breakdown(
        topk: np.ndarray,
        u: Sequence[int],
        query_langs: Sequence[str],
        k: int,
        hypotheses: Optional[Sequence[str]] = None,
        references: Optional[Sequence[str]] = None,
        casefold: bool = True,
) -> pd.DataFrame:
    """
    One row per query language with its R@1, R@k and WER, plus a final "avg" row holding the
    unweighted mean over languages (the way per-language task scores are averaged).
    """
    topk = np.asarray(topk)
    u = np.asarray(u).reshape(-1)
    if len(query_langs) != u.shape[0]:
        raise ShapeError(f"{len(query_langs)} query languages for {u.shape[0]} queries")
    langs = np.asarray(query_langs)
    rows = []
    for lang in sorted(set(query_langs)):
        mask = langs == lang
        selected = np.flatnonzero(mask)
        wer = None
        if hypotheses is not None and references is not None:
            wer = word_error_rate(
                [hypotheses[i] for i in selected], [references[i] for i in selected], casefold
            )
        rows.append({
            "lang": lang,
            "n_queries": int(mask.sum()),
            "r_at_1": recall_at_1(topk[mask, 0], u[mask]),
            f"r_at_{k}": recall_at_k(topk[mask], u[mask], k),
            "wer": wer,
        })
    df = pd.DataFrame(rows)
    average = {"lang": "avg", "n_queries": int(df["n_queries"].sum())}
    for column in ("r_at_1", f"r_at_{k}", "wer"):
        average[column] = df[column].mean() if df[column].notna().any() else None
    return pd.concat([df, pd.DataFrame([average])], ignore_index=True)


def resource_group_summary(breakdown: pd.DataFrame, langs: Iterable[str]) -> pd.Series:
    """ Mean of the per-language scores over a subset of languages, e.g. the low-resource ones """
    langs = set(langs)
    subset = breakdown[breakdown["lang"].isin(langs)]
    return subset.drop(columns=["lang", "n_queries"]).mean(numeric_only=True)
