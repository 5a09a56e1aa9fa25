"""
File:           conftest.py
Author:         xlembed developers
Created on:     16/10/26, 9:00 am
"""
import numpy as np
import pytest

from src.embedding.matrix import EmbeddingMatrix, normalize_rows
from src.utils.enums import Modality


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


def random_bank(rng: np.random.Generator, n: int, dim: int, prefix: str = "x", lang: str = "en",
                modality: Modality = Modality.TEXT) -> EmbeddingMatrix:
    """ Unit normalized bank of n random rows """
    return normalize_rows(EmbeddingMatrix(
        rows=rng.standard_normal((n, dim)),
        ids=[f"{prefix}{i}" for i in range(n)],
        langs=[lang] * n,
        modality=modality,
    ))


def naive_top_k(Q: np.ndarray, S: np.ndarray, k: int):
    """ Full sort oracle: score descending, lower index first on ties """
    scores = Q.astype(np.float64) @ S.astype(np.float64).T
    indices = np.argsort(-scores, axis=1, kind="stable")[:, :k]
    return indices, np.take_along_axis(scores, indices, axis=1)
