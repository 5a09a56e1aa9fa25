"""
File:           similarity.py
Author:         xlembed developers
Created on:     09/10/26, 9:15 am

Exact cosine retrieval over unit normalized banks. A = Q S^T, then per query row the top k search
indices. Scores accumulate in float64. Ties rank by ascending search index.
"""
from typing import Optional, Tuple, List
from dataclasses import dataclass
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from src.embedding.matrix import EmbeddingMatrix
from src.utils.exception import ShapeError, ContractError, ParameterError
from src.utils.settings import DEFAULT_THREADS, DEFAULT_BLOCK_SIZE
from src.utils.logger import LogFacade


# Query rows per work unit. Fixed, so chunk shapes do not depend on the worker count
QUERY_CHUNK: int = 256

logger = LogFacade.get_logger("retrieval")


@dataclass(frozen=True)
class RetrievalResult:
    """ Top k search indices and scores for every query, best first """
    indices: np.ndarray     # N x k, int64
    scores: np.ndarray      # N x k, float64
    k: int

    @property
    def r(self) -> np.ndarray:
        """ Argmax search index per query """
        return self.indices[:, 0]

    @property
    def n_queries(self) -> int:
        return int(self.indices.shape[0])

    def __eq__(self, other) -> bool:
        if not isinstance(other, RetrievalResult):
            return NotImplemented
        return (
            self.k == other.k
            and np.array_equal(self.indices, other.indices)
            and np.array_equal(self.scores, other.scores)
        )


def check_banks(Q: EmbeddingMatrix, S: EmbeddingMatrix) -> None:
    """ Both banks must share a dimension and be unit normalized """
    if Q.dim != S.dim:
        raise ShapeError(f"Query dimension {Q.dim} differs from search dimension {S.dim}")
    if not Q.normalized:
        raise ContractError("Query bank is not normalized, run normalize_rows first")
    if not S.normalized:
        raise ContractError("Search bank is not normalized, run normalize_rows first")


def dot_scores(queries: np.ndarray, search: np.ndarray) -> np.ndarray:
    """ Row by row dot products. Identical search rows get bitwise identical scores wherever they sit """
    # BLAS matmul may reduce in a different order per output position, einsum does not
    return np.einsum("qd,md->qm", queries, search, optimize=False)


def similarity_matrix(Q: EmbeddingMatrix, S: EmbeddingMatrix) -> np.ndarray:
    """ N x M cosine similarity matrix A = Q S^T """
    check_banks(Q, S)
    return dot_scores(Q.as_float64(), S.as_float64())


def rank_rows(scores: np.ndarray, indices: np.ndarray, k: int) -> Tuple[np.ndarray, np.ndarray]:
    """ Sort each row by score descending, then index ascending, and keep the first k """
    # lexsort uses the last key as primary
    order = np.lexsort((indices, -scores), axis=-1)[:, :k]
    return (
        np.take_along_axis(scores, order, axis=1),
        np.take_along_axis(indices, order, axis=1),
    )


def _top_k_chunk(queries: np.ndarray, search: np.ndarray, k: int, block_size: int) -> Tuple[np.ndarray, np.ndarray]:
    """ Running top k for a chunk of queries, merged block by block in ascending search order """
    n = queries.shape[0]
    best_scores = np.empty((n, 0), dtype=np.float64)
    best_indices = np.empty((n, 0), dtype=np.int64)
    for start in range(0, search.shape[0], block_size):
        block = search[start:start + block_size]
        block_scores = dot_scores(queries, block)
        block_indices = np.broadcast_to(
            np.arange(start, start + block.shape[0], dtype=np.int64), block_scores.shape
        )
        best_scores, best_indices = rank_rows(
            np.concatenate([best_scores, block_scores], axis=1),
            np.concatenate([best_indices, block_indices], axis=1),
            k,
        )
    return best_scores, best_indices


def retrieve(
        Q: EmbeddingMatrix,
        S: EmbeddingMatrix,
        k: int,
        block_size: Optional[int] = None,
        threads: Optional[int] = None,
) -> RetrievalResult:
    """ Exact top k retrieval of every query row against the search bank """
    check_banks(Q, S)
    block_size = block_size or DEFAULT_BLOCK_SIZE
    threads = threads or DEFAULT_THREADS
    if k < 1:
        raise ParameterError(f"k must be positive, got {k}")
    if k > S.count:
        raise ParameterError(f"k={k} exceeds the search bank size {S.count}")
    if block_size < 1 or threads < 1:
        raise ParameterError(f"block_size and threads must be positive, got {block_size}, {threads}")
    logger.info(
        f"Retrieving top {k} for {Q.count} queries over {S.count} x {S.dim} search rows "
        f"(block {block_size}, {threads} thread(s))"
    )
    queries = Q.as_float64()
    search = S.as_float64()
    chunks: List[Tuple[int, int]] = [
        (start, min(start + QUERY_CHUNK, Q.count)) for start in range(0, Q.count, QUERY_CHUNK)
    ]
    scores = np.empty((Q.count, k), dtype=np.float64)
    indices = np.empty((Q.count, k), dtype=np.int64)

    def work(bounds: Tuple[int, int]) -> None:
        lo, hi = bounds
        scores[lo:hi], indices[lo:hi] = _top_k_chunk(queries[lo:hi], search, k, block_size)

    if threads == 1 or len(chunks) <= 1:
        for bounds in chunks:
            work(bounds)
    else:
        # Each chunk writes a disjoint slice, so scheduling order cannot change the result
        with ThreadPoolExecutor(max_workers=threads) as executor:
            list(executor.map(work, chunks))
    return RetrievalResult(indices=indices, scores=scores, k=k)
