"""
File:           test_similarity.py
Author:         xlembed developers
Created on:     16/10/26, 10:05 am
"""
import numpy as np
import pytest

from src.embedding.matrix import EmbeddingMatrix, normalize_rows
from src.retrieval.result_io import write_retrieval_tsv, read_retrieval_tsv
from src.retrieval.similarity import similarity_matrix, retrieve
from src.utils.exception import ShapeError, ContractError, ParameterError
from tests.conftest import random_bank, naive_top_k


def basis_bank(indices, dim=3, prefix="e"):
    rows = np.eye(dim)[list(indices)]
    return normalize_rows(EmbeddingMatrix(
        rows=rows, ids=[f"{prefix}{i}" for i in range(len(rows))], langs=["en"] * len(rows)
    ))


class TestSimilarityMatrix:

    def test_orthonormal_basis(self):
        A = similarity_matrix(basis_bank([0, 1]), basis_bank([0, 1, 2]))
        np.testing.assert_array_equal(A, [[1, 0, 0], [0, 1, 0]])

    def test_self_similarity(self):
        A = similarity_matrix(basis_bank([0]), basis_bank([0]))
        np.testing.assert_allclose(A, [[1.0]])

    def test_matches_triple_loop(self, rng):
        Q = random_bank(rng, 50, 12, "q")
        S = random_bank(rng, 200, 12, "s")
        A = similarity_matrix(Q, S)
        q = Q.as_float64()
        s = S.as_float64()
        for i in range(0, 50, 7):
            for j in range(0, 200, 13):
                expected = sum(q[i, t] * s[j, t] for t in range(12))
                assert abs(A[i, j] - expected) < 1e-6
        assert np.all(A <= 1 + 1e-6) and np.all(A >= -1 - 1e-6)

    def test_dimension_mismatch(self, rng):
        with pytest.raises(ShapeError):
            similarity_matrix(random_bank(rng, 2, 4), random_bank(rng, 2, 5))

    def test_unnormalized_input(self):
        raw = EmbeddingMatrix(rows=[[1.0, 0.0]], ids=["a"], langs=["en"])
        with pytest.raises(ContractError):
            similarity_matrix(raw, basis_bank([0], dim=2))


class TestRetrieve:

    def test_basis_with_tie(self):
        Q = basis_bank([0])
        S = basis_bank([2, 0, 1], prefix="s")
        result = retrieve(Q, S, k=2)
        assert result.r.tolist() == [1]
        assert result.indices.tolist() == [[1, 0]]
        np.testing.assert_allclose(result.scores, [[1.0, 0.0]])

    def test_identical_rows_rank_by_index(self):
        Q = basis_bank([0])
        S = normalize_rows(EmbeddingMatrix(rows=np.tile([1.0, 0.0, 0.0], (5, 1)),
                                           ids=list("abcde"), langs=["en"] * 5))
        assert retrieve(Q, S, k=3).indices.tolist() == [[0, 1, 2]]

    @pytest.mark.parametrize("block_size", [1, 3, 7, 16, 50, 4096])
    def test_identical_wide_rows_rank_by_index_for_any_block(self, rng, block_size):
        row = normalize_rows(random_bank(rng, 1, 768, "q")).rows
        Q = EmbeddingMatrix(rows=row, ids=["q"], langs=["en"], normalized=True)
        S = EmbeddingMatrix(rows=np.tile(row, (50, 1)), ids=[f"s{i}" for i in range(50)], langs=["en"] * 50,
                            normalized=True)
        result = retrieve(Q, S, k=5, block_size=block_size)
        assert result.indices.tolist() == [[0, 1, 2, 3, 4]]
        assert len(set(result.scores[0].tolist())) == 1
        assert len(np.unique(similarity_matrix(Q, S))) == 1

    def test_random_matches_full_sort(self, rng):
        Q = random_bank(rng, 200, 16, "q")
        S = random_bank(rng, 1000, 16, "s")
        result = retrieve(Q, S, k=5)
        indices, scores = naive_top_k(Q.rows, S.rows, 5)
        np.testing.assert_array_equal(result.indices, indices)
        np.testing.assert_allclose(result.scores, scores, atol=1e-6)

    @pytest.mark.parametrize("threads", [1, 4])
    def test_oracle_equivalence_across_plans(self, threads):
        rng = np.random.default_rng(threads)
        for trial in range(50):
            n = int(rng.integers(1, 60))
            m = int(rng.integers(10, 700))
            k = int(rng.integers(1, 11))
            Q = random_bank(rng, n, 8, "q")
            S = random_bank(rng, m, 8, "s")
            block = int(rng.integers(1, 300))
            result = retrieve(Q, S, k=k, block_size=block, threads=threads)
            indices, scores = naive_top_k(Q.rows, S.rows, k)
            np.testing.assert_array_equal(result.indices, indices)
            np.testing.assert_allclose(result.scores, scores, atol=1e-6)

    def test_large_instance_thread_independent(self, rng):
        Q = random_bank(rng, 500, 24, "q")
        S = random_bank(rng, 5000, 24, "s")
        single = retrieve(Q, S, k=10, block_size=700, threads=1)
        parallel = retrieve(Q, S, k=10, block_size=1024, threads=4)
        assert single == parallel
        indices, _ = naive_top_k(Q.rows, S.rows, 10)
        np.testing.assert_array_equal(single.indices, indices)

    def test_result_invariants(self, rng):
        result = retrieve(random_bank(rng, 30, 6, "q"), random_bank(rng, 90, 6, "s"), k=7, block_size=16)
        np.testing.assert_array_equal(result.r, result.indices[:, 0])
        assert np.all(np.diff(result.scores, axis=1) <= 0)
        assert result.indices.min() >= 0 and result.indices.max() < 90

    def test_permutation_equivariance(self, rng):
        Q = random_bank(rng, 20, 8, "q")
        S = random_bank(rng, 120, 8, "s")
        perm = rng.permutation(120)
        # Row j of S lands at position pi[j] of the permuted bank
        pi = np.empty(120, dtype=np.int64)
        pi[perm] = np.arange(120)
        permuted = S.subset(perm.tolist())
        base = retrieve(Q, S, k=4)
        moved = retrieve(Q, permuted, k=4)
        np.testing.assert_array_equal(moved.indices, pi[base.indices])

    def test_k_larger_than_bank(self, rng):
        with pytest.raises(ParameterError):
            retrieve(random_bank(rng, 2, 4, "q"), random_bank(rng, 3, 4, "s"), k=4)

    def test_k_zero(self, rng):
        with pytest.raises(ParameterError):
            retrieve(random_bank(rng, 2, 4, "q"), random_bank(rng, 3, 4, "s"), k=0)


class TestResultTsv:

    def test_written_table(self, tmp_path):
        Q = basis_bank([0])
        S = basis_bank([2, 0, 1], prefix="s")
        result = retrieve(Q, S, k=2)
        write_retrieval_tsv(result, Q, S, tmp_path / "out.tsv")
        lines = (tmp_path / "out.tsv").read_text(encoding="utf-8").splitlines()
        assert lines == [
            "query_id\trank\tsearch_id\tscore",
            "e0\t1\ts1\t1.000000",
            "e0\t2\ts0\t0.000000",
        ]
        assert read_retrieval_tsv(tmp_path / "out.tsv") == {"e0": ["s1", "s0"]}
