"""
File:           test_synthetic.py
Author:         xlembed developers
Created on:     18/10/26, 9:30 am
"""
import numpy as np
import pytest
from pydantic import ValidationError as PydanticValidationError

from src.distillation.head import batch_loss
from src.distillation.models import load_feature_dir
from src.embedding.store import load_embeddings
from src.pipeline.models import SyntheticSpec
from src.pipeline.synthetic import generate_synthetic, write_synthetic_corpus, language_sizes, language_codes
from src.rebalance.sampler import read_corpus_tsv
from src.retrieval.result_io import read_truth_tsv
from src.utils.enums import LossKind, PoolingKind


SMALL = SyntheticSpec(n_items=12, n_langs=3, d_in=10, d_out=6, min_frames=2, max_frames=5,
                      seed=4, n_distractors=20, lang_skew=0.5)


class TestGenerateSynthetic:

    def test_deterministic(self):
        first = generate_synthetic(SMALL)
        second = generate_synthetic(SMALL)
        for a, b in zip(first.sequences, second.sequences):
            np.testing.assert_array_equal(a.frames, b.frames)
        np.testing.assert_array_equal(first.search.rows, second.search.rows)
        assert first.search.texts == second.search.texts

    def test_seed_changes_corpus(self):
        first = generate_synthetic(SMALL)
        other = generate_synthetic(SMALL.copy(update={"seed": 5}))
        assert not np.array_equal(first.targets.rows, other.targets.rows)

    def test_targets_of_different_seeds_are_near_orthogonal(self):
        spec = SyntheticSpec(n_items=64, d_out=32, seed=1)
        first = generate_synthetic(spec).targets.as_float64()
        second = generate_synthetic(spec.copy(update={"seed": 2})).targets.as_float64()
        cos = first @ second.T
        assert np.abs(np.diag(cos)).max() < 0.6
        assert np.abs(cos).mean() < 0.2
        assert np.quantile(np.abs(cos), 0.99) < 0.6

    def test_layout(self):
        corpus = generate_synthetic(SMALL)
        assert corpus.search.count == 32
        assert corpus.search.ids[:2] == ("utt00000", "utt00001")
        assert corpus.search.ids[12] == "dst00000"
        assert corpus.search.langs[12:] == ("und",) * 20
        np.testing.assert_array_equal(corpus.u, np.arange(12))
        np.testing.assert_array_equal(corpus.search.rows[:12], corpus.targets.rows)
        norms = np.linalg.norm(corpus.targets.as_float64(), axis=1)
        np.testing.assert_allclose(norms, 1.0, atol=1e-6)
        for seq in corpus.sequences:
            assert 2 <= seq.T <= 5 and seq.d_in == 10
        assert corpus.truth()["utt00003"] == "utt00003"

    def test_language_split(self):
        corpus = generate_synthetic(SMALL)
        index = corpus.corpus_index()
        assert list(index) == ["EN", "DE", "CA"]
        assert [len(v) for v in index.values()] == language_sizes(12, 3, 0.5).tolist()

    def test_sentences(self):
        corpus = generate_synthetic(SMALL)
        for text in corpus.search.texts:
            assert 4 <= len(text.split()) <= 10
        pairs = corpus.text_pairs([0, 1])
        assert pairs[0] == (corpus.search.texts[0], corpus.references[0])

    def test_planted_head_reaches_zero_loss(self):
        spec = SMALL.copy(update={"planted": True, "noise_scale": 0.0})
        corpus = generate_synthetic(spec)
        assert corpus.planted_head is not None
        assert batch_loss(corpus.examples, corpus.planted_head, LossKind.COSINE, PoolingKind.ATTENTION) < 1e-10

    def test_noise_free_frames_are_tiled(self):
        corpus = generate_synthetic(SMALL.copy(update={"noise_scale": 0.0}))
        for seq in corpus.sequences:
            np.testing.assert_array_equal(seq.frames, np.tile(seq.frames[0], (seq.T, 1)))


class TestSyntheticSpec:

    def test_more_languages_than_items(self):
        with pytest.raises(PydanticValidationError):
            SyntheticSpec(n_items=2, n_langs=3)

    def test_frame_range(self):
        with pytest.raises(PydanticValidationError):
            SyntheticSpec(n_items=2, min_frames=5, max_frames=4)

    def test_unknown_key(self):
        with pytest.raises(PydanticValidationError):
            SyntheticSpec(n_items=2, n_speakers=3)


class TestLanguageSizes:

    def test_even_split_with_remainder(self):
        assert language_sizes(10, 3, 1.0).tolist() == [4, 3, 3]

    @pytest.mark.parametrize("n_items, n_langs, skew", [(200, 4, 0.5), (25, 25, 0.3), (1000, 7, 0.9)])
    def test_total_and_minimum(self, n_items, n_langs, skew):
        sizes = language_sizes(n_items, n_langs, skew)
        assert sizes.sum() == n_items
        assert sizes.min() >= 1
        assert sizes[0] >= sizes[-1]

    def test_codes(self):
        assert language_codes(2) == ["EN", "DE"]
        assert language_codes(30)[-1] == "L29"


class TestWriteSyntheticCorpus:

    def test_files(self, tmp_path):
        corpus = generate_synthetic(SMALL)
        paths = write_synthetic_corpus(corpus, tmp_path / "corpus")
        sequences = load_feature_dir(paths["features_dir"])
        assert [s.id for s in sequences] == [s.id for s in corpus.sequences]
        np.testing.assert_allclose(sequences[0].frames, corpus.sequences[0].frames, rtol=1e-6, atol=1e-6)
        assert sequences[0].lang == corpus.sequences[0].lang
        search = load_embeddings(paths["search_path"])
        assert search.equals(corpus.search)
        assert read_truth_tsv(paths["truth_path"]) == corpus.truth()
        assert read_corpus_tsv(paths["corpus_path"]) == corpus.corpus_index()
