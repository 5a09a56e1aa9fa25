"""
File:           synthetic.py
Author:         xlembed developers
Created on:     14/10/26, 11:00 am

Synthetic corpora with known answers. Every item gets a unit target vector in d_out; its frame
sequence is the target lifted to d_in by a fixed seeded linear map, tiled over T frames, plus
per-frame Gaussian noise. With a planted head the targets are replaced by the planted head's
output on those frames, so the training objective is exactly reachable.
"""
from typing import Dict, List, Optional, Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from src.distillation.head import forward
from src.distillation.models import FeatureSequence, HeadParameters, TrainingExample, save_feature_sequence
from src.embedding.matrix import EmbeddingMatrix
from src.embedding.store import save_embeddings
from src.pipeline.models import SyntheticSpec
from src.rebalance.constant import CommonVoiceHours
from src.rebalance.sampler import write_ids_tsv
from src.retrieval.result_io import write_truth_tsv
from src.utils import seeded_generator
from src.utils.enums import Modality, PoolingKind
from src.utils.exception import ArtifactIOError
from src.utils.logger import LogFacade


VOCABULARY = (
    "the", "a", "house", "river", "green", "small", "city", "walks", "reads", "quickly",
    "market", "we", "they", "open", "window", "train", "morning", "late", "book", "friend",
    "under", "bridge", "music", "cold", "water", "street", "old", "new", "speaks", "writes",
    "school", "garden", "night", "light", "road", "table", "bread", "sings", "north", "island",
)
MIN_WORDS: int = 4
MAX_WORDS: int = 10

logger = LogFacade.get_logger("pipeline")


@dataclass
class SyntheticCorpus:
    sequences: List[FeatureSequence]
    examples: List[TrainingExample]
    # Target bank aligned with sequences: row i is the text side of sequence i
    targets: EmbeddingMatrix
    # Targets followed by the distractors
    search: EmbeddingMatrix
    # Ground truth search index per query; the identity on the target rows
    u: np.ndarray
    planted_head: Optional[HeadParameters] = None

    @property
    def references(self) -> List[str]:
        return list(self.targets.texts)

    def text_pairs(self, retrieved: Sequence[int]) -> List[tuple]:
        """ (hypothesis, reference) per query for a top-1 index list """
        return [(self.search.texts[int(j)], self.targets.texts[i]) for i, j in enumerate(retrieved)]

    def corpus_index(self) -> Dict[str, List[str]]:
        index: Dict[str, List[str]] = {}
        for seq in self.sequences:
            index.setdefault(seq.lang, []).append(seq.id)
        return index

    def truth(self) -> Dict[str, str]:
        return {seq.id: self.search.ids[int(j)] for seq, j in zip(self.sequences, self.u)}


def language_codes(n_langs: int) -> List[str]:
    codes = list(CommonVoiceHours.HOURS)
    if n_langs <= len(codes):
        return codes[:n_langs]
    return [f"L{i:02d}" for i in range(n_langs)]


def language_sizes(n_items: int, n_langs: int, lang_skew: float) -> np.ndarray:
    """ Items per language, geometric in lang_skew, at least one each, largest remainder rounding """
    weights = lang_skew ** np.arange(n_langs, dtype=np.float64)
    share = weights / weights.sum() * (n_items - n_langs)
    sizes = 1 + np.floor(share).astype(np.int64)
    leftover = n_items - int(sizes.sum())
    remainders = share - np.floor(share)
    order = np.lexsort((np.arange(n_langs), -remainders))
    sizes[order[:leftover]] += 1
    return sizes


def unit_rows(rng: np.random.Generator, n: int, d: int) -> np.ndarray:
    rows = rng.standard_normal((n, d))
    return rows / np.linalg.norm(rows, axis=1, keepdims=True)


def sentence(rng: np.random.Generator) -> str:
    n_words = int(rng.integers(MIN_WORDS, MAX_WORDS + 1))
    return " ".join(VOCABULARY[int(i)] for i in rng.integers(0, len(VOCABULARY), size=n_words))


def planted_head_for(spec: SyntheticSpec, rng: np.random.Generator) -> HeadParameters:
    """ Random head with a non-trivial attention vector """
    head = HeadParameters.initialize(spec.d_in, spec.d_out, rng)
    head.w = rng.standard_normal(spec.d_in) / np.sqrt(spec.d_in)
    head.b = 0.1 * rng.standard_normal(spec.d_out)
    return head


def generate_synthetic(spec: SyntheticSpec) -> SyntheticCorpus:
    """ Deterministic for a given spec """
    rng = seeded_generator(spec.seed)
    langs = language_codes(spec.n_langs)
    sizes = language_sizes(spec.n_items, spec.n_langs, spec.lang_skew)
    item_langs = [lang for lang, size in zip(langs, sizes) for _ in range(int(size))]
    ids = [f"utt{i:05d}" for i in range(spec.n_items)]

    targets = unit_rows(rng, spec.n_items, spec.d_out)
    lift = rng.standard_normal((spec.d_out, spec.d_in)) / np.sqrt(spec.d_out)
    sequences: List[FeatureSequence] = []
    for i in range(spec.n_items):
        n_frames = int(rng.integers(spec.min_frames, spec.max_frames + 1))
        frames = np.tile(targets[i] @ lift, (n_frames, 1))
        frames += spec.noise_scale * rng.standard_normal((n_frames, spec.d_in))
        sequences.append(FeatureSequence(id=ids[i], frames=frames, lang=item_langs[i]))

    planted = spec.planted_head
    if planted is None and spec.planted:
        planted = planted_head_for(spec, rng)
    if planted is not None:
        targets = np.vstack([forward(seq, planted, PoolingKind.ATTENTION).z for seq in sequences])

    distractors = unit_rows(rng, spec.n_distractors, spec.d_out)
    texts = [sentence(rng) for _ in range(spec.n_items + spec.n_distractors)]
    distractor_ids = [f"dst{i:05d}" for i in range(spec.n_distractors)]

    target_bank = EmbeddingMatrix(
        rows=targets, ids=ids, langs=item_langs, modality=Modality.TEXT, texts=texts[:spec.n_items],
    )
    search = EmbeddingMatrix(
        rows=np.vstack([targets, distractors]),
        ids=ids + distractor_ids,
        langs=item_langs + ["und"] * spec.n_distractors,
        modality=Modality.TEXT,
        texts=texts,
    )
    examples = [TrainingExample(features=seq, target=t) for seq, t in zip(sequences, target_bank.as_float64())]
    logger.info(
        f"Generated {spec.n_items} items in {spec.n_langs} language(s) (sizes {sizes.tolist()}), "
        f"{spec.n_distractors} distractors, {spec.d_in} -> {spec.d_out}, noise {spec.noise_scale}"
    )
    return SyntheticCorpus(
        sequences=sequences,
        examples=examples,
        targets=target_bank,
        search=search,
        u=np.arange(spec.n_items, dtype=np.int64),
        planted_head=planted,
    )


def write_synthetic_corpus(corpus: SyntheticCorpus, out_dir: Path) -> Dict[str, Path]:
    """ Lay the corpus out the way a pipeline "data" section expects it """
    out_dir = Path(out_dir)
    features_dir = out_dir / "features"
    try:
        features_dir.mkdir(parents=True, exist_ok=True)
    except OSError as err:
        raise ArtifactIOError(f"Cannot create {features_dir}: {err}") from err
    for seq in corpus.sequences:
        save_feature_sequence(seq, features_dir / f"{seq.id}.xemb")
    paths = {
        "features_dir": features_dir,
        "targets_path": out_dir / "targets.xemb",
        "search_path": out_dir / "search.xemb",
        "truth_path": out_dir / "truth.tsv",
        "corpus_path": out_dir / "corpus.tsv",
    }
    save_embeddings(corpus.targets, paths["targets_path"])
    save_embeddings(corpus.search, paths["search_path"])
    write_truth_tsv(corpus.truth(), paths["truth_path"])
    write_ids_tsv([seq.id for seq in corpus.sequences], {s.id: s.lang for s in corpus.sequences}, paths["corpus_path"])
    logger.info(f"Wrote synthetic corpus of {len(corpus.sequences)} items to {out_dir}")
    return paths
