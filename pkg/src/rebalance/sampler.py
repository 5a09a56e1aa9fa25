"""
File:           sampler.py
Author:         xlembed developers
Created on:     11/10/26, 10:10 am

Multilingual re-balancing. With p_l = n_l / sum(n) the per language ratio is
    lambda_l = (1 / p_l) * p_l^alpha / sum_m p_m^alpha
Languages with lambda >= 1 are repeated (whole copies plus one random partial copy),
languages with lambda < 1 are down-sampled to a random subset.
"""
from typing import Dict, List, Mapping, Sequence, Tuple, Optional
from dataclasses import dataclass
from pathlib import Path
import csv
import math

import numpy as np
import pandas as pd

from src.utils import seeded_generator
from src.utils.exception import ParameterError, ValidationError, ArtifactIOError, FormatError
from src.utils.logger import LogFacade


logger = LogFacade.get_logger("rebalance")


@dataclass(frozen=True)
class LanguageStats:
    """ Utterance count per language """
    entries: Tuple[Tuple[str, int], ...]

    def __post_init__(self):
        entries = tuple((str(lang), count) for lang, count in self.entries)
        object.__setattr__(self, "entries", entries)
        if not entries:
            raise ValidationError("Language statistics need at least one language")
        langs = [lang for lang, _ in entries]
        if len(set(langs)) != len(langs):
            raise ValidationError(f"Duplicate language in statistics: {langs}")
        for lang, count in entries:
            if not count >= 1:
                raise ValidationError(f"Language {lang} has count {count}, expected >= 1")

    @property
    def langs(self) -> List[str]:
        return [lang for lang, _ in self.entries]

    @property
    def counts(self) -> np.ndarray:
        return np.array([count for _, count in self.entries], dtype=np.float64)

    @classmethod
    def from_mapping(cls, counts: Mapping[str, int]) -> "LanguageStats":
        return cls(entries=tuple(counts.items()))

    @classmethod
    def from_corpus(cls, corpus_index: Mapping[str, Sequence[str]]) -> "LanguageStats":
        return cls(entries=tuple((lang, len(ids)) for lang, ids in corpus_index.items()))

    @classmethod
    def from_tsv(cls, path: Path) -> "LanguageStats":
        """ Read a lang <tab> count table """
        path = Path(path)
        if not path.is_file():
            raise ArtifactIOError(f"Statistics file {path} doesn't exist")
        df = pd.read_csv(
            path, sep="\t", header=None, names=["lang", "count"], dtype={"lang": str},
            quoting=csv.QUOTE_NONE, keep_default_na=False, comment="#",
        )
        try:
            counts = pd.to_numeric(df["count"])
        except ValueError as err:
            raise FormatError(f"{path} has a non-numeric count: {err}") from err
        return cls(entries=tuple(zip(df["lang"], counts.tolist())))


@dataclass(frozen=True, eq=False)
class RebalancePlan:
    """ Per language ratios for one smoothing value """
    alpha: float
    langs: Tuple[str, ...]
    counts: np.ndarray
    ratios: np.ndarray
    seed: int = 0

    @property
    def probabilities(self) -> np.ndarray:
        return self.counts / self.counts.sum()

    @property
    def target_counts(self) -> np.ndarray:
        """ Expected count n_l * lambda_l per language """
        return self.counts * self.ratios

    @property
    def shares(self) -> np.ndarray:
        """ Share of each language in the re-balanced corpus """
        targets = self.target_counts
        return targets / targets.sum()

    def ratio_of(self, lang: str) -> float:
        return float(self.ratios[self.langs.index(lang)])

    def table(self) -> pd.DataFrame:
        return pd.DataFrame({
            "lang": list(self.langs),
            "n_l": self.counts.astype(np.int64),
            "p_l": self.probabilities,
            "lambda_l": self.ratios,
            "target_count": self.target_counts,
        })


def compute_ratios(stats: LanguageStats, alpha: float, seed: int = 0) -> RebalancePlan:
    """ Evaluate lambda_l for every language """
    if not 0.0 < alpha <= 1.0:
        raise ParameterError(f"alpha must lie in (0, 1], got {alpha}")
    counts = stats.counts
    p = counts / counts.sum()
    smoothed = p ** alpha
    smoothed /= smoothed.sum()
    ratios = smoothed / p
    plan = RebalancePlan(alpha=float(alpha), langs=tuple(stats.langs), counts=counts, ratios=ratios, seed=seed)
    logger.info(
        f"alpha={alpha}: lambda ranges {ratios.min():.4f} .. {ratios.max():.4f} over {len(counts)} languages"
    )
    return plan


def language_draw_sizes(n: int, ratio: float) -> Tuple[int, int]:
    """ (whole copies, size of the random partial copy) for one language """
    whole = int(math.floor(ratio))
    # Python round() is round-half-to-even
    partial = int(round((ratio - whole) * n))
    return whole, min(partial, n)


def apply_rebalance(corpus_index: Mapping[str, Sequence[str]], plan: RebalancePlan) -> List[str]:
    """ Materialise one re-balanced, shuffled id list """
    missing = [lang for lang in plan.langs if lang not in corpus_index]
    if missing:
        raise ValidationError(f"Corpus has no items for language(s) {missing}")
    extra = [lang for lang in corpus_index if lang not in plan.langs]
    if extra:
        raise ValidationError(f"Corpus language(s) {extra} are not in the re-balancing plan")
    rng = seeded_generator(plan.seed)
    emitted: List[str] = []
    for lang, expected, ratio in zip(plan.langs, plan.counts, plan.ratios):
        ids = list(corpus_index[lang])
        n = len(ids)
        if n != int(expected):
            logger.warning(f"Language {lang}: corpus holds {n} items, statistics say {int(expected)}")
        whole, partial = language_draw_sizes(n, ratio)
        emitted.extend(ids * whole)
        if partial:
            picked = rng.choice(n, size=partial, replace=False)
            emitted.extend(ids[i] for i in picked)
    order = rng.permutation(len(emitted))
    logger.info(f"Re-balanced corpus: {sum(len(v) for v in corpus_index.values())} -> {len(emitted)} items")
    return [emitted[i] for i in order]


def draw_training_subset(ids: Sequence[str], size: int, seed: int) -> List[str]:
    """ Randomly draw a fixed number of items from a (re-balanced) id list, without replacement """
    if not 0 <= size <= len(ids):
        raise ParameterError(f"Cannot draw {size} items from a list of {len(ids)}")
    rng = seeded_generator(seed)
    picked = np.sort(rng.choice(len(ids), size=size, replace=False))
    return [ids[i] for i in picked]


def read_corpus_tsv(path: Path) -> Dict[str, List[str]]:
    """ Read an id <tab> lang table into per language id lists, keeping file order """
    path = Path(path)
    if not path.is_file():
        raise ArtifactIOError(f"Corpus file {path} doesn't exist")
    df = pd.read_csv(
        path, sep="\t", header=None, names=["id", "lang"], dtype=str,
        quoting=csv.QUOTE_NONE, keep_default_na=False,
    )
    corpus: Dict[str, List[str]] = {}
    for item_id, lang in zip(df["id"], df["lang"]):
        corpus.setdefault(lang, []).append(item_id)
    return corpus


def write_ids_tsv(ids: Sequence[str], lang_of: Optional[Mapping[str, str]], path: Path) -> None:
    """ Write the re-balanced list, one id (and its language when known) per line """
    df = pd.DataFrame({"id": list(ids)})
    if lang_of is not None:
        df["lang"] = [lang_of[x] for x in ids]
    df.to_csv(path, sep="\t", index=False, header=False, lineterminator="\n")
