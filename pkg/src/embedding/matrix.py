"""
File:           matrix.py
Author:         xlembed developers
Created on:     08/10/26, 10:02 am
"""
from typing import Optional, Tuple, Sequence
from dataclasses import dataclass, field

import numpy as np

from src.utils.enums import Modality
from src.utils.exception import ValidationError, ShapeError, DegenerateVectorError


DEFAULT_DIM: int = 768
NORM_TOLERANCE: float = 1e-6
DEGENERATE_NORM: float = 1e-12


@dataclass(frozen=True, eq=False)
class EmbeddingMatrix:
    """
    A bank of fixed dimension vectors with ids, language tags and a modality.
    Rows are stored as float32 and are read-only once the matrix is built.
    """
    rows: np.ndarray
    ids: Tuple[str, ...]
    langs: Tuple[str, ...]
    modality: Modality = Modality.TEXT
    texts: Optional[Tuple[str, ...]] = None
    normalized: bool = field(default=False)

    def __post_init__(self):
        rows = np.array(self.rows, dtype=np.float32, copy=True)
        if rows.ndim != 2:
            raise ShapeError(f"Embedding rows must be 2D, got shape {rows.shape}")
        if rows.shape[1] < 1:
            raise ShapeError("Embedding dimension must be positive")
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "ids", tuple(str(x) for x in self.ids))
        object.__setattr__(self, "langs", tuple(str(x) for x in self.langs))
        object.__setattr__(self, "modality", Modality(self.modality))
        if self.texts is not None:
            object.__setattr__(self, "texts", tuple(str(x) for x in self.texts))
        self.validate()

    def validate(self) -> None:
        """ Check the matrix invariants """
        count = self.rows.shape[0]
        if len(self.ids) != count:
            raise ShapeError(f"{len(self.ids)} ids for {count} rows")
        if len(self.langs) != count:
            raise ShapeError(f"{len(self.langs)} language tags for {count} rows")
        if self.texts is not None and len(self.texts) != count:
            raise ShapeError(f"{len(self.texts)} texts for {count} rows")
        if len(set(self.ids)) != count:
            seen = set()
            duplicate = next(x for x in self.ids if x in seen or seen.add(x))
            raise ValidationError(f"Duplicate embedding id '{duplicate}'")
        if not np.all(np.isfinite(self.rows)):
            raise ValidationError("Embedding rows contain non-finite values")
        if self.normalized and count:
            norms = np.linalg.norm(self.rows.astype(np.float64), axis=1)
            bad = np.flatnonzero(np.abs(norms - 1.0) >= NORM_TOLERANCE)
            if bad.size:
                raise ValidationError(
                    f"Row '{self.ids[bad[0]]}' has norm {norms[bad[0]]} but matrix is flagged normalized"
                )

    @property
    def dim(self) -> int:
        return int(self.rows.shape[1])

    @property
    def count(self) -> int:
        return int(self.rows.shape[0])

    def __len__(self) -> int:
        return self.count

    def as_float64(self) -> np.ndarray:
        return self.rows.astype(np.float64)

    def index_of(self) -> dict:
        """ Map of id to row index """
        return {x: i for i, x in enumerate(self.ids)}

    def subset(self, indices: Sequence[int]) -> "EmbeddingMatrix":
        """ Return the rows at the given positions, in that order """
        indices = list(indices)
        return EmbeddingMatrix(
            rows=self.rows[indices] if indices else np.zeros((0, self.dim), dtype=np.float32),
            ids=[self.ids[i] for i in indices],
            langs=[self.langs[i] for i in indices],
            modality=self.modality,
            texts=None if self.texts is None else [self.texts[i] for i in indices],
            normalized=self.normalized,
        )

    def has_texts(self) -> bool:
        return self.texts is not None and any(self.texts)

    def equals(self, other: "EmbeddingMatrix") -> bool:
        """ Bit exact rows and equal metadata. The normalized flag is derived state and not compared """
        return (
            self.rows.shape == other.rows.shape
            and self.rows.tobytes() == other.rows.tobytes()
            and self.ids == other.ids
            and self.langs == other.langs
            and self.modality == other.modality
            and (self.texts or None) == (other.texts or None)
        )

    @classmethod
    def empty(cls, dim: int = DEFAULT_DIM, modality: Modality = Modality.TEXT) -> "EmbeddingMatrix":
        return cls(rows=np.zeros((0, dim), dtype=np.float32), ids=(), langs=(), modality=modality)


def row_norms(m: EmbeddingMatrix) -> np.ndarray:
    """ L2 norm of every row, computed in float64 """
    return np.linalg.norm(m.as_float64(), axis=1)


def is_unit_normalized(m: EmbeddingMatrix) -> bool:
    """ True if every row has norm within tolerance of 1 """
    return bool(np.all(np.abs(row_norms(m) - 1.0) < NORM_TOLERANCE))


def normalize_rows(m: EmbeddingMatrix) -> EmbeddingMatrix:
    """ Divide each row by its L2 norm. Already normalized matrices come back unchanged """
    if m.normalized:
        return m
    norms = row_norms(m)
    degenerate = np.flatnonzero(norms <= DEGENERATE_NORM)
    if degenerate.size:
        raise DegenerateVectorError(
            f"Row '{m.ids[degenerate[0]]}' has norm {norms[degenerate[0]]:.3e}, cannot normalize"
        )
    rows = m.as_float64() / norms[:, None] if m.count else m.as_float64()
    return EmbeddingMatrix(
        rows=rows.astype(np.float32),
        ids=m.ids,
        langs=m.langs,
        modality=m.modality,
        texts=m.texts,
        normalized=True,
    )
