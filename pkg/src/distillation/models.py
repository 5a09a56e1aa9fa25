"""
File:           models.py
Author:         xlembed developers
Created on:     12/10/26, 9:40 am
"""
from typing import Dict, List, Optional
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from src.embedding.store import load_frames, save_frames
from src.utils.exception import ShapeError, ValidationError, ArtifactIOError


@dataclass(frozen=True, eq=False)
class FeatureSequence:
    """ T x d_in frame vectors of one utterance """
    id: str
    frames: np.ndarray
    lang: str = "und"

    def __post_init__(self):
        frames = np.array(self.frames, dtype=np.float64, copy=True)
        if frames.ndim != 2:
            raise ShapeError(f"Frames of '{self.id}' must be T x d, got shape {frames.shape}")
        if frames.shape[0] < 1:
            raise ShapeError(f"Sequence '{self.id}' has no frames")
        if frames.shape[1] < 1:
            raise ShapeError(f"Sequence '{self.id}' has zero feature dimension")
        if not np.all(np.isfinite(frames)):
            raise ValidationError(f"Sequence '{self.id}' has non-finite values")
        frames.setflags(write=False)
        object.__setattr__(self, "frames", frames)

    @property
    def T(self) -> int:
        return int(self.frames.shape[0])

    @property
    def d_in(self) -> int:
        return int(self.frames.shape[1])

    def with_frames(self, frames: np.ndarray) -> "FeatureSequence":
        return FeatureSequence(id=self.id, frames=frames, lang=self.lang)


@dataclass(eq=False)
class HeadParameters:
    """ Trainable head: attention vector w, projection W (d_out x d_in) and bias b """
    w: np.ndarray
    W: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        self.w = np.asarray(self.w, dtype=np.float64)
        self.W = np.asarray(self.W, dtype=np.float64)
        self.b = np.asarray(self.b, dtype=np.float64)
        if self.W.ndim != 2:
            raise ShapeError(f"Projection must be 2D, got shape {self.W.shape}")
        if self.w.shape != (self.d_in,):
            raise ShapeError(f"Attention vector has shape {self.w.shape}, expected ({self.d_in},)")
        if self.b.shape != (self.d_out,):
            raise ShapeError(f"Bias has shape {self.b.shape}, expected ({self.d_out},)")
        for name, value in self.as_dict().items():
            if not np.all(np.isfinite(value)):
                raise ValidationError(f"Head parameter {name} has non-finite values")

    @property
    def d_in(self) -> int:
        return int(self.W.shape[1])

    @property
    def d_out(self) -> int:
        return int(self.W.shape[0])

    def as_dict(self) -> Dict[str, np.ndarray]:
        return {"w": self.w, "W": self.W, "b": self.b}

    def copy(self) -> "HeadParameters":
        return HeadParameters(w=self.w.copy(), W=self.W.copy(), b=self.b.copy())

    @classmethod
    def from_dict(cls, values: Dict[str, np.ndarray]) -> "HeadParameters":
        return cls(w=values["w"], W=values["W"], b=values["b"])

    @classmethod
    def initialize(cls, d_in: int, d_out: int, rng: np.random.Generator) -> "HeadParameters":
        """ w = 0 (attention starts as mean pooling), W ~ U(-1/sqrt(d_in), 1/sqrt(d_in)), b = 0 """
        if d_in < 1 or d_out < 1:
            raise ShapeError(f"Head dimensions must be positive, got {d_in} -> {d_out}")
        bound = 1.0 / np.sqrt(d_in)
        return cls(
            w=np.zeros(d_in),
            W=rng.uniform(-bound, bound, size=(d_out, d_in)),
            b=np.zeros(d_out),
        )


@dataclass(frozen=True, eq=False)
class TrainingExample:
    """ Feature sequence paired with its precomputed text embedding target """
    features: FeatureSequence
    target: np.ndarray

    def __post_init__(self):
        target = np.array(self.target, dtype=np.float64, copy=True).reshape(-1)
        if not np.linalg.norm(target) > 0:
            raise ValidationError(f"Target of '{self.features.id}' has zero norm")
        target.setflags(write=False)
        object.__setattr__(self, "target", target)


@dataclass
class HeadGradients:
    """ Gradients of the mean batch loss """
    w: np.ndarray
    W: np.ndarray
    b: np.ndarray
    loss: float

    def as_dict(self) -> Dict[str, np.ndarray]:
        return {"w": self.w, "W": self.W, "b": self.b}


def save_feature_sequence(seq: FeatureSequence, path: Path) -> None:
    save_frames(seq.id, seq.frames, path, lang=seq.lang)


def load_feature_sequence(path: Path) -> FeatureSequence:
    sequence_id, frames, lang = load_frames(path)
    return FeatureSequence(id=sequence_id, frames=frames, lang=lang)


def load_feature_dir(directory: Path, ids: Optional[List[str]] = None) -> List[FeatureSequence]:
    """ Load every *.xemb feature file of a directory, sorted by sequence id """
    directory = Path(directory)
    if not directory.is_dir():
        raise ArtifactIOError(f"Feature directory {directory} doesn't exist")
    if ids is not None:
        paths = [directory / f"{x}.xemb" for x in ids]
    else:
        paths = sorted(directory.glob("*.xemb"))
    return [load_feature_sequence(p) for p in paths]
