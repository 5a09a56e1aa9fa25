"""
File:           segmenter.py
Author:         xlembed developers
Created on:     13/10/26, 2:30 pm

Word boundary proposals from a frame feature sequence: cosine distance between adjacent frames,
then peak finding over the distance curve.
"""
from typing import Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd

from src.distillation.models import FeatureSequence
from src.embedding.matrix import DEGENERATE_NORM
from src.utils.exception import ShapeError, DegenerateVectorError, ParameterError, ArtifactIOError
from src.utils.logger import LogFacade


DEFAULT_THRESHOLD: float = 0.5
DEFAULT_MIN_SEPARATION: int = 2

logger = LogFacade.get_logger("segmentation")


@dataclass(frozen=True, eq=False)
class BoundaryProposal:
    """
    distances[t] is the cosine distance between frames t and t + 1.
    peaks are ascending indices into distances; the boundary falls before frame peak + 1.
    """
    distances: np.ndarray
    peaks: np.ndarray
    threshold: float
    min_separation: int

    @property
    def boundary_frames(self) -> np.ndarray:
        """ First frame of each proposed segment after a boundary """
        return self.peaks + 1

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "frame_index": self.boundary_frames.astype(np.int64),
            "distance": self.distances[self.peaks],
        })

    def save(self, path: Path) -> None:
        """ TSV of frame_index, distance """
        try:
            self.to_frame().to_csv(path, sep="\t", index=False, float_format="%.6f", lineterminator="\n")
        except OSError as err:
            raise ArtifactIOError(f"Cannot write boundaries to {path}: {err}") from err


def adjacent_distances(C: FeatureSequence) -> np.ndarray:
    """ d_t = 1 - cos(c_t, c_t+1), clipped to [0, 2] """
    if C.T < 2:
        raise ShapeError(f"Sequence '{C.id}' has {C.T} frame, need at least 2 for adjacent distances")
    norms = np.linalg.norm(C.frames, axis=1)
    zero = np.flatnonzero(norms <= DEGENERATE_NORM)
    if zero.size:
        raise DegenerateVectorError(f"Frame {int(zero[0])} of '{C.id}' has zero norm")
    dots = np.einsum("ij,ij->i", C.frames[:-1], C.frames[1:])
    cos = dots / (norms[:-1] * norms[1:])
    return np.clip(1.0 - cos, 0.0, 2.0)


def find_peaks(d: Sequence[float], threshold: float, min_separation: int) -> np.ndarray:
    """
    Local maxima with d[i] > d[i-1] and d[i] >= d[i+1] (ends count as -inf) and d[i] >= threshold.
    Peaks closer than min_separation are suppressed greedily, highest first, lower index on ties.
    """
    if int(min_separation) < 1:
        raise ParameterError(f"min_separation must be at least 1, got {min_separation}")
    d = np.asarray(d, dtype=np.float64).reshape(-1)
    if d.size == 0:
        return np.zeros(0, dtype=np.int64)
    left = np.concatenate(([-np.inf], d[:-1]))
    right = np.concatenate((d[1:], [-np.inf]))
    candidates = np.flatnonzero((d > left) & (d >= right) & (d >= threshold))
    order = candidates[np.lexsort((candidates, -d[candidates]))]
    kept = []
    for index in order:
        if all(abs(int(index) - j) >= min_separation for j in kept):
            kept.append(int(index))
    return np.array(sorted(kept), dtype=np.int64)


def propose_boundaries(
        C: FeatureSequence,
        threshold: float = DEFAULT_THRESHOLD,
        min_separation: int = DEFAULT_MIN_SEPARATION,
) -> BoundaryProposal:
    distances = adjacent_distances(C)
    peaks = find_peaks(distances, threshold, min_separation)
    logger.debug(f"'{C.id}': {peaks.size} boundaries over {C.T} frames (threshold {threshold})")
    return BoundaryProposal(
        distances=distances, peaks=peaks, threshold=float(threshold), min_separation=int(min_separation)
    )
