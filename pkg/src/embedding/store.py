"""
File:           store.py
Author:         xlembed developers
Created on:     08/10/26, 11:40 am

Embedding container on disk:
    magic "XEMB0001" (8 ASCII bytes), dim as uint32 LE, count as uint64 LE, then count * dim
    float32 LE values row-major.
Sidecar metadata at <path>.meta.tsv, one line per row: id, language, modality, optional text.
"""
from typing import List, Optional, Tuple
from pathlib import Path
import struct

import numpy as np

from src.embedding.matrix import EmbeddingMatrix
from src.utils.enums import Modality
from src.utils.exception import (
    FormatError, TruncationError, ValidationError, ArtifactIOError, ShapeError
)
from src.utils.logger import LogFacade


MAGIC: bytes = b"XEMB0001"
HEADER = struct.Struct("<8sIQ")
PAYLOAD_DTYPE = np.dtype("<f4")
SIDECAR_SUFFIX: str = ".meta.tsv"

logger = LogFacade.get_logger("embedding")


def sidecar_path(path: Path) -> Path:
    """ Sidecar metadata path for an embedding file """
    path = Path(path)
    return path.with_name(path.name + SIDECAR_SUFFIX)


def save_embeddings(m: EmbeddingMatrix, path: Path) -> None:
    """ Write the binary container and its sidecar """
    path = Path(path)
    m.validate()
    lines = []
    for i, row_id in enumerate(m.ids):
        fields = [row_id, m.langs[i], m.modality.value]
        if m.texts is not None:
            fields.append(m.texts[i])
        for value in fields:
            if "\t" in value or "\n" in value or "\r" in value:
                raise ValidationError(f"Metadata of row '{row_id}' contains a tab or newline")
        lines.append("\t".join(fields) + "\n")
    payload = np.ascontiguousarray(m.rows, dtype=PAYLOAD_DTYPE).tobytes()
    try:
        with open(path, mode="wb") as fp_:
            fp_.write(HEADER.pack(MAGIC, m.dim, m.count))
            fp_.write(payload)
        with open(sidecar_path(path), mode="w", encoding="utf-8", newline="") as fp_:
            fp_.writelines(lines)
    except OSError as err:
        raise ArtifactIOError(f"Cannot write embeddings to {path}: {err}") from err
    logger.debug(f"Saved {m.count} x {m.dim} embeddings to {path}")


def read_container(path: Path) -> np.ndarray:
    """ Parse the binary part of an embedding file and return the count x dim rows """
    path = Path(path)
    if not path.is_file():
        raise ArtifactIOError(f"Embedding file {path} doesn't exist")
    try:
        with open(path, mode="rb") as fp_:
            data = fp_.read()
    except OSError as err:
        raise ArtifactIOError(f"Cannot read {path}: {err}") from err
    if len(data) < HEADER.size:
        raise FormatError(f"{path} is too short to hold an embedding header")
    magic, dim, count = HEADER.unpack_from(data)
    if magic != MAGIC:
        raise FormatError(f"{path} has bad magic {magic!r}, expected {MAGIC!r}")
    if dim < 1:
        raise FormatError(f"{path} declares dimension {dim}")
    payload = memoryview(data)[HEADER.size:]
    expected = count * dim * PAYLOAD_DTYPE.itemsize
    if len(payload) != expected:
        raise TruncationError(
            f"{path} declares {count} x {dim} values ({expected} bytes) but carries {len(payload)} bytes"
        )
    return np.frombuffer(payload, dtype=PAYLOAD_DTYPE).reshape(count, dim)


def read_sidecar(path: Path, count: int) -> Tuple[List[str], List[str], List[str], Optional[List[str]]]:
    """ Parse the sidecar metadata table: ids, languages, modalities and texts (None if absent) """
    meta_path = sidecar_path(path)
    if not meta_path.is_file():
        raise ArtifactIOError(f"Sidecar metadata {meta_path} doesn't exist")
    ids, langs, modalities, texts = [], [], [], []
    has_text = False
    with open(meta_path, mode="r", encoding="utf-8", newline="") as fp_:
        for line_no, line in enumerate(fp_, start=1):
            fields = line.rstrip("\n").split("\t")
            if len(fields) not in (3, 4):
                raise FormatError(f"{meta_path}:{line_no} has {len(fields)} fields, expected 3 or 4")
            ids.append(fields[0])
            langs.append(fields[1])
            modalities.append(fields[2])
            if len(fields) == 4:
                has_text = True
                texts.append(fields[3])
            else:
                texts.append("")
    if len(ids) != count:
        raise FormatError(f"{meta_path} has {len(ids)} rows but the container holds {count}")
    return ids, langs, modalities, texts if has_text else None


def load_embeddings(path: Path) -> EmbeddingMatrix:
    """ Load an embedding file and its sidecar """
    path = Path(path)
    rows = read_container(path)
    ids, langs, modalities, texts = read_sidecar(path, rows.shape[0])
    kinds = set(modalities)
    if len(kinds) > 1:
        raise ValidationError(f"{path} mixes modalities {sorted(kinds)}")
    try:
        modality = Modality(kinds.pop()) if kinds else Modality.TEXT
    except ValueError as err:
        raise FormatError(f"{path} has unknown modality: {err}") from err
    m = EmbeddingMatrix(rows=rows, ids=ids, langs=langs, modality=modality, texts=texts)
    logger.debug(f"Loaded {m.count} x {m.dim} {m.modality.value} embeddings from {path}")
    return m


def feature_row_id(sequence_id: str, frame: int) -> str:
    return f"{sequence_id}#{frame}"


def save_frames(sequence_id: str, frames: np.ndarray, path: Path, lang: str = "und") -> None:
    """ Store a T x d frame sequence in the embedding container """
    frames = np.asarray(frames)
    if frames.ndim != 2:
        raise ShapeError(f"Frames of '{sequence_id}' must be 2D, got shape {frames.shape}")
    m = EmbeddingMatrix(
        rows=frames,
        ids=[feature_row_id(sequence_id, t) for t in range(frames.shape[0])],
        langs=[lang] * frames.shape[0],
        modality=Modality.SPEECH,
    )
    save_embeddings(m, path)


def load_frames(path: Path) -> Tuple[str, np.ndarray, str]:
    """ Load a frame sequence. Returns (sequence id, T x d float64 frames, language) """
    path = Path(path)
    m = load_embeddings(path)
    sequence_id = path.name[: -len(".xemb")] if path.name.endswith(".xemb") else path.stem
    lang = m.langs[0] if m.count else "und"
    return sequence_id, m.as_float64(), lang
