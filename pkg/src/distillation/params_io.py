"""
File:           params_io.py
Author:         xlembed developers
Created on:     13/10/26, 10:05 am

Head parameters in the embedding container. The container has d_in + 1 columns:
    row "w"        tag "attention"   [w_1 .. w_d_in, 0]
    row "W:<i>"    tag "projection"  [W_i1 .. W_i,d_in, b_i]   for i = 0 .. d_out - 1
Values are stored as float32.
"""
from pathlib import Path

import numpy as np

from src.distillation.models import HeadParameters
from src.embedding.matrix import EmbeddingMatrix
from src.embedding.store import save_embeddings, load_embeddings
from src.utils.enums import Modality
from src.utils.exception import FormatError
from src.utils.logger import LogFacade


ATTENTION_TAG: str = "attention"
PROJECTION_TAG: str = "projection"

logger = LogFacade.get_logger("distillation")


def projection_row_id(i: int) -> str:
    return f"W:{i}"


def head_to_matrix(params: HeadParameters) -> EmbeddingMatrix:
    rows = np.zeros((params.d_out + 1, params.d_in + 1))
    rows[0, :params.d_in] = params.w
    rows[1:, :params.d_in] = params.W
    rows[1:, params.d_in] = params.b
    return EmbeddingMatrix(
        rows=rows,
        ids=["w"] + [projection_row_id(i) for i in range(params.d_out)],
        langs=[ATTENTION_TAG] + [PROJECTION_TAG] * params.d_out,
        modality=Modality.SPEECH,
    )


def matrix_to_head(m: EmbeddingMatrix) -> HeadParameters:
    if m.count < 2 or m.dim < 2:
        raise FormatError(f"Head parameter file holds {m.count} x {m.dim} values, need at least 2 x 2")
    expected_ids = ("w",) + tuple(projection_row_id(i) for i in range(m.count - 1))
    if m.ids != expected_ids:
        raise FormatError(f"Head parameter rows are {list(m.ids[:3])}..., expected w, W:0, W:1, ...")
    if m.langs[0] != ATTENTION_TAG or any(x != PROJECTION_TAG for x in m.langs[1:]):
        raise FormatError("Head parameter sections are not labeled attention / projection")
    rows = m.as_float64()
    d_in = m.dim - 1
    return HeadParameters(w=rows[0, :d_in].copy(), W=rows[1:, :d_in].copy(), b=rows[1:, d_in].copy())


def save_head_params(params: HeadParameters, path: Path) -> None:
    save_embeddings(head_to_matrix(params), path)
    logger.info(f"Saved {params.d_in} -> {params.d_out} head parameters to {path}")


def load_head_params(path: Path) -> HeadParameters:
    params = matrix_to_head(load_embeddings(path))
    logger.info(f"Loaded {params.d_in} -> {params.d_out} head parameters from {path}")
    return params
