"""
File:           head.py
Author:         xlembed developers
Created on:     12/10/26, 11:05 am

Forward and backward passes of the pooling + projection head.
    attention pooling: v = softmax(C w), e = sum_t v_t c_t
    projection:        z = tanh(W e + b)
    loss:              cosine distance, L1 or L2 between z and the text target
Gradients are analytic; finite_difference_check compares them against central differences.
"""
from typing import Optional, Sequence, Tuple, Dict, List
from dataclasses import dataclass

import numpy as np

from src.distillation.models import FeatureSequence, HeadParameters, TrainingExample, HeadGradients
from src.embedding.matrix import EmbeddingMatrix, DEGENERATE_NORM
from src.utils.enums import LossKind, PoolingKind, Modality
from src.utils.exception import ShapeError, ParameterError, DegenerateVectorError, ValidationError


@dataclass
class ForwardCache:
    """ Intermediate values of one example, kept for the backward pass """
    e: np.ndarray
    z: np.ndarray
    v: Optional[np.ndarray] = None


def softmax(scores: np.ndarray) -> np.ndarray:
    shifted = scores - scores.max()
    weights = np.exp(shifted)
    return weights / weights.sum()


def attention_weights(C: FeatureSequence, w: np.ndarray) -> np.ndarray:
    """ v = softmax(C w) over the time axis """
    if w is None:
        raise ValidationError("Attention pooling needs an attention vector w")
    w = np.asarray(w, dtype=np.float64)
    if w.shape != (C.d_in,):
        raise ShapeError(f"Attention vector has shape {w.shape}, frames have dimension {C.d_in}")
    return softmax(C.frames @ w)


def _pool(C: FeatureSequence, params: Optional[HeadParameters], kind: PoolingKind) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    kind = PoolingKind(kind)
    if kind == PoolingKind.ATTENTION:
        v = attention_weights(C, None if params is None else params.w)
        return v @ C.frames, v
    if kind == PoolingKind.MEAN:
        return C.frames.mean(axis=0), None
    return C.frames.max(axis=0), None


def pool(C: FeatureSequence, params: Optional[HeadParameters], kind: PoolingKind) -> np.ndarray:
    """ Collapse a T x d_in sequence into one d_in vector """
    return _pool(C, params, kind)[0]


def project(e: np.ndarray, params: HeadParameters) -> np.ndarray:
    """ z = tanh(W e + b) """
    e = np.asarray(e, dtype=np.float64)
    if e.shape != (params.d_in,):
        raise ShapeError(f"Pooled vector has shape {e.shape}, projection expects ({params.d_in},)")
    return np.tanh(params.W @ e + params.b)


def forward(C: FeatureSequence, params: HeadParameters, kind: PoolingKind) -> ForwardCache:
    e, v = _pool(C, params, kind)
    return ForwardCache(e=e, z=project(e, params), v=v)


def loss_and_grad(z_s: np.ndarray, z_t: np.ndarray, kind: LossKind) -> Tuple[float, np.ndarray]:
    """ Loss value and its gradient with respect to z_s """
    kind = LossKind(kind)
    z_s = np.asarray(z_s, dtype=np.float64)
    z_t = np.asarray(z_t, dtype=np.float64)
    if z_s.shape != z_t.shape:
        raise ShapeError(f"Speech embedding {z_s.shape} and text embedding {z_t.shape} differ in shape")
    if kind == LossKind.COSINE:
        norm_s = np.linalg.norm(z_s)
        norm_t = np.linalg.norm(z_t)
        if norm_s <= DEGENERATE_NORM or norm_t <= DEGENERATE_NORM:
            raise DegenerateVectorError(
                f"Cosine loss on a near-zero vector (norms {norm_s:.3e}, {norm_t:.3e})"
            )
        cos = float(z_s @ z_t) / (norm_s * norm_t)
        grad = -(z_t / (norm_s * norm_t) - cos * z_s / norm_s ** 2)
        return 1.0 - cos, grad
    diff = z_s - z_t
    if kind == LossKind.L1:
        return float(np.abs(diff).sum()), np.sign(diff)
    return float(diff @ diff), 2.0 * diff


def loss(z_s: np.ndarray, z_t: np.ndarray, kind: LossKind) -> float:
    """ Distance between the speech embedding and the text embedding """
    return loss_and_grad(z_s, z_t, kind)[0]


def _backward(
        C: FeatureSequence, params: HeadParameters, cache: ForwardCache, g_z: np.ndarray, kind: PoolingKind
) -> Dict[str, np.ndarray]:
    g_u = g_z * (1.0 - cache.z ** 2)
    grads = {"W": np.outer(g_u, cache.e), "b": g_u, "w": np.zeros(params.d_in)}
    if PoolingKind(kind) == PoolingKind.ATTENTION:
        g_e = params.W.T @ g_u
        # d e / d s_t = v_t (c_t - e), d s / d w = C
        a = cache.v * (C.frames @ g_e - cache.e @ g_e)
        grads["w"] = C.frames.T @ a
    return grads


def loss_gradients(
        batch: Sequence[TrainingExample],
        params: HeadParameters,
        loss_kind: LossKind,
        pooling_kind: PoolingKind,
) -> HeadGradients:
    """ Gradients of the mean batch loss with respect to w, W and b, accumulated in example order """
    if not batch:
        raise ValidationError("Cannot compute gradients of an empty batch")
    total = {"w": np.zeros_like(params.w), "W": np.zeros_like(params.W), "b": np.zeros_like(params.b)}
    total_loss = 0.0
    for example in batch:
        if example.features.d_in != params.d_in or example.target.shape != (params.d_out,):
            raise ShapeError(
                f"Example '{example.features.id}' does not match the head {params.d_in} -> {params.d_out}"
            )
        cache = forward(example.features, params, pooling_kind)
        value, g_z = loss_and_grad(cache.z, example.target, loss_kind)
        for name, grad in _backward(example.features, params, cache, g_z, pooling_kind).items():
            total[name] += grad
        total_loss += value
    n = len(batch)
    return HeadGradients(w=total["w"] / n, W=total["W"] / n, b=total["b"] / n, loss=total_loss / n)


def batch_loss(
        batch: Sequence[TrainingExample], params: HeadParameters, loss_kind: LossKind, pooling_kind: PoolingKind
) -> float:
    """ Mean loss of a batch, forward pass only """
    values = [loss(forward(x.features, params, pooling_kind).z, x.target, loss_kind) for x in batch]
    return float(sum(values) / len(values))


def finite_difference_check(
        params: HeadParameters,
        batch: Sequence[TrainingExample],
        eps: float,
        loss_kind: LossKind = LossKind.COSINE,
        pooling_kind: PoolingKind = PoolingKind.ATTENTION,
        gradients: Optional[HeadGradients] = None,
) -> float:
    """
    Max over all parameter entries of |analytic - central| / max(|analytic|, |central|, 1e-12).
    Pass gradients to check a given set instead of the analytic ones.
    """
    if not 1e-8 < eps < 1e-3:
        raise ParameterError(f"Finite difference step {eps} is outside (1e-8, 1e-3)")
    analytic = (gradients or loss_gradients(batch, params, loss_kind, pooling_kind)).as_dict()
    shifted = params.copy()
    worst = 0.0
    for name, values in shifted.as_dict().items():
        flat = values.reshape(-1)
        grad = analytic[name].reshape(-1)
        for i in range(flat.size):
            original = flat[i]
            flat[i] = original + eps
            upper = batch_loss(batch, shifted, loss_kind, pooling_kind)
            flat[i] = original - eps
            lower = batch_loss(batch, shifted, loss_kind, pooling_kind)
            flat[i] = original
            central = (upper - lower) / (2.0 * eps)
            error = abs(grad[i] - central) / max(abs(grad[i]), abs(central), 1e-12)
            worst = max(worst, error)
    return worst


def embed_sequences(
        sequences: Sequence[FeatureSequence], params: HeadParameters, pooling_kind: PoolingKind
) -> EmbeddingMatrix:
    """ Run the head over a query DB and return the raw (unnormalized) speech embeddings """
    rows: List[np.ndarray] = [forward(seq, params, pooling_kind).z for seq in sequences]
    return EmbeddingMatrix(
        rows=np.vstack(rows) if rows else np.zeros((0, params.d_out)),
        ids=[seq.id for seq in sequences],
        langs=[seq.lang for seq in sequences],
        modality=Modality.SPEECH,
    )
