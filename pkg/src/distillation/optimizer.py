"""
File:           optimizer.py
Author:         xlembed developers
Created on:     12/10/26, 3:00 pm
"""
from typing import Dict, Tuple, Optional
from dataclasses import dataclass, field

import numpy as np

from src.distillation.config import AdamSettings
from src.distillation.models import HeadParameters, HeadGradients
from src.utils.exception import TrainingDivergenceError, ShapeError


@dataclass
class AdamState:
    """ First and second moment estimates per parameter plus the step counter """
    m: Dict[str, np.ndarray] = field(default_factory=dict)
    v: Dict[str, np.ndarray] = field(default_factory=dict)
    t: int = 0

    @classmethod
    def zeros_like(cls, params: HeadParameters) -> "AdamState":
        values = params.as_dict()
        return cls(
            m={k: np.zeros_like(x) for k, x in values.items()},
            v={k: np.zeros_like(x) for k, x in values.items()},
        )


def adam_step(
        params: HeadParameters,
        gradients: HeadGradients,
        state: AdamState,
        lr: float,
        settings: Optional[AdamSettings] = None,
) -> Tuple[HeadParameters, AdamState]:
    """ One bias corrected Adam update. Returns new parameters and state, inputs are untouched """
    settings = settings or AdamSettings()
    grads = gradients.as_dict()
    for name, grad in grads.items():
        if not np.all(np.isfinite(grad)):
            raise TrainingDivergenceError(f"Non-finite gradient for {name} at Adam step {state.t + 1}")
    t = state.t + 1
    bias1 = 1.0 - settings.beta1 ** t
    bias2 = 1.0 - settings.beta2 ** t
    updated: Dict[str, np.ndarray] = {}
    m_new: Dict[str, np.ndarray] = {}
    v_new: Dict[str, np.ndarray] = {}
    for name, value in params.as_dict().items():
        grad = grads[name]
        m = state.m.get(name, np.zeros_like(value))
        v = state.v.get(name, np.zeros_like(value))
        if m.shape != value.shape or v.shape != value.shape or grad.shape != value.shape:
            raise ShapeError(f"Adam state or gradient for {name} does not match parameter shape {value.shape}")
        m_new[name] = settings.beta1 * m + (1.0 - settings.beta1) * grad
        v_new[name] = settings.beta2 * v + (1.0 - settings.beta2) * grad * grad
        m_hat = m_new[name] / bias1
        v_hat = v_new[name] / bias2
        updated[name] = value - lr * m_hat / (np.sqrt(v_hat) + settings.eps)
    return HeadParameters.from_dict(updated), AdamState(m=m_new, v=v_new, t=t)
