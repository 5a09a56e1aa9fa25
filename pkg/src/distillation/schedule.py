"""
File:           schedule.py
Author:         xlembed developers
Created on:     12/10/26, 2:15 pm
"""
from typing import Tuple

from src.distillation.config import TrainConfig
from src.utils.exception import ParameterError


def phase_boundaries(cfg: TrainConfig) -> Tuple[int, int]:
    """ Last iteration of the warm-up and of the constant phase """
    warmup_end = int(round(cfg.warmup_frac * cfg.total_iters))
    constant_end = int(round((cfg.warmup_frac + cfg.constant_frac) * cfg.total_iters))
    return warmup_end, constant_end


def lr_schedule(iteration: int, cfg: TrainConfig) -> float:
    """
    Three phase schedule: linear warm-up from 0 to max_lr, constant max_lr, then linear decay to 0
    at total_iters.
    """
    total = cfg.total_iters
    if not 0 <= iteration <= total:
        raise ParameterError(f"Iteration {iteration} is outside [0, {total}]")
    warmup_end, constant_end = phase_boundaries(cfg)
    if iteration <= warmup_end:
        if warmup_end == 0:
            return cfg.max_lr
        return cfg.max_lr * (iteration / warmup_end)
    if iteration <= constant_end:
        return cfg.max_lr
    return cfg.max_lr * ((total - iteration) / (total - constant_end))
