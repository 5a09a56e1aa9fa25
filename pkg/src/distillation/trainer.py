"""
File:           trainer.py
Author:         xlembed developers
Created on:     13/10/26, 9:20 am
"""
from typing import List, Optional, Sequence
from dataclasses import dataclass, field
from pathlib import Path
import math

import numpy as np
import pandas as pd

from src.distillation.augment import feature_mask
from src.distillation.config import TrainConfig
from src.distillation.head import loss_gradients
from src.distillation.models import HeadParameters, TrainingExample, HeadGradients
from src.distillation.optimizer import AdamState, adam_step
from src.distillation.schedule import lr_schedule
from src.utils import seeded_generator, draw_seed
from src.utils.exception import TrainingDivergenceError, ValidationError, ShapeError, ArtifactIOError
from src.utils.logger import LogFacade


logger = LogFacade.get_logger("distillation")


@dataclass
class TrainResult:
    """ Final head and the per iteration learning rate and mean batch loss """
    params: HeadParameters
    losses: List[float] = field(default_factory=list)
    lrs: List[float] = field(default_factory=list)

    def loss_curve(self) -> pd.DataFrame:
        return pd.DataFrame({
            "iter": np.arange(1, len(self.losses) + 1),
            "lr": self.lrs,
            "loss": self.losses,
        })

    def save_loss_curve(self, path: Path) -> None:
        try:
            self.loss_curve().to_csv(path, index=False, float_format="%.10g", lineterminator="\n")
        except OSError as err:
            raise ArtifactIOError(f"Cannot write loss curve {path}: {err}") from err


class HeadTrainer:
    """ Seeded minibatch Adam over the head parameters, following the three phase schedule """

    def __init__(self, cfg: TrainConfig, init_params: Optional[HeadParameters] = None):
        self.cfg: TrainConfig = cfg
        self._init_params: Optional[HeadParameters] = init_params
        self._rng: np.random.Generator = seeded_generator(cfg.seed)

    def initial_params(self, d_in: int, d_out: int) -> HeadParameters:
        if self._init_params is not None:
            if (self._init_params.d_in, self._init_params.d_out) != (d_in, d_out):
                raise ShapeError(
                    f"Initial head is {self._init_params.d_in} -> {self._init_params.d_out}, "
                    f"data needs {d_in} -> {d_out}"
                )
            return self._init_params.copy()
        return HeadParameters.initialize(d_in, d_out, self._rng)

    def sample_batch(self, dataset: Sequence[TrainingExample]) -> List[TrainingExample]:
        """ Draw a batch without replacement, in ascending dataset order, masking each example """
        size = min(self.cfg.batch_size, len(dataset))
        picked = np.sort(self._rng.choice(len(dataset), size=size, replace=False))
        batch = []
        for index in picked:
            example = dataset[int(index)]
            if self.cfg.mask_params.enabled:
                masked = feature_mask(example.features, self.cfg.mask_params, draw_seed(self._rng))
                example = TrainingExample(features=masked, target=example.target)
            batch.append(example)
        return batch

    def step_gradients(self, batch: List[TrainingExample], params: HeadParameters, iteration: int) -> HeadGradients:
        grads = loss_gradients(batch, params, self.cfg.loss_kind, self.cfg.pooling_kind)
        if iteration < self.cfg.freeze_iters:
            # Projection-only phase
            grads.w = np.zeros_like(grads.w)
        return grads

    def fit(self, dataset: Sequence[TrainingExample]) -> TrainResult:
        if not dataset:
            raise ValidationError("Cannot train on an empty dataset")
        d_in = dataset[0].features.d_in
        d_out = dataset[0].target.shape[0]
        for example in dataset:
            if example.features.d_in != d_in or example.target.shape[0] != d_out:
                raise ShapeError(f"Example '{example.features.id}' does not match {d_in} -> {d_out}")
        params = self.initial_params(d_in, d_out)
        state = AdamState.zeros_like(params)
        result = TrainResult(params=params)
        logger.info(
            f"Training {self.cfg.pooling_kind.value}/{self.cfg.loss_kind.value} head {d_in} -> {d_out} on "
            f"{len(dataset)} examples for {self.cfg.total_iters} iterations "
            f"(freeze {self.cfg.freeze_iters}, batch {self.cfg.batch_size})"
        )
        for iteration in range(self.cfg.total_iters):
            lr = lr_schedule(iteration + 1, self.cfg)
            batch = self.sample_batch(dataset)
            grads = self.step_gradients(batch, params, iteration)
            if not math.isfinite(grads.loss):
                raise TrainingDivergenceError(f"Loss became {grads.loss} at iteration {iteration + 1}")
            params, state = adam_step(params, grads, state, lr, self.cfg.adam)
            result.losses.append(grads.loss)
            result.lrs.append(lr)
            if (iteration + 1) % self.cfg.log_every == 0:
                logger.info(f"iter {iteration + 1}: lr {lr:.3e} loss {grads.loss:.6f}")
        result.params = params
        if result.losses:
            logger.info(f"Finished training, last batch loss {result.losses[-1]:.6f}")
        return result


def train(
        dataset: Sequence[TrainingExample],
        cfg: TrainConfig,
        init_params: Optional[HeadParameters] = None,
) -> TrainResult:
    """ Train the head on (features, target) pairs """
    return HeadTrainer(cfg, init_params).fit(dataset)
