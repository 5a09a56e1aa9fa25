"""
File:           config.py
Author:         xlembed developers
Created on:     12/10/26, 9:00 am
"""
from pydantic import BaseModel, Field, validator, root_validator

from src.utils.enums import LossKind, PoolingKind


class MaskParams(BaseModel):
    """ Zero-filled time and channel masks applied to a feature sequence """
    num_time_masks: int = Field(0, ge=0)
    max_time_width: int = Field(0, ge=0)
    num_channel_masks: int = Field(0, ge=0)
    max_channel_width: int = Field(0, ge=0)

    class Config:
        extra = "forbid"

    @property
    def enabled(self) -> bool:
        return (self.num_time_masks > 0 and self.max_time_width > 0) or \
            (self.num_channel_masks > 0 and self.max_channel_width > 0)


class AdamSettings(BaseModel):
    beta1: float = Field(0.9, ge=0.0, lt=1.0)
    beta2: float = Field(0.999, ge=0.0, lt=1.0)
    eps: float = Field(1e-8, gt=0.0)

    class Config:
        extra = "forbid"


class TrainConfig(BaseModel):
    """ Head training recipe: schedule, freeze phase, loss and pooling, augmentation """
    total_iters: int = Field(..., ge=1)
    max_lr: float = Field(1e-4, gt=0.0)
    warmup_frac: float = Field(0.10, ge=0.0, le=1.0)
    constant_frac: float = Field(0.40, ge=0.0, le=1.0)
    decay_frac: float = Field(0.50, ge=0.0, le=1.0)
    freeze_iters: int = Field(0, ge=0)
    batch_size: int = Field(8, ge=1)
    loss_kind: LossKind = LossKind.COSINE
    pooling_kind: PoolingKind = PoolingKind.ATTENTION
    mask_params: MaskParams = MaskParams()
    seed: int = Field(0, ge=0, le=2 ** 64 - 1)
    adam: AdamSettings = AdamSettings()
    log_every: int = Field(100, ge=1)

    class Config:
        extra = "forbid"

    @root_validator(skip_on_failure=True)
    def phases_are_consistent(cls, values):
        total = values["warmup_frac"] + values["constant_frac"] + values["decay_frac"]
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"Schedule fractions sum to {total}, expected 1")
        if values["freeze_iters"] > values["total_iters"]:
            raise ValueError("freeze_iters exceeds total_iters")
        return values

    @validator("loss_kind", "pooling_kind", pre=True)
    def lower_case(cls, value):
        return value.lower() if isinstance(value, str) else value
