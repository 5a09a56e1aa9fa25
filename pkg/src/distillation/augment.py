"""
File:           augment.py
Author:         xlembed developers
Created on:     12/10/26, 4:20 pm
"""
from src.distillation.config import MaskParams
from src.distillation.models import FeatureSequence
from src.utils import seeded_generator
from src.utils.exception import ParameterError


def feature_mask(C: FeatureSequence, mask_params: MaskParams, seed: int) -> FeatureSequence:
    """
    Zero out num_time_masks contiguous frame spans and num_channel_masks contiguous channel bands.
    Each width is drawn from 1..max width and each start uniformly over the valid positions.
    """
    if not mask_params.enabled:
        return C
    if mask_params.num_time_masks and mask_params.max_time_width >= C.T:
        raise ParameterError(
            f"Time mask width {mask_params.max_time_width} must be smaller than {C.T} frames of '{C.id}'"
        )
    if mask_params.num_channel_masks and mask_params.max_channel_width >= C.d_in:
        raise ParameterError(
            f"Channel mask width {mask_params.max_channel_width} must be smaller than dimension {C.d_in}"
        )
    rng = seeded_generator(seed)
    frames = C.frames.copy()
    if mask_params.max_time_width > 0:
        for _ in range(mask_params.num_time_masks):
            width = int(rng.integers(1, mask_params.max_time_width + 1))
            start = int(rng.integers(0, C.T - width + 1))
            frames[start:start + width, :] = 0.0
    if mask_params.max_channel_width > 0:
        for _ in range(mask_params.num_channel_masks):
            width = int(rng.integers(1, mask_params.max_channel_width + 1))
            start = int(rng.integers(0, C.d_in - width + 1))
            frames[:, start:start + width] = 0.0
    return C.with_frames(frames)
