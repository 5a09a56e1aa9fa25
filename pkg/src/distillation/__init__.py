"""
File:           __init__.py
Author:         xlembed developers
Created on:     12/10/26, 8:55 am
"""
from src.distillation.config import TrainConfig, MaskParams, AdamSettings
from src.distillation.models import FeatureSequence, HeadParameters, TrainingExample
from src.distillation.head import pool, project, loss, loss_gradients, finite_difference_check, embed_sequences
from src.distillation.trainer import train, TrainResult
