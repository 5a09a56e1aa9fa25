"""
File:           enums.py
Author:         xlembed developers
Created on:     07/10/26, 7:24 pm
"""
from enum import Enum


class Modality(str, Enum):
    """ Which encoder produced an embedding bank """
    SPEECH = "speech"
    TEXT = "text"


class PoolingKind(str, Enum):
    """ Frame sequence to utterance vector """
    ATTENTION = "attention"
    MEAN = "mean"
    MAX = "max"


class LossKind(str, Enum):
    """ Distance between the speech and the text embedding """
    COSINE = "cosine"
    L1 = "l1"
    L2 = "l2"


class HeadMode(str, Enum):
    """ How the pipeline obtains the head it embeds queries with """
    TRAIN = "train"
    RANDOM = "random"
    LOAD = "load"
