"""
File:           __init__.py
Author:         xlembed developers
Created on:     07/10/26, 7:24 pm
"""
from pathlib import Path
import hashlib

import numpy as np

from src.utils.exception import ParameterError


UINT64_MAX = 2 ** 64 - 1


def seeded_generator(seed: int) -> np.random.Generator:
    """ Philox-4x64 counter based generator. Same seed gives the same stream on every platform """
    if not 0 <= int(seed) <= UINT64_MAX:
        raise ParameterError(f"Seed {seed} is not an unsigned 64-bit integer")
    return np.random.Generator(np.random.Philox(int(seed)))


def draw_seed(rng: np.random.Generator) -> int:
    """ Draw a child seed from a parent generator """
    return int(rng.integers(0, 2 ** 62))


def file_sha256(path: Path) -> str:
    """ Return the hex digest of a file """
    digest = hashlib.sha256()
    with open(path, mode="rb") as fp_:
        for chunk in iter(lambda: fp_.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()
