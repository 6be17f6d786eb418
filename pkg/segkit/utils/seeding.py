"""Seed derivation shared by initialisation, augmentation, shuffling and fold planning."""

from enum import IntEnum
from os import getenv
from typing import Optional

import numpy as np

SEED_ENV_VAR = "SEGKIT_SEED"


class Stream(IntEnum):
    """Independent random streams derived from one seed."""

    INIT = 1
    SHUFFLE = 2
    AUGMENT = 3
    FOLDS = 4
    SYNTHETIC = 5
    CHECK = 6


def resolve_seed(seed: Optional[int] = None, default: int = 0) -> int:
    """
    Pick the effective seed: the environment wins over the explicit value, which wins over the default.
    """
    env_seed = getenv(SEED_ENV_VAR)
    if env_seed:
        return int(env_seed)

    return default if seed is None else seed


def make_rng(seed: int, stream: Optional[Stream] = None, *indices: int) -> np.random.Generator:
    """Generator whose output depends only on ``(seed, stream, *indices)``, never on call order."""
    entropy = [abs(int(seed))]
    if stream is not None:
        entropy.append(int(stream))
    entropy.extend(abs(int(index)) for index in indices)
    return np.random.default_rng(np.random.SeedSequence(entropy))
