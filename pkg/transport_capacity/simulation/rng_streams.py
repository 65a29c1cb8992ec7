"""
Deterministic per-trial random streams.

Each trial draws from its own Generator seeded by (seed, experimentKey, trialIndex), so the
random numbers a trial sees do not depend on how trials are split across workers or in which
order chunks finish.

    seed
      ├── experiment 1 (single hop / 1-hop packets)
      │     ├── trial 0
      │     ├── trial 1
      │     └── ...
      ├── experiment 2 (2-hop packets)
      └── ...
"""

from typing import Iterator, Tuple

import numpy as np


def trialGenerator(seed: int, experimentKey: int, trialIndex: int) -> np.random.Generator:
    """Generator for one trial of one experiment"""
    return np.random.default_rng(np.random.SeedSequence([seed, experimentKey, trialIndex]))


def chunkRanges(trials: int, chunkSize: int) -> Iterator[Tuple[int, int]]:
    """Split trial indices 0..trials-1 into [start, stop) chunks, in index order"""
    for start in range(0, trials, chunkSize):
        yield start, min(start + chunkSize, trials)
