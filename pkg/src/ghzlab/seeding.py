"""Deterministic RNG derivation.

Every randomized routine takes one integer master seed.  Sub-streams are
derived from (master, stage tag, index) so parallel stages never share a
stream and reruns are byte-identical.
"""

from __future__ import annotations

import numpy as np

# Stable tags for derived streams; values are part of the reproducibility contract.
STAGE_TAGS = {
    "mc_value": 1,
    "random_strategy": 2,
    "planted": 3,
    "bsg": 4,
    "choose_w": 5,
    "freiman": 6,
    "sweep": 7,
}


def child_rng(seed: int, tag: str, index: int = 0) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence([int(seed), STAGE_TAGS[tag], int(index)])
    )
