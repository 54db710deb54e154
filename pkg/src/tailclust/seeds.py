"""Deterministic RNG derivation.

All randomness in the package flows from one user seed through named
derivations, so partial re-runs (one subject, one restart) are stable and
results do not depend on scheduling.
"""

from __future__ import annotations

import hashlib

import numpy as np


def derive_seed_sequence(seed: int, *parts) -> np.random.SeedSequence:
    """Build a SeedSequence from a base seed and named derivation parts.

    Parts may be strings or integers; strings are hashed so the derivation
    is stable across platforms and Python versions.
    """
    keys = [int(seed)]
    for part in parts:
        if isinstance(part, (int, np.integer)):
            keys.append(int(part))
        else:
            digest = hashlib.sha256(str(part).encode("utf-8")).digest()
            keys.append(int.from_bytes(digest[:8], "big"))
    return np.random.SeedSequence(keys)


def derive_rng(seed: int, *parts) -> np.random.Generator:
    """Generator seeded by `derive_seed_sequence(seed, *parts)`."""
    return np.random.default_rng(derive_seed_sequence(seed, *parts))
