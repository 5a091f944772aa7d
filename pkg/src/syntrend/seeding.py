"""Deterministic per-item random generators.

Randomised stages derive one generator per sentence / per cell from the
global seed plus a stable item key, so results do not depend on corpus
order, subsetting, or parallel scheduling.
"""

import hashlib

import numpy as np

_MASK = (1 << 64) - 1


def derive_rng(*parts):
    """Generator seeded from a global seed and stable item identifiers.

    Integer parts enter the seed sequence directly; anything else is
    hashed (sha256, process-independent) first.
    """
    entropy = []
    for part in parts:
        if isinstance(part, (int, np.integer)):
            entropy.append(int(part) & _MASK)
        else:
            digest = hashlib.sha256(str(part).encode("utf-8")).digest()
            entropy.append(int.from_bytes(digest[:8], "big"))
    return np.random.default_rng(np.random.SeedSequence(entropy))
