"""Counter-mode seed derivation.

Every random stream in the package is keyed by a tuple of non-negative
integers.  ``derive_seed(master, r, 1, k0)`` is a pure function of its
arguments, so any replicate or mask can be replayed in isolation.
"""

import numpy as np

MASK_STREAM = 1
MODEL_STREAM = 0


def derive_seed(*keys: int) -> int:
    """Map a tuple of non-negative integer keys to a 64-bit seed."""
    if not keys:
        raise ValueError("at least one key is required")
    entropy = [int(k) for k in keys]
    if any(k < 0 for k in entropy):
        raise ValueError(f"seed keys must be non-negative, got {keys}")
    state = np.random.SeedSequence(entropy).generate_state(2, dtype=np.uint32)
    return (int(state[0]) << 32) | int(state[1])


def rng_from(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed))))
