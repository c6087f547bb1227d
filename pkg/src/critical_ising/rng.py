"""Counter-based random number generation with reproducible substreams.

All randomness in the package flows through Philox (a named counter-based
generator) keyed by 64-bit seeds.  Independent trials get substreams keyed
by ``seed XOR trial_index``, so replication is order-independent: trial
`i` produces the same draws whether it runs first, last, or in parallel.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1


def generator(seed: int) -> np.random.Generator:
    """Philox generator for a 64-bit seed."""
    return np.random.Generator(np.random.Philox(key=int(seed) & MASK64))


def substream(seed: int, index: int) -> np.random.Generator:
    """Generator for substream ``index`` of the stream keyed by ``seed``."""
    return generator((int(seed) ^ int(index)) & MASK64)
