"""Counter-based random streams keyed by (seed, chunk index).

Each chunk of a run gets its own Philox generator derived statelessly from
the run seed and the chunk's position, so a chunk draws the same numbers no
matter which worker evaluates it or in what order.
"""

import numpy as np

DEFAULT_CHUNK_SIZE = 1 << 16
SEED_MAX = (1 << 64) - 1


def check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed <= SEED_MAX:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def chunk_stream(seed: int, chunk_index: int, stream: int = 0) -> np.random.Generator:
    """Generator for one chunk; ``stream`` separates independent consumers of one seed."""
    ss = np.random.SeedSequence(entropy=check_seed(seed), spawn_key=(int(stream), int(chunk_index)))
    return np.random.Generator(np.random.Philox(ss))


def chunk_sizes(n: int, chunk_size: int):
    """Yield (chunk_index, size) pairs covering n trials."""
    if chunk_size < 1:
        raise ValueError("chunk_size must be >= 1")
    full, rest = divmod(int(n), int(chunk_size))
    for k in range(full):
        yield k, chunk_size
    if rest:
        yield full, rest
