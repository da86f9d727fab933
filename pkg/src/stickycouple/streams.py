"""Counter-based reproducible random number substreams.

Every stochastic routine in the package draws from a Philox counter-based
generator keyed by (seed, stream ids). Substreams with distinct ids are
statistically independent and reproducible regardless of execution order or
thread count, which is what lets coupled trajectories and their dominating
chains consume the exact same draws.
"""

import numpy as np

__all__ = ["substream"]


def substream(seed, *ids):
    """Return an independent Generator for (seed, *ids).

    Parameters
    ----------
    seed : int
        Base seed shared by a whole experiment.
    *ids : int
        Optional stream indices (e.g. trajectory index, ladder level).
    """
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(i) for i in ids))
    return np.random.Generator(np.random.Philox(ss))
