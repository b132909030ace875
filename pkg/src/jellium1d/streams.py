"""Reproducible random streams.

All samplers take an explicit ``numpy.random.Generator``.  Experiments derive
one generator per independent task by keying a SeedSequence on
``(seed, task_id)``, so a run is reproducible from the seed and the task
partition alone, independent of worker count or scheduling order.
"""

import numpy as np


def substream(seed, task_id=0):
    """Return the deterministic generator for task ``task_id`` under ``seed``."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(task_id),))
    return np.random.Generator(np.random.PCG64(ss))
