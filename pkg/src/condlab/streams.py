"""Reproducible random streams and a deterministic realization pool.

Realization ``i`` under master seed ``s`` always draws from
``Philox(SeedSequence([s, i]))``, a counter-based generator, so results do
not depend on scheduling or on how many workers run.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, TypeVar

import numpy as np

T = TypeVar("T")

THREADS_ENV = "CONDLAB_THREADS"


def stream(seed: int, index: int = 0) -> np.random.Generator:
    """Independent generator for realization ``index`` under ``seed``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(index)])))


def worker_count() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw:
        return max(1, int(raw))
    return os.cpu_count() or 1


def map_realizations(fn: Callable[[int, np.random.Generator], T], count: int, seed: int,
                     workers: int | None = None) -> List[T]:
    """``[fn(i, stream(seed, i)) for i in range(count)]``, possibly threaded.

    The heavy kernels release the GIL, so threads give real parallelism.
    Output order is always by realization index.
    """
    workers = worker_count() if workers is None else workers
    if workers <= 1 or count <= 1:
        return [fn(i, stream(seed, i)) for i in range(count)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda i: fn(i, stream(seed, i)), range(count)))
