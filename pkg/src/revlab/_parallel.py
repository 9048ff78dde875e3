"""Deterministic chunked evaluation over grids.

Grids are cut into chunks of a fixed size that does not depend on the
worker count, and every chunk is reduced in the same order, so results are
bit-identical for any number of threads.
"""

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

CHUNK = 64
_default_threads = 1


def set_threads(n):
    global _default_threads
    _default_threads = max(1, int(n))


def get_threads():
    env = os.environ.get("REVLAB_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return _default_threads


def tree_sum(a, axis=-1):
    """Pairwise sum along ``axis`` with a fixed, shape-determined split."""
    a = np.moveaxis(np.asarray(a), axis, -1)
    while a.shape[-1] > 1:
        n = a.shape[-1]
        half = n // 2
        head = a[..., : 2 * half : 2] + a[..., 1 : 2 * half : 2]
        a = np.concatenate((head, a[..., 2 * half :]), axis=-1) if n % 2 else head
    if a.shape[-1] == 0:
        return np.zeros(a.shape[:-1], dtype=a.dtype)
    return a[..., 0]


def chunked_map(func, x, chunk=CHUNK, threads=None):
    """Apply ``func`` to fixed-size slices of the 1-D array ``x`` and concatenate."""
    x = np.asarray(x)
    slices = [x[i : i + chunk] for i in range(0, len(x), chunk)]
    if not slices:
        return func(x)
    threads = get_threads() if threads is None else threads
    if threads <= 1 or len(slices) == 1:
        parts = [func(s) for s in slices]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(func, slices))
    return np.concatenate(parts)
