"""Order-preserving fan-out over array rows, capped by HULLFORGE_THREADS."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np


def max_workers() -> int:
    try:
        n = int(os.environ.get("HULLFORGE_THREADS", "1"))
    except ValueError:
        n = 1
    return max(1, n)


def map_rows(fn, rows: np.ndarray, chunk: int = 256) -> np.ndarray:
    """Apply ``fn`` to contiguous row chunks and stitch results in input order.

    Chunk boundaries depend only on ``chunk``, never on the worker count,
    so solvers that warm-start within a chunk give identical results
    under any parallelism.
    """
    if rows.shape[0] <= chunk:
        return fn(rows)
    chunks = [rows[s : s + chunk] for s in range(0, rows.shape[0], chunk)]
    workers = max_workers()
    if workers == 1:
        return np.concatenate([fn(c) for c in chunks])
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return np.concatenate(list(pool.map(fn, chunks)))
