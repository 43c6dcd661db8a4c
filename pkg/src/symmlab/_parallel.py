"""Ordered thread-pool map controlled by ``SYMMLAB_THREADS``.

Results are returned in input order so output never depends on the worker
count.
"""

import os
from concurrent.futures import ThreadPoolExecutor


def n_threads() -> int:
    try:
        return max(1, int(os.environ.get("SYMMLAB_THREADS", "1")))
    except ValueError:
        return 1


def pmap(fn, items):
    items = list(items)
    n = n_threads()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))


def chunks(seq_len: int, n_chunks: int):
    step = max(1, -(-seq_len // max(n_chunks, 1)))
    return [(s, min(seq_len, s + step)) for s in range(0, seq_len, step)]
