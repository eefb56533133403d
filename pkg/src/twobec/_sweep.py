import os
from concurrent.futures import ThreadPoolExecutor


def default_threads():
    return os.cpu_count() or 1


def parallel_map(fn, items, threads=1):
    """Map ``fn`` over ``items`` in contiguous blocks; results come back in input order."""
    items = list(items)
    threads = max(1, min(int(threads or 1), len(items) or 1))
    if threads == 1:
        return [fn(x) for x in items]
    size, extra = divmod(len(items), threads)
    blocks, start = [], 0
    for i in range(threads):
        stop = start + size + (1 if i < extra else 0)
        blocks.append(items[start:stop])
        start = stop
    with ThreadPoolExecutor(max_workers=threads) as pool:
        chunks = list(pool.map(lambda block: [fn(x) for x in block], blocks))
    return [r for chunk in chunks for r in chunk]
