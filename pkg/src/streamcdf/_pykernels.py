"""Pure-Python (numpy) twin of the compiled kernels.

Signatures and results match ``_kernels.pyx`` exactly; the parity tests
hold both to the same outputs.
"""
import numpy as np


def locate(edges, uniform, x):
    # side="right" puts x == edges[k] into the bin starting at edges[k]
    return int(np.searchsorted(edges, x, side="right"))


def insert_many(edges, uniform, counts, values):
    if len(values) == 0:
        return
    slots = np.searchsorted(edges, values, side="right")
    counts += np.bincount(slots, minlength=counts.shape[0])


def window_push(edges, uniform, values, staging, ring, aggregate, state, block):
    head, rlen, st, seen = (int(s) for s in state)
    k = ring.shape[0]
    nslots = staging.shape[0]
    n = len(values)
    slots = np.searchsorted(edges, values, side="right") if n else None
    boundaries = 0
    pos = 0
    bad = False
    while pos < n:
        take = min(block - st, n - pos)
        staging += np.bincount(slots[pos:pos + take], minlength=nslots)
        st += take
        seen += take
        pos += take
        if st < block:
            break
        aggregate += staging
        if rlen == k:
            if np.any(aggregate < ring[head]):
                bad = True
                break
            aggregate -= ring[head]
            ring[head] = staging
            head = (head + 1) % k
        else:
            ring[(head + rlen) % k] = staging
            rlen += 1
        staging[:] = 0
        st = 0
        boundaries += 1
    state[:] = (head, rlen, st, seen)
    return -1 if bad else boundaries
