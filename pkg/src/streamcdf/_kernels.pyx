# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled binning and window-advance kernels.

Counter arrays use the slot layout ``[underflow, bin 0 .. bin B-1, overflow]``.
Callers validate finiteness; these loops assume finite input.
"""
cimport numpy as cnp

cnp.import_array()

ctypedef cnp.int64_t i64


cdef inline Py_ssize_t _slot(const double[::1] edges, bint uniform, double x) noexcept nogil:
    cdef Py_ssize_t nb = edges.shape[0] - 1
    cdef Py_ssize_t lo, hi, mid, k
    cdef double e0 = edges[0]
    cdef double eb = edges[nb]
    if x < e0:
        return 0
    if x >= eb:
        return nb + 1
    if uniform:
        k = <Py_ssize_t>((x - e0) / (eb - e0) * nb)
        if k < 0:
            k = 0
        elif k > nb - 1:
            k = nb - 1
        # arithmetic guess can be off by one near edges; the edge array is authoritative
        while k > 0 and x < edges[k]:
            k -= 1
        while k < nb - 1 and x >= edges[k + 1]:
            k += 1
        return k + 1
    lo = 0
    hi = nb
    while hi - lo > 1:
        mid = (lo + hi) >> 1
        if x < edges[mid]:
            hi = mid
        else:
            lo = mid
    return lo + 1


def locate(const double[::1] edges, bint uniform, double x):
    return _slot(edges, uniform, x)


def insert_many(const double[::1] edges, bint uniform, i64[::1] counts, const double[::1] values):
    cdef Py_ssize_t i, n = values.shape[0]
    with nogil:
        for i in range(n):
            counts[_slot(edges, uniform, values[i])] += 1


def window_push(const double[::1] edges, bint uniform, const double[::1] values,
                i64[::1] staging, i64[:, ::1] ring, i64[::1] aggregate,
                i64[::1] state, i64 block):
    """Bin ``values`` into the staging block, advancing the ring at each boundary.

    ``state`` holds ``[head, ring_len, staging_total, samples_seen]`` and is
    updated in place. Returns the number of block boundaries crossed, or -1
    if an eviction would make an aggregate counter negative.
    """
    cdef Py_ssize_t n = values.shape[0]
    cdef Py_ssize_t nslots = staging.shape[0]
    cdef Py_ssize_t k = ring.shape[0]
    cdef Py_ssize_t i, j, dst
    cdef i64 head = state[0]
    cdef i64 rlen = state[1]
    cdef i64 st = state[2]
    cdef i64 seen = state[3]
    cdef i64 boundaries = 0
    cdef int bad = 0
    with nogil:
        for i in range(n):
            staging[_slot(edges, uniform, values[i])] += 1
            st += 1
            seen += 1
            if st < block:
                continue
            for j in range(nslots):
                aggregate[j] += staging[j]
            if rlen == k:
                for j in range(nslots):
                    if aggregate[j] < ring[head, j]:
                        bad = 1
                        break
                if bad:
                    break
                for j in range(nslots):
                    aggregate[j] -= ring[head, j]
                    ring[head, j] = staging[j]
                    staging[j] = 0
                head = (head + 1) % k
            else:
                dst = (head + rlen) % k
                for j in range(nslots):
                    ring[dst, j] = staging[j]
                    staging[j] = 0
                rlen += 1
            st = 0
            boundaries += 1
    state[0] = head
    state[1] = rlen
    state[2] = st
    state[3] = seen
    if bad:
        return -1
    return boundaries
