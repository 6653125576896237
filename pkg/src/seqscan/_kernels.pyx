# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled lattice kernels.  Semantics mirror seqscan._pykernels exactly."""

import numpy as np
cimport numpy as cnp
from libc.math cimport log
from libc.stdint cimport uint64_t, int64_t, int8_t

cnp.import_array()

BACKEND = "cython"

cdef uint64_t GAMMA = 0x9E3779B97F4A7C15ULL


cdef inline uint64_t _mix(uint64_t z) nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline double _div(int64_t s, int64_t n, double p) nogil:
    cdef double x
    if s == 0:
        return log(1.0 / (1.0 - p))
    if s == n:
        return log(1.0 / p)
    x = <double>s / <double>n
    return x * log(x / p) + (1.0 - x) * log((1.0 - x) / (1.0 - p))


def new_test_bounds(int64_t n_max, double p0, double p1, double thr_a, double thr_b,
                    const int64_t[:] cap, const int64_t[:] floor):
    sc_arr = np.empty(n_max + 1, dtype=np.int64)
    be_arr = np.empty(n_max + 1, dtype=np.int64)
    cdef int64_t[:] sc = sc_arr
    cdef int64_t[:] be = be_arr
    cdef int64_t n, lo, hi, mid, top
    cdef double tb, ta
    sc[0] = -1
    be[0] = 1
    with nogil:
        for n in range(1, n_max + 1):
            tb = thr_b / <double>n
            ta = thr_a / <double>n
            # scanner: largest s in [0, min(cap, n)] with divergence from p1 >= tb
            top = cap[n] if cap[n] < n else n
            if top < 0 or _div(0, n, p1) < tb:
                sc[n] = -1
            else:
                lo = 0
                hi = top
                while lo < hi:
                    mid = (lo + hi + 1) // 2
                    if _div(mid, n, p1) >= tb:
                        lo = mid
                    else:
                        hi = mid - 1
                sc[n] = lo
            # benign: smallest s in [max(floor, 0), n] with divergence from p0 >= ta
            lo = floor[n] if floor[n] > 0 else 0
            if lo > n or _div(n, n, p0) < ta:
                be[n] = n + 1
            else:
                hi = n
                while lo < hi:
                    mid = (lo + hi) // 2
                    if _div(mid, n, p0) >= ta:
                        hi = mid
                    else:
                        lo = mid + 1
                be[n] = lo
    return sc_arr, be_arr


def forward_dp(const int64_t[:] row_ptr, const int64_t[:] run_start, const int8_t[:] run_label,
               int64_t horizon, double p, int n_labels, double mass_tol):
    accept_arr = np.zeros(n_labels + 1, dtype=np.float64)
    stop_arr = np.zeros(horizon + 1, dtype=np.float64)
    mass_arr = np.zeros(horizon + 2, dtype=np.float64)
    cdef double[:] accept = accept_arr
    cdef double[:] stop = stop_arr
    cdef double[:] m = mass_arr
    cdef double q = 1.0 - p
    cdef double cont = 1.0, acc
    cdef int64_t n, s, lo = 0, hi = 0, j, a, b, st, en, last_n = 0
    cdef int8_t lab
    m[0] = 1.0
    with nogil:
        for n in range(1, horizon + 1):
            last_n = n
            s = hi + 1
            while s >= lo:
                if s > 0:
                    m[s] = m[s] * q + m[s - 1] * p
                else:
                    m[s] = m[s] * q
                s -= 1
            hi += 1
            a = row_ptr[n - 1]
            b = row_ptr[n]
            for j in range(a, b):
                lab = run_label[j]
                if lab == 0:
                    continue
                st = run_start[j]
                en = run_start[j + 1] - 1 if j + 1 < b else n
                if st < lo:
                    st = lo
                if en > hi:
                    en = hi
                acc = 0.0
                for s in range(st, en + 1):
                    acc += m[s]
                    m[s] = 0.0
                accept[lab] += acc
                stop[n] += acc
            while lo <= hi and m[lo] == 0.0:
                lo += 1
            while hi >= lo and m[hi] == 0.0:
                hi -= 1
            cont = 0.0
            for s in range(lo, hi + 1):
                cont += m[s]
            if lo > hi:
                cont = 0.0
                break
            if mass_tol > 0.0 and cont < mass_tol:
                break
    return accept_arr, stop_arr, cont, last_n


def simulate_runs(const int64_t[:] row_ptr, const int64_t[:] run_start, const int8_t[:] run_label,
                  int64_t horizon, double p, int64_t runs, uint64_t seed):
    labels_arr = np.zeros(runs, dtype=np.int8)
    stop_arr = np.zeros(runs, dtype=np.int64)
    succ_arr = np.zeros(runs, dtype=np.int64)
    cdef int8_t[:] labels = labels_arr
    cdef int64_t[:] stops = stop_arr
    cdef int64_t[:] succ = succ_arr
    cdef int64_t r, n, s, a, b, lo, hi, mid
    cdef uint64_t key, x
    cdef double u
    cdef int8_t lab
    with nogil:
        for r in range(runs):
            key = _mix(seed + <uint64_t>(r + 1) * GAMMA)
            n = 0
            s = 0
            lab = 0
            while n < horizon:
                n += 1
                x = _mix(key + <uint64_t>n * GAMMA)
                u = <double>(x >> 11) * (1.0 / 9007199254740992.0)
                if u < p:
                    s += 1
                a = row_ptr[n - 1]
                b = row_ptr[n]
                lo = a
                hi = b - 1
                while lo < hi:
                    mid = (lo + hi + 1) // 2
                    if run_start[mid] <= s:
                        lo = mid
                    else:
                        hi = mid - 1
                lab = run_label[lo]
                if lab != 0:
                    break
            labels[r] = lab
            stops[r] = n
            succ[r] = s
    return labels_arr, stop_arr, succ_arr
