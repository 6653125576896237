"""Pure-Python/numpy implementations of the lattice kernels.

Used when the compiled extension is unavailable or ``SEQSCAN_PURE=1``.
Boundary search and simulation are bit-identical to the compiled path;
the forward recursion may differ in the last ulp through summation order.
"""

import math

import numpy as np

BACKEND = "python"

_MASK = (1 << 64) - 1
_GAMMA_INT = 0x9E3779B97F4A7C15
GAMMA = np.uint64(_GAMMA_INT)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_2_53 = 1.0 / 9007199254740992.0


def _mix(z):
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def _div(s, n, p):
    if s == 0:
        return math.log(1.0 / (1.0 - p))
    if s == n:
        return math.log(1.0 / p)
    x = s / n
    return x * math.log(x / p) + (1.0 - x) * math.log((1.0 - x) / (1.0 - p))


def new_test_bounds(n_max, p0, p1, thr_a, thr_b, cap, floor):
    sc = np.empty(n_max + 1, dtype=np.int64)
    be = np.empty(n_max + 1, dtype=np.int64)
    sc[0], be[0] = -1, 1
    for n in range(1, n_max + 1):
        tb = thr_b / n
        ta = thr_a / n
        top = min(int(cap[n]), n)
        if top < 0 or _div(0, n, p1) < tb:
            sc[n] = -1
        else:
            lo, hi = 0, top
            while lo < hi:
                mid = (lo + hi + 1) // 2
                if _div(mid, n, p1) >= tb:
                    lo = mid
                else:
                    hi = mid - 1
            sc[n] = lo
        lo = max(int(floor[n]), 0)
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
    return sc, be


def forward_dp(row_ptr, run_start, run_label, horizon, p, n_labels, mass_tol):
    accept = np.zeros(n_labels + 1)
    stop = np.zeros(horizon + 1)
    q = 1.0 - p
    # m holds the mass of cells lo..lo+len(m)-1 of the current row
    m = np.array([1.0])
    lo = 0
    cont = 1.0
    last_n = 0
    for n in range(1, horizon + 1):
        last_n = n
        new = np.empty(len(m) + 1)
        new[:-1] = m * q
        new[-1] = 0.0
        new[1:] += m * p
        m = new
        a, b = row_ptr[n - 1], row_ptr[n]
        starts = run_start[a:b]
        ends = np.append(starts[1:] - 1, n)
        hi = lo + len(m) - 1
        for st, en, lab in zip(starts, ends, run_label[a:b]):
            if lab == 0:
                continue
            st, en = max(st, lo), min(en, hi)
            if en < st:
                continue
            acc = float(m[st - lo:en - lo + 1].sum())
            m[st - lo:en - lo + 1] = 0.0
            accept[lab] += acc
            stop[n] += acc
        nz = np.flatnonzero(m)
        if len(nz) == 0:
            cont = 0.0
            break
        m = m[nz[0]:nz[-1] + 1]
        lo += int(nz[0])
        cont = float(m.sum())
        if mass_tol > 0.0 and cont < mass_tol:
            break
    return accept, stop, cont, last_n


def simulate_runs(row_ptr, run_start, run_label, horizon, p, runs, seed):
    labels = np.zeros(runs, dtype=np.int8)
    stops = np.zeros(runs, dtype=np.int64)
    succ = np.zeros(runs, dtype=np.int64)
    idx = np.arange(runs, dtype=np.uint64)
    keys = _mix(np.uint64(seed & _MASK) + (idx + np.uint64(1)) * GAMMA)
    active = np.arange(runs)
    s = np.zeros(runs, dtype=np.int64)
    for n in range(1, horizon + 1):
        if len(active) == 0:
            break
        x = _mix(keys[active] + np.uint64((n * _GAMMA_INT) & _MASK))
        u = (x >> np.uint64(11)).astype(np.float64) * _2_53
        s[active] += u < p
        a, b = row_ptr[n - 1], row_ptr[n]
        j = np.searchsorted(run_start[a:b], s[active], side="right") - 1
        lab = run_label[a:b][j]
        stops[active] = n
        succ[active] = s[active]
        done = lab != 0
        labels[active[done]] = lab[done]
        active = active[~done]
    return labels, stops, succ
