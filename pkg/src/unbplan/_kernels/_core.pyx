# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled interference-accumulation kernel.

Semantics match unbplan._kernels._fallback.interference_matrix exactly; see
that module for the contract.
"""

import numpy as np


def interference_matrix(
    starts,
    durations,
    freqs,
    bandwidths,
    rel_power,
    target_index,
    dist_pow,
    fading,
    chunk=None,
):
    starts_a = np.ascontiguousarray(starts, dtype=np.float64)
    dur_a = np.ascontiguousarray(durations, dtype=np.float64)
    freq_a = np.ascontiguousarray(freqs, dtype=np.float64)
    bw_a = np.ascontiguousarray(bandwidths, dtype=np.float64)
    relp_a = np.ascontiguousarray(rel_power, dtype=np.float64)
    tgt_a = np.ascontiguousarray(target_index, dtype=np.intp)
    dist_a = np.ascontiguousarray(dist_pow, dtype=np.float64)
    fad_a = np.ascontiguousarray(fading, dtype=np.float64)

    cdef double[::1] s = starts_a
    cdef double[::1] d = dur_a
    cdef double[::1] f = freq_a
    cdef double[::1] bw = bw_a
    cdef double[::1] rp = relp_a
    cdef Py_ssize_t[::1] tgt = tgt_a
    cdef double[:, ::1] dp = dist_a
    cdef double[:, ::1] fad = fad_a

    cdef Py_ssize_t n_ev = s.shape[0]
    cdef Py_ssize_t n_t = tgt.shape[0]
    cdef Py_ssize_t n_rx = dp.shape[1]

    out_a = np.zeros((n_t, n_rx), dtype=np.float64)
    cdef double[:, ::1] out = out_a
    if n_ev == 0 or n_t == 0:
        return out_a

    cdef double max_dur = 0.0
    cdef Py_ssize_t i, j, k, t, lo, hi, mid
    for i in range(n_ev):
        if d[i] > max_dur:
            max_dur = d[i]

    cdef double st, en, df, w
    for i in range(n_t):
        t = tgt[i]
        st = s[t]
        en = st + d[t]
        # first event whose start could still overlap: bisect_left(s, st - max_dur)
        lo = 0
        hi = n_ev
        while lo < hi:
            mid = (lo + hi) >> 1
            if s[mid] < st - max_dur:
                lo = mid + 1
            else:
                hi = mid
        for j in range(lo, n_ev):
            if s[j] >= en:
                break
            if j == t:
                continue
            if s[j] + d[j] <= st:
                continue
            df = f[j] - f[t]
            if df < 0.0:
                df = -df
            if df >= 0.5 * (bw[j] + bw[t]):
                continue
            w = rp[j]
            for k in range(n_rx):
                out[i, k] += w * fad[j, k] * dp[j, k]
    return out_a
