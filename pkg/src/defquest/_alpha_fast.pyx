# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled nominal-alpha kernel; the hot twin of evalkit._alpha_py.

The accumulation order is identical to the pure-Python kernel so both
produce bit-identical doubles. See _alpha_py for the formula.
"""

from libc.math cimport NAN

import numpy as np

BACKEND_NAME = "compiled"


cdef double _alpha_row(
    const int[:] values,
    const long long[:] starts,
    const long long[:] lengths,
    int n_categories,
    const long long[:] row,
    long long* counts,
    long long* n_c,
) nogil:
    cdef Py_ssize_t i, j, c
    cdef long long u, m, s, same, cnt, d_u, n, sum_sq, expected
    cdef double obs = 0.0
    n = 0
    for c in range(n_categories):
        n_c[c] = 0
        counts[c] = 0
    for i in range(row.shape[0]):
        u = row[i]
        m = lengths[u]
        if m < 2:
            continue
        s = starts[u]
        for j in range(s, s + m):
            counts[values[j]] += 1
        same = 0
        for c in range(n_categories):
            cnt = counts[c]
            if cnt != 0:
                same += cnt * (cnt - 1)
                n_c[c] += cnt
                counts[c] = 0
        d_u = m * (m - 1) - same
        obs = obs + (<double> d_u) / (<double> (m - 1))
        n += m
    if n == 0:
        return NAN
    if obs == 0.0:
        return 1.0
    sum_sq = 0
    for c in range(n_categories):
        sum_sq += n_c[c] * n_c[c]
    expected = n * n - sum_sq
    if expected == 0:
        return NAN
    return 1.0 - ((<double> n - 1.0) * obs) / (<double> expected)


def alpha_one(values, starts, lengths, int n_categories, unit_indices):
    cdef int[:] v = np.ascontiguousarray(values, dtype=np.int32)
    cdef long long[:] s = np.ascontiguousarray(starts, dtype=np.int64)
    cdef long long[:] l = np.ascontiguousarray(lengths, dtype=np.int64)
    cdef long long[:] row = np.ascontiguousarray(unit_indices, dtype=np.int64)
    counts_arr = np.zeros(n_categories, dtype=np.int64)
    margins_arr = np.zeros(n_categories, dtype=np.int64)
    cdef long long[:] counts = counts_arr
    cdef long long[:] margins = margins_arr
    return _alpha_row(v, s, l, n_categories, row, &counts[0], &margins[0])


def alpha_batch(values, starts, lengths, int n_categories, index_rows):
    cdef int[:] v = np.ascontiguousarray(values, dtype=np.int32)
    cdef long long[:] s = np.ascontiguousarray(starts, dtype=np.int64)
    cdef long long[:] l = np.ascontiguousarray(lengths, dtype=np.int64)
    rows = np.ascontiguousarray(index_rows, dtype=np.int64)
    cdef long long[:, :] r = rows
    out_arr = np.empty(rows.shape[0], dtype=np.float64)
    cdef double[:] out = out_arr
    counts_arr = np.zeros(n_categories, dtype=np.int64)
    margins_arr = np.zeros(n_categories, dtype=np.int64)
    cdef long long[:] counts = counts_arr
    cdef long long[:] margins = margins_arr
    cdef Py_ssize_t i
    for i in range(rows.shape[0]):
        out[i] = _alpha_row(v, s, l, n_categories, r[i], &counts[0], &margins[0])
    return out_arr.tolist()
