# cython: boundscheck=False, wraparound=False, cdivision=True, nonecheck=False
"""Compiled kernels: splat scatter-accumulation and red-black relaxation.

Mirrors pseudoview._kernels.reference operation-for-operation, including the
floating-point accumulation order, so both backends return bit-identical
arrays.  See the reference module for the semantic contracts.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def scatter_splats(
    cnp.int64_t[::1] idx not None,
    double[::1] w not None,
    double[::1] z not None,
    double[:, ::1] rgb not None,
    Py_ssize_t n_pixels,
    double depth_band,
):
    cdef Py_ssize_t m = idx.shape[0]
    minz_arr = np.full(n_pixels, np.inf)
    wsum_arr = np.zeros(n_pixels)
    csum_arr = np.zeros((n_pixels, 3))
    cdef double[::1] minz = minz_arr
    cdef double[::1] wsum = wsum_arr
    cdef double[:, ::1] csum = csum_arr
    cdef Py_ssize_t k, i
    cdef double zk, wk
    cdef double band1 = 1.0 + depth_band

    for k in range(m):
        i = idx[k]
        zk = z[k]
        if zk < minz[i]:
            minz[i] = zk

    for k in range(m):
        i = idx[k]
        if z[k] <= minz[i] * band1:
            wk = w[k]
            wsum[i] += wk
            csum[i, 0] += wk * rgb[k, 0]
            csum[i, 1] += wk * rgb[k, 1]
            csum[i, 2] += wk * rgb[k, 2]

    return minz_arr, wsum_arr, csum_arr


def redblack_sweep(
    double[:, ::1] v not None,
    cnp.uint8_t[:, ::1] unknown not None,
    double[:, ::1] cnt not None,
):
    cdef Py_ssize_t H = v.shape[0]
    cdef Py_ssize_t W = v.shape[1]
    cdef Py_ssize_t i, j, phase
    cdef double s, newv, d
    cdef double maxd = 0.0

    for phase in range(2):
        for i in range(H):
            for j in range(W):
                if unknown[i, j] != 0 and ((i + j) & 1) == phase:
                    # neighbor order up, down, left, right; missing sides add 0
                    s = 0.0
                    if i > 0:
                        s = s + v[i - 1, j]
                    if i < H - 1:
                        s = s + v[i + 1, j]
                    if j > 0:
                        s = s + v[i, j - 1]
                    if j < W - 1:
                        s = s + v[i, j + 1]
                    newv = s / cnt[i, j]
                    d = newv - v[i, j]
                    if d < 0.0:
                        d = -d
                    if d > maxd:
                        maxd = d
                    v[i, j] = newv

    return maxd
