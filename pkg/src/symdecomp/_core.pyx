# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled evaluation kernels: per-class rank-one products and the
leave-one-out scatter used by gradients and contractions.

Semantics match symdecomp._kernels_numpy exactly.
"""
import numpy as np

cimport numpy as cnp

cnp.import_array()


def monomial_values(const Py_ssize_t[:, ::1] reps, const double[:, ::1] factors):
    cdef Py_ssize_t n_classes = reps.shape[0]
    cdef Py_ssize_t order = reps.shape[1]
    cdef Py_ssize_t rank = factors.shape[1]
    out_arr = np.empty((n_classes, rank), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t i, t, k, row
    cdef double acc
    for i in range(n_classes):
        for k in range(rank):
            out[i, k] = 1.0
        for t in range(order):
            row = reps[i, t]
            for k in range(rank):
                out[i, k] *= factors[row, k]
    return out_arr


def all_but_one_scatter(
    const Py_ssize_t[:, ::1] reps,
    const double[::1] coeff,
    const double[:, ::1] factors,
):
    cdef Py_ssize_t n_classes = reps.shape[0]
    cdef Py_ssize_t order = reps.shape[1]
    cdef Py_ssize_t n = factors.shape[0]
    cdef Py_ssize_t rank = factors.shape[1]
    out_arr = np.zeros((n, rank), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    # prefix[t, k] = prod_{s < t} x[reps[i,s],k]; suffix likewise for s > t
    pref_arr = np.empty((order, rank), dtype=np.float64)
    suff_arr = np.empty((order, rank), dtype=np.float64)
    cdef double[:, ::1] pref = pref_arr
    cdef double[:, ::1] suff = suff_arr
    cdef Py_ssize_t i, t, k, row
    cdef double c
    for i in range(n_classes):
        c = coeff[i]
        for k in range(rank):
            pref[0, k] = 1.0
            suff[order - 1, k] = 1.0
        for t in range(1, order):
            row = reps[i, t - 1]
            for k in range(rank):
                pref[t, k] = pref[t - 1, k] * factors[row, k]
        for t in range(order - 2, -1, -1):
            row = reps[i, t + 1]
            for k in range(rank):
                suff[t, k] = suff[t + 1, k] * factors[row, k]
        for t in range(order):
            row = reps[i, t]
            for k in range(rank):
                out[row, k] += c * pref[t, k] * suff[t, k]
    return out_arr
