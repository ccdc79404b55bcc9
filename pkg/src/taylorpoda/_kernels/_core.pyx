# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled subset-lattice kernels.

Contracts match ``taylorpoda._kernels.fallback``; see that module for the
reference semantics. Arrays are indexed by coalition bitmask.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def popcounts(int d):
    cdef Py_ssize_t n = 1 << d
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] pc = np.zeros(n, dtype=np.uint8)
    cdef cnp.uint8_t[::1] v = pc
    cdef Py_ssize_t m
    for m in range(1, n):
        v[m] = v[m >> 1] + <cnp.uint8_t>(m & 1)
    return pc


def subset_mobius(values):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.array(
        values, dtype=np.float64, copy=True)
    cdef cnp.float64_t[::1] a = out
    cdef Py_ssize_t n = out.shape[0]
    cdef int d = <int>(n.bit_length() - 1)
    cdef Py_ssize_t bit, m
    cdef int b
    for b in range(d):
        bit = 1 << b
        for m in range(n):
            if m & bit:
                a[m] -= a[m ^ bit]
    return out


def subset_zeta(values):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.array(
        values, dtype=np.float64, copy=True)
    cdef cnp.float64_t[::1] a = out
    cdef Py_ssize_t n = out.shape[0]
    cdef int d = <int>(n.bit_length() - 1)
    cdef Py_ssize_t bit, m
    cdef int b
    for b in range(d):
        bit = 1 << b
        for m in range(n):
            if m & bit:
                a[m] += a[m ^ bit]
    return out


def semivalues(values, size_weights):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] vals = np.ascontiguousarray(
        values, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] w = np.ascontiguousarray(
        size_weights, dtype=np.float64)
    cdef cnp.float64_t[::1] v = vals
    cdef cnp.float64_t[::1] ws = w
    cdef Py_ssize_t n = vals.shape[0]
    cdef int d = <int>(n.bit_length() - 1)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.zeros(d, dtype=np.float64)
    cdef cnp.float64_t[::1] acc = out
    cdef Py_ssize_t m, bit
    cdef int i, pc
    for m in range(n):
        pc = 0
        bit = m
        while bit:
            bit &= bit - 1
            pc += 1
        for i in range(d):
            bit = 1 << i
            if not (m & bit):
                acc[i] += ws[pc] * (v[m | bit] - v[m])
    return out


def interaction_penalties(masks, dividends, xi_flat, offsets, int d):
    cdef cnp.ndarray[cnp.int64_t, ndim=1] ms = np.ascontiguousarray(
        masks, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] hs = np.ascontiguousarray(
        dividends, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] xf = np.ascontiguousarray(
        xi_flat, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] off = np.ascontiguousarray(
        offsets, dtype=np.int64)
    cdef cnp.int64_t[::1] mv = ms
    cdef cnp.float64_t[::1] hv = hs
    cdef cnp.float64_t[::1] xv = xf
    cdef cnp.int64_t[::1] ov = off
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.zeros(d, dtype=np.float64)
    cdef cnp.float64_t[::1] acc = out
    cdef Py_ssize_t j, m = ms.shape[0]
    cdef cnp.int64_t mask, base
    cdef int i, slot
    for j in range(m):
        mask = mv[j]
        base = ov[j]
        slot = 0
        i = 0
        while mask:
            if mask & 1:
                acc[i] += (1.0 - xv[base + slot]) * hv[j]
                slot += 1
            mask >>= 1
            i += 1
    return out
