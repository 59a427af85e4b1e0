# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled accumulation kernels.

Hot loops behind the measure algebra: dense 1-D convolution and the
reduction sums, all with compensated (Kahan/Neumaier) accumulation.
The pure Python twin lives in convclose._kernels_py.
"""

import numpy as np

BACKEND = "cython"


def line_conv(a, b):
    """Dense convolution of two coefficient vectors (Neumaier per bucket)."""
    cdef double[::1] va = np.ascontiguousarray(a, dtype=np.float64)
    cdef double[::1] vb = np.ascontiguousarray(b, dtype=np.float64)
    cdef Py_ssize_t na = va.shape[0], nb = vb.shape[0]
    cdef Py_ssize_t nout = na + nb - 1
    out_arr = np.zeros(nout, dtype=np.float64)
    comp_arr = np.zeros(nout, dtype=np.float64)
    cdef double[::1] acc = out_arr
    cdef double[::1] comp = comp_arr
    cdef Py_ssize_t i, j, k
    cdef double x, y, v, t, s, av, as_
    for j in range(nb):
        y = vb[j]
        if y == 0.0:
            continue
        for i in range(na):
            x = va[i]
            if x == 0.0:
                continue
            k = i + j
            v = x * y
            s = acc[k]
            t = s + v
            as_ = s if s >= 0.0 else -s
            av = v if v >= 0.0 else -v
            if as_ >= av:
                comp[k] += (s - t) + v
            else:
                comp[k] += (v - t) + s
            acc[k] = t
    for k in range(nout):
        acc[k] += comp[k]
    return out_arr


def abs_sum(values):
    """Compensated sum of |v| over a float vector."""
    cdef double[::1] v = np.ascontiguousarray(values, dtype=np.float64)
    cdef Py_ssize_t i, n = v.shape[0]
    cdef double s = 0.0, c = 0.0, x, t
    for i in range(n):
        x = v[i]
        if x < 0.0:
            x = -x
        t = s + x
        if s >= x:
            c += (s - t) + x
        else:
            c += (x - t) + s
        s = t
    return s + c


def total(values):
    """Compensated sum of a float vector (signed)."""
    cdef double[::1] v = np.ascontiguousarray(values, dtype=np.float64)
    cdef Py_ssize_t i, n = v.shape[0]
    cdef double s = 0.0, c = 0.0, x, t, ax, as_
    for i in range(n):
        x = v[i]
        t = s + x
        as_ = s if s >= 0.0 else -s
        ax = x if x >= 0.0 else -x
        if as_ >= ax:
            c += (s - t) + x
        else:
            c += (x - t) + s
        s = t
    return s + c
