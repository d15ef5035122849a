# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels in ``dfie._kernels_py``.

Same functions, same signatures, same array layouts.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, M_PI
from libc.complex cimport cexp, csin, ccos, cabs

cnp.import_array()

SERIES_RADIUS = 1e-2
cdef double _SERIES_RADIUS = 1e-2
cdef int _SERIES_TERMS = 12


cdef inline int _miller_start(double zabs, int lmax):
    return <int>(lmax + 25 + 1.5 * zabs + 12.0 * zabs ** (1.0 / 3.0))


cdef void _jhat_series_one(double complex z, int lmax, double complex[:] out) noexcept nogil:
    cdef double complex w = -0.5 * z * z
    cdef double complex term, acc
    cdef int l, s
    for l in range(lmax + 1):
        term = 1.0
        acc = 1.0
        for s in range(1, _SERIES_TERMS + 1):
            term = term * w / (s * (2 * l + 2 * s + 1))
            acc = acc + term
        out[l] = acc


cdef void _jhat_miller_one(double complex z, int lmax, int top, double complex[:] out) noexcept nogil:
    # lmax >= 1 here
    cdef double complex z2 = z * z
    cdef double complex nxt = 0.0
    cdef double complex cur = 1.0
    cdef double complex prev, t0, t1, scale
    cdef int l
    for l in range(top, 0, -1):
        prev = cur - z2 * nxt / ((2 * l + 1) * (2 * l + 3))
        nxt = cur
        cur = prev
        if l - 1 <= lmax:
            out[l - 1] = cur
    t0 = csin(z) / z
    t1 = 3.0 * (csin(z) - z * ccos(z)) / (z * z2)
    if cabs(out[0]) >= cabs(out[1]) or cabs(z) < 2.0:
        scale = t0 / out[0]
    else:
        scale = t1 / out[1]
    for l in range(lmax + 1):
        out[l] = out[l] * scale


def jhat(z, int lmax):
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] zz = np.ascontiguousarray(np.asarray(z, dtype=complex).ravel())
    cdef Py_ssize_t N = zz.shape[0]
    cdef int lm = lmax if lmax >= 1 else 1
    out = np.empty((N, lm + 1), dtype=complex)
    cdef double complex[:, :] ov = out
    cdef Py_ssize_t i
    cdef double zmax = 0.0
    for i in range(N):
        if cabs(zz[i]) > zmax:
            zmax = cabs(zz[i])
    cdef int top = _miller_start(zmax, lm)
    for i in range(N):
        if cabs(zz[i]) < _SERIES_RADIUS:
            _jhat_series_one(zz[i], lm, ov[i])
        else:
            _jhat_miller_one(zz[i], lm, top, ov[i])
    return out[:, : lmax + 1]


def hhat(z, int lmax):
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] zz = np.ascontiguousarray(np.asarray(z, dtype=complex).ravel())
    cdef Py_ssize_t N = zz.shape[0]
    out = np.empty((N, lmax + 1), dtype=complex)
    cdef double complex[:, :] ov = out
    cdef Py_ssize_t i
    cdef int l
    cdef double complex e, z2, zi
    for i in range(N):
        zi = zz[i]
        e = cexp(1j * zi)
        ov[i, 0] = e
        if lmax >= 1:
            ov[i, 1] = e * (1.0 - 1j * zi)
        z2 = zi * zi
        for l in range(1, lmax):
            ov[i, l + 1] = ov[i, l] - z2 * ov[i, l - 1] / ((2 * l + 1) * (2 * l - 1))
    return out


def scaled_bessel(z, int lmax):
    return jhat(z, lmax), hhat(z, lmax)


def legendre_column(x, s, int m, int lmax):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] xx = np.ascontiguousarray(np.asarray(x, dtype=float).ravel())
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ss = np.ascontiguousarray(
        (np.asarray(s, dtype=float).ravel() * np.ones(xx.shape[0])))
    cdef Py_ssize_t N = xx.shape[0]
    out = np.zeros((N, lmax + 1))
    if m > lmax:
        return out
    cdef double[:, :] ov = out
    cdef Py_ssize_t i
    cdef int j, l
    cdef double p, a, b
    cdef double p0 = 1.0 / sqrt(4.0 * M_PI)
    for i in range(N):
        p = p0
        for j in range(1, m + 1):
            p = -sqrt((2.0 * j + 1.0) / (2.0 * j)) * ss[i] * p
        ov[i, m] = p
        if m + 1 <= lmax:
            ov[i, m + 1] = sqrt(2.0 * m + 3.0) * xx[i] * p
        for l in range(m + 2, lmax + 1):
            a = sqrt((2.0 * l + 1) * (2.0 * l - 1) / ((l - m) * (l + m)))
            b = sqrt((2.0 * l + 1) * (l + m - 1) * (l - m - 1) / ((l - m) * (l + m) * (2.0 * l - 3)))
            ov[i, l] = a * xx[i] * ov[i, l - 1] - b * ov[i, l - 2]
    return out
