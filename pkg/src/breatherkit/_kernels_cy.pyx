# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: counter-based site sampling and potential rasterization.

Bit-for-bit equivalent to ``_kernels_py``; the scalar hash helpers are
imported from there so the constants exist in exactly one place. Floating
point expressions repeat the NumPy evaluation order, and the extension is
built without -ffast-math, so both backends return identical arrays.
"""

import numpy as np

from libc.math cimport floor
from libc.stdint cimport int64_t, uint64_t

from breatherkit._kernels_py import axis_multiplier, stream_key

DEF MAXD = 16

cdef uint64_t _MULT_SITE = 0xDA942042E4DD58B5u
cdef uint64_t _OFF_SITE = 0x2545F4914F6CDD1Du
cdef double _INV53 = 2.0 ** -53


cdef inline uint64_t _mix64(uint64_t z) nogil:
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9u
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EBu
    return z ^ (z >> 31)


def site_uniforms(seed, sample, int d, int L):
    """See ``_kernels_py.site_uniforms``."""
    if d > MAXD:
        raise ValueError(f"d={d} exceeds compiled kernel limit {MAXD}")
    cdef int64_t s_ax = 2 * L
    cdef int64_t total = s_ax ** d
    cdef uint64_t key = stream_key(seed, sample)

    cdef uint64_t[MAXD] mult
    cdef int k
    for k in range(d):
        mult[k] = axis_multiplier(k)

    out_arr = np.empty(total, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef int64_t s, tmp, o, j, zz
    cdef uint64_t code, w
    with nogil:
        for s in range(total):
            tmp = s
            code = 0
            for k in range(d - 1, -1, -1):
                o = tmp % s_ax
                tmp //= s_ax
                j = o - L
                zz = 2 * j if j >= 0 else -2 * j - 1
                code += <uint64_t>zz * mult[k]
            w = _mix64(key ^ (code * _MULT_SITE + _OFF_SITE))
            out[s] = <double>(w >> 11) * _INV53
    return out_arr


def field_values(scales, mask, int d, int L, int n, int r):
    """See ``_kernels_py.field_values``."""
    if d > MAXD:
        raise ValueError(f"d={d} exceeds compiled kernel limit {MAXD}")
    cdef int64_t m_ax = 2 * L * n
    cdef int64_t s_ax = 2 * L
    cdef int64_t total = m_ax ** d
    cdef double h = 1.0 / n
    cdef double rd = r

    cdef const double[::1] lam_view = np.ascontiguousarray(scales, dtype=np.float64)
    cdef const unsigned char[::1] mask_view = np.ascontiguousarray(mask, dtype=np.uint8)

    site_arr = np.empty(m_ax, dtype=np.int64)
    rel_arr = np.empty(m_ax, dtype=np.float64)
    cdef int64_t[::1] site_of = site_arr
    cdef double[::1] rel = rel_arr
    cdef int64_t i
    for i in range(m_ax):
        site_of[i] = i // n
        rel[i] = -0.5 + ((i % n) + 0.5) * h

    out_arr = np.zeros(total, dtype=np.uint8)
    cdef unsigned char[::1] out = out_arr
    cdef int64_t[MAXD] idx
    cdef int64_t p, tmp, site_flat, cell_flat, cell
    cdef int k
    cdef double lam, y, t
    cdef bint ok
    with nogil:
        for p in range(total):
            tmp = p
            for k in range(d - 1, -1, -1):
                idx[k] = tmp % m_ax
                tmp //= m_ax
            site_flat = 0
            for k in range(d):
                site_flat = site_flat * s_ax + site_of[idx[k]]
            lam = lam_view[site_flat]
            if lam <= 0.0:
                continue
            ok = True
            cell_flat = 0
            for k in range(d):
                y = rel[idx[k]] / lam
                if y < -0.5 or y >= 0.5:
                    ok = False
                    break
                t = (y + 0.5) * rd
                cell = <int64_t>floor(t)
                cell_flat = cell_flat * r + cell
            if ok:
                out[p] = mask_view[cell_flat]
    return out_arr
