# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernel for the double-contour coupled sum.

Hot loop of the two-point variance quadrature: a full cross sum over node
pairs of two contours with a Cauchy-type coupling. Written in explicit real
arithmetic (no C complex division, which costs a libcall per pair) and with a
fixed accumulation order, so results are deterministic and identical across
thread counts.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

DEF COINCIDENT_TOL = 1e-8


def coupled_cauchy_sum(
    cnp.ndarray[cnp.complex128_t, ndim=1] z1 not None,
    cnp.ndarray[cnp.complex128_t, ndim=1] a1 not None,
    cnp.ndarray[cnp.complex128_t, ndim=1] g1 not None,
    cnp.ndarray[cnp.complex128_t, ndim=1] gp1 not None,
    cnp.ndarray[cnp.complex128_t, ndim=1] z2 not None,
    cnp.ndarray[cnp.complex128_t, ndim=1] a2 not None,
    cnp.ndarray[cnp.complex128_t, ndim=1] g2 not None,
):
    """sum_{i,j} a1[i]*a2[j]*(g1[i]-g2[j])/(z1[i]-z2[j]), diagonal -> gp1[i]."""
    cdef Py_ssize_t n1 = z1.shape[0]
    cdef Py_ssize_t n2 = z2.shape[0]
    cdef Py_ssize_t i, j
    cdef double z1r, z1i, a1r, a1i, g1r, g1i
    cdef double dr, di, s, qr, qi, nr, ni, tr, ti
    cdef double row_r, row_i
    cdef double tot_r = 0.0, tot_i = 0.0
    cdef double tol2 = COINCIDENT_TOL * COINCIDENT_TOL

    cdef double[::1] z2r = np.ascontiguousarray(z2.real)
    cdef double[::1] z2i = np.ascontiguousarray(z2.imag)
    cdef double[::1] a2r = np.ascontiguousarray(a2.real)
    cdef double[::1] a2i = np.ascontiguousarray(a2.imag)
    cdef double[::1] g2r = np.ascontiguousarray(g2.real)
    cdef double[::1] g2i = np.ascontiguousarray(g2.imag)

    for i in range(n1):
        z1r = z1[i].real; z1i = z1[i].imag
        a1r = a1[i].real; a1i = a1[i].imag
        g1r = g1[i].real; g1i = g1[i].imag
        row_r = 0.0; row_i = 0.0
        for j in range(n2):
            dr = z1r - z2r[j]
            di = z1i - z2i[j]
            s = dr * dr + di * di
            if s < tol2:
                qr = gp1[i].real
                qi = gp1[i].imag
            else:
                nr = g1r - g2r[j]
                ni = g1i - g2i[j]
                s = 1.0 / s
                # (nr + i*ni) / (dr + i*di)
                qr = (nr * dr + ni * di) * s
                qi = (ni * dr - nr * di) * s
            # times a2[j]
            tr = qr * a2r[j] - qi * a2i[j]
            ti = qr * a2i[j] + qi * a2r[j]
            row_r += tr
            row_i += ti
        # times a1[i], accumulated in index order
        tot_r += a1r * row_r - a1i * row_i
        tot_i += a1r * row_i + a1i * row_r
    return complex(tot_r, tot_i)
