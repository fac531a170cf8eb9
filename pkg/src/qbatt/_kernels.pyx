# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: the Haar-projector supremum scan and the
product-rotation objective evaluated inside the derivative-free optimizer.

Both functions have drop-in pure-numpy twins in ``_kernels_py``; the two
implementations agree to floating-point roundoff and a benchmark comparing
them lives in ``benchmarks/bench_kernels.py``.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, sin

cnp.import_array()


def max_quadratic_form(cnp.complex128_t[:, ::1] b, cnp.complex128_t[:, ::1] draws):
    """Max of Re<v|b|v>/<v|v> over the rows of ``draws``; returns (value, row index)."""
    cdef Py_ssize_t n = draws.shape[0]
    cdef Py_ssize_t d = draws.shape[1]
    if b.shape[0] != d or b.shape[1] != d:
        raise ValueError("matrix and draw dimensions do not match")
    if n == 0:
        raise ValueError("need at least one draw")
    cdef double best = -1.7976931348623157e308
    cdef Py_ssize_t best_i = 0
    cdef Py_ssize_t i, r, c
    cdef double nrm2, val
    cdef double complex acc, z
    for i in range(n):
        nrm2 = 0.0
        for r in range(d):
            z = draws[i, r]
            nrm2 += z.real * z.real + z.imag * z.imag
        val = 0.0
        for r in range(d):
            acc = 0.0
            for c in range(d):
                acc = acc + b[r, c] * draws[i, c]
            z = draws[i, r]
            val += z.real * acc.real + z.imag * acc.imag
        val /= nrm2
        if val > best:
            best = val
            best_i = i
    return best, best_i


def product_rotation_expectation(double[::1] angles, cnp.complex128_t[:, ::1] b,
                                 cnp.complex128_t[::1] seed):
    """Re<w|b|w> for w = (U(t0,p0,l0) x U(t1,p1,l1)) seed on two qubits."""
    if b.shape[0] != 4 or b.shape[1] != 4 or seed.shape[0] != 4 or angles.shape[0] != 6:
        raise ValueError("expected a 4x4 matrix, a 4-vector seed and 6 angles")
    cdef double complex u0[2][2]
    cdef double complex u1[2][2]
    cdef double ct, st
    # first qubit
    ct = cos(angles[0] / 2.0)
    st = sin(angles[0] / 2.0)
    u0[0][0] = ct
    u0[0][1] = -(cos(angles[2]) + 1j * sin(angles[2])) * st
    u0[1][0] = (cos(angles[1]) + 1j * sin(angles[1])) * st
    u0[1][1] = (cos(angles[1] + angles[2]) + 1j * sin(angles[1] + angles[2])) * ct
    # second qubit
    ct = cos(angles[3] / 2.0)
    st = sin(angles[3] / 2.0)
    u1[0][0] = ct
    u1[0][1] = -(cos(angles[5]) + 1j * sin(angles[5])) * st
    u1[1][0] = (cos(angles[4]) + 1j * sin(angles[4])) * st
    u1[1][1] = (cos(angles[4] + angles[5]) + 1j * sin(angles[4] + angles[5])) * ct

    cdef double complex w[4]
    cdef Py_ssize_t i, j, k, l, r, c
    for i in range(2):
        for j in range(2):
            w[2 * i + j] = 0.0
            for k in range(2):
                for l in range(2):
                    w[2 * i + j] += u0[i][k] * u1[j][l] * seed[2 * k + l]

    cdef double val = 0.0
    cdef double complex acc
    for r in range(4):
        acc = 0.0
        for c in range(4):
            acc = acc + b[r, c] * w[c]
        val += w[r].real * acc.real + w[r].imag * acc.imag
    return val
