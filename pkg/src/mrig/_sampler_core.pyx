# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled sampler kernel: per-draw sequential construction with an
inlined Cholesky solve for the head systems."""

from libc.math cimport sqrt

import numpy as np


cdef inline double _ig_draw(double mu, double lam, double nu, double u) nogil:
    cdef double y = nu * nu
    cdef double x1 = mu + mu * mu * y / (2.0 * lam) - (mu / (2.0 * lam)) * sqrt(
        4.0 * mu * lam * y + mu * mu * y * y
    )
    if x1 < 1e-300:
        x1 = 1e-300
    if u <= mu / (mu + x1):
        return x1
    return mu * mu / x1


cdef inline double _rig_draw(double a, double b, double g, double nu, double u) nogil:
    cdef double val = g / (a * a)
    if b > 0.0:
        val += _ig_draw(b / (2.0 * a), b * b / 2.0, nu, u)
    return val


def sample_kernel(a_in, W_in, b_table_in, gammas_in, normals_in, uniforms_in):
    cdef double[::1] a = np.ascontiguousarray(a_in, dtype=np.float64)
    cdef double[:, ::1] W = np.ascontiguousarray(W_in, dtype=np.float64)
    cdef double[:, ::1] b_table = np.ascontiguousarray(b_table_in, dtype=np.float64)
    cdef double[:, ::1] gammas = np.ascontiguousarray(gammas_in, dtype=np.float64)
    cdef double[:, ::1] normals = np.ascontiguousarray(normals_in, dtype=np.float64)
    cdef double[:, ::1] uniforms = np.ascontiguousarray(uniforms_in, dtype=np.float64)

    cdef Py_ssize_t count = gammas.shape[0]
    cdef Py_ssize_t n = gammas.shape[1]
    out = np.empty((count, n))
    cdef double[:, ::1] X = out
    scratch = np.zeros((n + 2, n))
    cdef double[:, ::1] L = scratch[:n]
    cdef double[::1] y = scratch[n]
    cdef double[::1] v = scratch[n + 1]

    cdef Py_ssize_t i, m, r, c, t
    cdef double s, cv, beta

    with nogil:
        for i in range(count):
            X[i, 0] = _rig_draw(a[0], b_table[0, 0], gammas[i, 0], normals[i, 0], uniforms[i, 0])
            for m in range(1, n):
                # Cholesky of the m x m head of M_x.
                for r in range(m):
                    for c in range(r + 1):
                        s = 2.0 * X[i, r] if r == c else -W[r, c]
                        for t in range(c):
                            s -= L[r, t] * L[c, t]
                        if r == c:
                            L[r, r] = sqrt(s)
                        else:
                            L[r, c] = s / L[c, c]
                # Solve M_head v = W[:m, m].
                for r in range(m):
                    s = W[r, m]
                    for t in range(r):
                        s -= L[r, t] * y[t]
                    y[r] = s / L[r, r]
                for r in range(m - 1, -1, -1):
                    s = y[r]
                    for t in range(r + 1, m):
                        s -= L[t, r] * v[t]
                    v[r] = s / L[r, r]
                cv = 0.0
                beta = b_table[m, m]
                for r in range(m):
                    cv += W[r, m] * v[r]
                    beta += b_table[m, r] * v[r]
                X[i, m] = _rig_draw(a[m], beta, gammas[i, m], normals[i, m], uniforms[i, m]) + 0.5 * cv
    return out
