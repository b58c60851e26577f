# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled tridiagonal kernels; same contracts as ``_kernels_py``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport copysign, fabs, sin, sqrt

cnp.import_array()

cdef double EPS = np.finfo(float).eps
cdef double SAFMIN = np.finfo(float).tiny


cdef double _pivmin(const double[:] e) nogil:
    cdef Py_ssize_t j
    cdef double emax = 0.0
    for j in range(e.shape[0]):
        if e[j] * e[j] > emax:
            emax = e[j] * e[j]
    return SAFMIN * (emax if emax > 1.0 else 1.0)


cdef int _count(const double[:] d, const double[:] e, double x, double pivmin) nogil:
    cdef Py_ssize_t j
    cdef int count = 0
    cdef double p = x - d[0]
    if fabs(p) < pivmin:
        p = -pivmin
    if p < 0.0:
        count += 1
    for j in range(1, d.shape[0]):
        p = (x - d[j]) - e[j - 1] * e[j - 1] / p
        if fabs(p) < pivmin:
            p = -pivmin
        if p < 0.0:
            count += 1
    return count


def sturm_count(d, e, double x):
    cdef const double[:] dv = np.ascontiguousarray(d, dtype=float)
    cdef const double[:] ev = np.ascontiguousarray(e, dtype=float)
    return _count(dv, ev, x, _pivmin(ev))


cdef void _gershgorin(const double[:] d, const double[:] e, double* lo, double* hi) nogil:
    cdef Py_ssize_t j, n = d.shape[0]
    cdef double r
    lo[0] = d[0]
    hi[0] = d[0]
    for j in range(n):
        r = 0.0
        if j > 0:
            r += fabs(e[j - 1])
        if j < n - 1:
            r += fabs(e[j])
        if d[j] - r < lo[0]:
            lo[0] = d[j] - r
        if d[j] + r > hi[0]:
            hi[0] = d[j] + r


def gershgorin(d, e):
    cdef const double[:] dv = np.ascontiguousarray(d, dtype=float)
    cdef const double[:] ev = np.ascontiguousarray(e, dtype=float)
    cdef double lo, hi
    _gershgorin(dv, ev, &lo, &hi)
    return lo, hi


def bisect_eigenvalues(d, e):
    cdef const double[:] dv = np.ascontiguousarray(d, dtype=float)
    cdef const double[:] ev = np.ascontiguousarray(e, dtype=float)
    cdef Py_ssize_t n = dv.shape[0], k
    cdef double lo0, hi0, lo, hi, mid, tol, tnorm, pad, hi_bound
    cdef double pivmin = _pivmin(ev)
    out = np.empty(n)
    cdef double[:] ov = out
    _gershgorin(dv, ev, &lo0, &hi0)
    tnorm = fabs(lo0) if fabs(lo0) > fabs(hi0) else fabs(hi0)
    pad = 2.0 * EPS * tnorm * n + 2.0 * pivmin
    lo0 -= pad
    hi0 += pad
    hi_bound = hi0
    with nogil:
        for k in range(n):
            lo = lo0
            hi = hi_bound
            while True:
                mid = 0.5 * (lo + hi)
                tol = 2.0 * EPS * (fabs(lo) if fabs(lo) > fabs(hi) else fabs(hi)) + pivmin
                if hi - lo <= tol or mid <= lo or mid >= hi:
                    break
                if _count(dv, ev, mid, pivmin) > k:
                    lo = mid
                else:
                    hi = mid
            ov[k] = 0.5 * (lo + hi)
            hi_bound = hi
    return out


cdef void _solve(const double[:] d, const double[:] e, double lam, double tiny,
                 double[:] y, double[:] x, double[:] u0, double[:] u1,
                 double[:] u2) nogil:
    cdef Py_ssize_t j, n = d.shape[0]
    cdef double r0, r1, l, n0, n1, m, yj, s, piv
    r0 = d[0] - lam
    r1 = e[0] if n > 1 else 0.0
    for j in range(n - 1):
        l = e[j]
        n0 = d[j + 1] - lam
        n1 = e[j + 1] if j + 1 < n - 1 else 0.0
        if fabs(r0) >= fabs(l):
            if fabs(r0) < tiny:
                r0 = copysign(tiny, r0)
            m = l / r0
            u0[j] = r0
            u1[j] = r1
            u2[j] = 0.0
            y[j + 1] -= m * y[j]
            r0 = n0 - m * r1
            r1 = n1
        else:
            m = r0 / l
            u0[j] = l
            u1[j] = n0
            u2[j] = n1
            yj = y[j]
            y[j] = y[j + 1]
            y[j + 1] = yj - m * y[j + 1]
            r0 = r1 - m * n0
            r1 = -m * n1
    if fabs(r0) < tiny:
        r0 = copysign(tiny, r0)
    u0[n - 1] = r0
    u1[n - 1] = 0.0
    u2[n - 1] = 0.0
    for j in range(n - 1, -1, -1):
        s = y[j]
        if j + 1 < n:
            s -= u1[j] * x[j + 1]
        if j + 2 < n:
            s -= u2[j] * x[j + 2]
        x[j] = s / u0[j]


def inverse_iteration(d, e, values, int iters=3):
    cdef const double[:] dv = np.ascontiguousarray(d, dtype=float)
    cdef const double[:] ev = np.ascontiguousarray(e, dtype=float)
    cdef const double[:] lv = np.ascontiguousarray(values, dtype=float)
    cdef Py_ssize_t n = dv.shape[0], m = lv.shape[0]
    cdef Py_ssize_t j, k, i, it, cluster_start = 0
    cdef int ps
    cdef double lo, hi, tnorm, tiny, lam, dot, nrm, sgn
    _gershgorin(dv, ev, &lo, &hi)
    tnorm = fabs(lo) if fabs(lo) > fabs(hi) else fabs(hi)
    if tnorm < SAFMIN:
        tnorm = SAFMIN
    tiny = EPS * tnorm
    vecs = np.zeros((n, m))
    cdef double[:, :] V = vecs
    cdef double[:] x = np.empty(n)
    cdef double[:] y = np.empty(n)
    cdef double[:] u0 = np.empty(n)
    cdef double[:] u1 = np.empty(n)
    cdef double[:] u2 = np.empty(n)
    with nogil:
        for k in range(m):
            lam = lv[k]
            if k > 0 and fabs(lv[k - 1] - lam) > 1e-3 * tnorm:
                cluster_start = k
            for j in range(n):
                x[j] = 1.0 + 0.5 * sin(1.0 + 7.0 * j + 3.0 * k)
            for it in range(iters):
                for j in range(n):
                    y[j] = x[j]
                _solve(dv, ev, lam, tiny, y, x, u0, u1, u2)
                # rescale by the largest entry first so the 2-norm cannot overflow
                nrm = 0.0
                for j in range(n):
                    if fabs(x[j]) > nrm:
                        nrm = fabs(x[j])
                for j in range(n):
                    x[j] /= nrm
                for ps in range(2):
                    for i in range(cluster_start, k):
                        dot = 0.0
                        for j in range(n):
                            dot += x[j] * V[j, i]
                        for j in range(n):
                            x[j] -= dot * V[j, i]
                nrm = 0.0
                for j in range(n):
                    nrm += x[j] * x[j]
                nrm = sqrt(nrm)
                for j in range(n):
                    x[j] /= nrm
            sgn = 1.0
            for j in range(n):
                if x[j] != 0.0:
                    sgn = 1.0 if x[j] > 0.0 else -1.0
                    break
            for j in range(n):
                V[j, k] = sgn * x[j]
    return vecs
