"""Pure-Python reference kernels for symmetric tridiagonal matrices.

These mirror ``_ckernels.pyx`` one-to-one and are used whenever the compiled
extension is missing (or ``PSTCHAIN_BACKEND=python`` is set).  All routines
take the diagonal ``d`` (length n) and the off-diagonal ``e`` (length n-1).
"""
import math

import numpy as np

EPS = np.finfo(float).eps
SAFMIN = np.finfo(float).tiny


def _as_list(a):
    return [float(v) for v in a]


def _pivmin(e):
    emax = max((v * v for v in e), default=0.0)
    return SAFMIN * max(1.0, emax)


def sturm_count(d, e, x):
    """Number of eigenvalues strictly greater than ``x``.

    Counts sign changes of the leading principal minors of ``x*I - T`` using
    the ratio form ``p_j = (x - d_j) - e_{j-1}**2 / p_{j-1}``, which cannot
    overflow.
    """
    d = _as_list(d)
    e = _as_list(e)
    pivmin = _pivmin(e)
    count = 0
    p = x - d[0]
    if abs(p) < pivmin:
        p = -pivmin
    if p < 0.0:
        count += 1
    for j in range(1, len(d)):
        p = (x - d[j]) - e[j - 1] * e[j - 1] / p
        if abs(p) < pivmin:
            p = -pivmin
        if p < 0.0:
            count += 1
    return count


def gershgorin(d, e):
    n = len(d)
    lo = math.inf
    hi = -math.inf
    for j in range(n):
        r = 0.0
        if j > 0:
            r += abs(e[j - 1])
        if j < n - 1:
            r += abs(e[j])
        lo = min(lo, d[j] - r)
        hi = max(hi, d[j] + r)
    return lo, hi


def bisect_eigenvalues(d, e):
    """All eigenvalues in descending order, by bisection on Sturm counts."""
    d = _as_list(d)
    e = _as_list(e)
    n = len(d)
    lo0, hi0 = gershgorin(d, e)
    tnorm = max(abs(lo0), abs(hi0))
    pad = 2.0 * EPS * tnorm * n + 2.0 * _pivmin(e)
    lo0 -= pad
    hi0 += pad
    out = np.empty(n)
    # k-th largest: the point where the count of larger eigenvalues drops to k
    hi_bound = hi0
    for k in range(n):
        lo = lo0
        hi = hi_bound
        while True:
            mid = 0.5 * (lo + hi)
            tol = 2.0 * EPS * max(abs(lo), abs(hi)) + _pivmin(e)
            if hi - lo <= tol or mid <= lo or mid >= hi:
                break
            if sturm_count(d, e, mid) > k:
                lo = mid
            else:
                hi = mid
        out[k] = 0.5 * (lo + hi)
        hi_bound = hi
    return out


def _tridiag_solve(d, e, lam, rhs, tnorm):
    """Solve ``(T - lam*I) x = rhs`` by Gaussian elimination with partial pivoting.

    Pivots smaller than ``EPS * tnorm`` in magnitude are raised to that size
    (keeping their sign), so the solve stays finite at an exact eigenvalue.
    """
    n = len(d)
    tiny = EPS * tnorm if tnorm > 0.0 else SAFMIN
    a = [d[j] - lam for j in range(n)]
    b = list(e) + [0.0]
    low = list(e) + [0.0]
    u0 = [0.0] * n
    u1 = [0.0] * n
    u2 = [0.0] * n
    y = list(rhs)
    # working row: entries at columns j and j+1
    r0, r1 = a[0], b[0]
    for j in range(n - 1):
        l = low[j]
        n0, n1 = a[j + 1], b[j + 1]
        if abs(r0) >= abs(l):
            if abs(r0) < tiny:
                r0 = math.copysign(tiny, r0)
            m = l / r0
            u0[j], u1[j], u2[j] = r0, r1, 0.0
            y[j + 1] -= m * y[j]
            r0 = n0 - m * r1
            r1 = n1
        else:
            m = r0 / l
            u0[j], u1[j], u2[j] = l, n0, n1
            yj = y[j]
            y[j] = y[j + 1]
            y[j + 1] = yj - m * y[j + 1]
            r0 = r1 - m * n0
            r1 = -m * n1
    if abs(r0) < tiny:
        r0 = math.copysign(tiny, r0)
    u0[n - 1], u1[n - 1], u2[n - 1] = r0, 0.0, 0.0
    x = [0.0] * n
    for j in range(n - 1, -1, -1):
        s = y[j]
        if j + 1 < n:
            s -= u1[j] * x[j + 1]
        if j + 2 < n:
            s -= u2[j] * x[j + 2]
        x[j] = s / u0[j]
    return x


def inverse_iteration(d, e, values, iters=3):
    """Eigenvectors (columns) for the given eigenvalues via inverse iteration.

    Vectors of eigenvalues closer than ``1e-3 * ||T||`` are reorthogonalized
    against each other; each column is signed so its first entry is positive.
    """
    d = _as_list(d)
    e = _as_list(e)
    n = len(d)
    lo, hi = gershgorin(d, e)
    tnorm = max(abs(lo), abs(hi), SAFMIN)
    vecs = np.zeros((n, len(values)))
    cluster_start = 0
    for k, lam in enumerate(values):
        lam = float(lam)
        if k > 0 and abs(values[k - 1] - lam) > 1e-3 * tnorm:
            cluster_start = k
        x = [1.0 + 0.5 * math.sin(1.0 + 7.0 * j + 3.0 * k) for j in range(n)]
        for _ in range(iters):
            x = _tridiag_solve(d, e, lam, x, tnorm)
            # rescale by the largest entry first so the 2-norm cannot overflow
            big = max(abs(v) for v in x)
            x = [v / big for v in x]
            for _pass in range(2):
                for i in range(cluster_start, k):
                    col = vecs[:, i]
                    dot = sum(x[j] * col[j] for j in range(n))
                    x = [x[j] - dot * col[j] for j in range(n)]
            nrm = math.sqrt(sum(v * v for v in x))
            x = [v / nrm for v in x]
        s = 1.0
        for v in x:
            if v != 0.0:
                s = 1.0 if v > 0.0 else -1.0
                break
        vecs[:, k] = [s * v for v in x]
    return vecs
