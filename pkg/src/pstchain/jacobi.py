"""Real symmetric tridiagonal (Jacobi) matrices.

A chain of ``n`` sites is described by on-site energies ``lam`` (length n)
and nearest-neighbour couplings ``omega`` (length n-1).  Sites are numbered
from 1 in the public API, matching the physics convention; arrays are
0-based internally.

Eigenvalues are always reported in descending order.
"""
from dataclasses import dataclass

import mpmath
import numpy as np

from . import kernels
from .errors import NumericalDegeneracyError, NumericRangeError

EVEN = "even"
ODD = "odd"


@dataclass(frozen=True)
class ChainSpec:
    """On-site energies and positive couplings of an ``n``-site chain."""

    lam: np.ndarray
    omega: np.ndarray

    def __post_init__(self):
        lam = np.array(self.lam, dtype=float).reshape(-1)
        omega = np.array(self.omega, dtype=float).reshape(-1)
        if lam.size < 1:
            raise ValueError("a chain needs at least one site")
        if omega.size != lam.size - 1:
            raise ValueError(
                f"expected {lam.size - 1} couplings for {lam.size} sites, got {omega.size}"
            )
        if not (np.all(np.isfinite(lam)) and np.all(np.isfinite(omega))):
            raise ValueError("chain entries must be finite")
        if np.any(omega <= 0.0):
            raise ValueError("couplings must be strictly positive")
        lam.setflags(write=False)
        omega.setflags(write=False)
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "omega", omega)

    @property
    def n(self):
        return self.lam.size

    def matrix(self):
        """Dense ``n x n`` Hamiltonian in the single-excitation basis."""
        return np.diag(self.lam) + np.diag(self.omega, 1) + np.diag(self.omega, -1)

    def is_persymmetric(self, tol=1e-12):
        return bool(
            np.all(np.abs(self.lam - self.lam[::-1]) <= tol)
            and np.all(np.abs(self.omega - self.omega[::-1]) <= tol)
        )

    def persymmetry_deviation(self):
        dev = np.max(np.abs(self.lam - self.lam[::-1]))
        if self.omega.size:
            dev = max(dev, np.max(np.abs(self.omega - self.omega[::-1])))
        return float(dev)

    @classmethod
    def uniform(cls, n, coupling=1.0, onsite=0.0):
        return cls(np.full(n, float(onsite)), np.full(n - 1, float(coupling)))


@dataclass(frozen=True)
class EigenSystem:
    """Eigenpairs of a chain.

    ``vectors[:, k]`` is the eigenvector of ``values[k]``; its first entry is
    positive.  ``parities[k]`` is ``"even"`` or ``"odd"`` under site
    reflection and ``nu`` is the reflection sign of the top eigenvector (0 for
    positive couplings).
    """

    values: np.ndarray
    vectors: np.ndarray
    parities: tuple
    nu: int = 0

    @property
    def n(self):
        return self.values.size


@dataclass(frozen=True)
class SturmSequence:
    values: np.ndarray
    sign_changes: int


def mirror_index(j, n):
    """Mirror image ``n - j + 1`` of site ``j`` on an ``n``-site chain."""
    if not (1 <= j <= n):
        raise ValueError(f"site {j} outside 1..{n}")
    return n - j + 1


def sturm_eval(spec, e):
    """Leading principal minors ``P_0 .. P_n`` of ``e*I - H``.

    ``sign_changes`` equals the number of eigenvalues above ``e``.  The minors
    themselves are computed by the plain three-term recurrence, so they can
    overflow for long chains far from the spectrum; the count is taken from
    the overflow-free ratio form.
    """
    e = float(e)
    p = np.empty(spec.n + 1)
    p[0] = 1.0
    p[1] = e - spec.lam[0]
    for j in range(2, spec.n + 1):
        p[j] = (e - spec.lam[j - 1]) * p[j - 1] - spec.omega[j - 2] ** 2 * p[j - 2]
    return SturmSequence(values=p, sign_changes=kernels.sturm_count(spec.lam, spec.omega, e))


def eigenvalues(spec):
    return kernels.bisect_eigenvalues(spec.lam, spec.omega)


def eigensolve(spec):
    """Eigenvalues (descending) and orthonormal eigenvectors of ``spec``.

    Eigenvalues come from bisection on Sturm counts and eigenvectors from
    inverse iteration; both kernels are compiled when the extension is built.
    """
    values = eigenvalues(spec)
    if spec.n > 1:
        scale = max(float(np.max(np.abs(values))), np.finfo(float).tiny)
        gaps = values[:-1] - values[1:]
        k = int(np.argmin(gaps))
        if gaps[k] < 1e-12 * scale:
            raise NumericalDegeneracyError(
                f"eigenvalues {k} and {k + 1} are closer than 1e-12 relative "
                f"({values[k]!r}, {values[k + 1]!r})"
            )
    vectors = kernels.inverse_iteration(spec.lam, spec.omega, values)
    values.setflags(write=False)
    vectors.setflags(write=False)
    # never read parity off a central component, which is zero for odd vectors
    signs = vectors[0, :] * vectors[-1, :]
    parities = tuple(EVEN if s > 0 else ODD for s in signs) if spec.n > 1 else (EVEN,)
    return EigenSystem(values=values, vectors=vectors, parities=parities, nu=0)


def _minors_mp(lam, omega, e):
    """Minors ``P_0..P_n`` at ``e`` and ``dP_n/dE``, in mpmath arithmetic."""
    p_prev, p = mpmath.mpf(1), e - lam[0]
    d_prev, d = mpmath.mpf(0), mpmath.mpf(1)
    minors = [p_prev, p]
    for j in range(1, len(lam)):
        w2 = omega[j - 1] ** 2
        p_prev, p, d_prev, d = (
            p,
            (e - lam[j]) * p - w2 * p_prev,
            d,
            p + (e - lam[j]) * d - w2 * d_prev,
        )
        minors.append(p)
    return minors, d


def eigvec_from_sturm(spec, eig, k, dps=50):
    """Eigenvector ``k`` from the minors recurrence, normalized, first entry > 0.

    ``a_j = P_{j-1}(E_k) / (omega_1 ... omega_{j-1})``.  Evaluated forward
    this amplifies the eigenvalue's rounding error geometrically along the
    chain, so the default runs in ``dps``-digit arithmetic after polishing
    ``E_k`` by Newton steps on ``P_n``.  ``dps=None`` gives the plain double
    precision evaluation.  Meant as a cross-check for short chains.
    """
    if not (0 <= k < eig.n):
        raise IndexError(f"eigenvector index {k} outside 0..{eig.n - 1}")
    prods = np.cumprod(spec.omega)
    if not (np.all(np.isfinite(prods)) and np.all(prods > 0.0)):
        raise NumericRangeError("running product of couplings leaves the double range")
    if dps is None:
        minors = sturm_eval(spec, float(eig.values[k])).values
        a = np.concatenate([[1.0], minors[1:-1] / prods])
        if not np.all(np.isfinite(a)):
            raise NumericRangeError("minors overflow in double precision")
        return a / np.linalg.norm(a)
    with mpmath.workdps(dps):
        lam = [mpmath.mpf(float(v)) for v in spec.lam]
        omega = [mpmath.mpf(float(v)) for v in spec.omega]
        e = mpmath.mpf(float(eig.values[k]))
        for _ in range(8):
            minors, dp = _minors_mp(lam, omega, e)
            if dp == 0:
                break
            step = minors[-1] / dp
            e -= step
            if abs(step) <= mpmath.mpf(10) ** (-dps + 5) * (1 + abs(e)):
                break
        minors, _ = _minors_mp(lam, omega, e)
        a = [mpmath.mpf(1)]
        prod = mpmath.mpf(1)
        for j in range(1, spec.n):
            prod *= omega[j - 1]
            a.append(minors[j] / prod)
        nrm = mpmath.sqrt(mpmath.fsum(v * v for v in a))
        return np.array([float(v / nrm) for v in a])


def parity_check(eig, tol=1e-9):
    """True when every eigenvector satisfies ``a[n-j+1] = (-1)**(k+nu) a[j]``."""
    for k in range(eig.n):
        v = eig.vectors[:, k]
        sign = -1.0 if (k + eig.nu) % 2 else 1.0
        if np.max(np.abs(v[::-1] - sign * v)) > tol:
            return False
    return True
