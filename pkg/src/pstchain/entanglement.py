"""Pair entanglement and the two entanglement-generation protocols.

Protocol 1 places one excitation at the centre of a chain and lets it spread
symmetrically to the two ends.  Protocol 2 prepares a product state on a
mirror pair and applies the effective gate of one transfer period.
"""
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .dynamics import as_statistics, effective_gate, propagate
from .jacobi import ChainSpec

PAIR_TOL = 1e-12


@dataclass(frozen=True)
class PureTwoQubitState:
    """``a|00> + b|01> + c|10> + d|11>``; the first qubit is site x."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        for name in "abcd":
            object.__setattr__(self, name, complex(getattr(self, name)))
        if abs(self.norm2() - 1.0) > 1e-12:
            raise ValueError(f"two-qubit state has squared norm {self.norm2()!r}, not 1")

    def norm2(self):
        return abs(self.a) ** 2 + abs(self.b) ** 2 + abs(self.c) ** 2 + abs(self.d) ** 2

    def amplitude_matrix(self):
        return np.array([[self.a, self.b], [self.c, self.d]])

    @classmethod
    def product(cls, first, second):
        """``(first[0]|0> + first[1]|1>) (second[0]|0> + second[1]|1>)``."""
        f0, f1 = first
        s0, s1 = second
        return cls(f0 * s0, f0 * s1, f1 * s0, f1 * s1)

    @classmethod
    def plus_plus(cls):
        h = 1 / math.sqrt(2.0)
        return cls.product((h, h), (h, h))


def concurrence(s):
    """``2 |ad - bc|``."""
    return 2.0 * abs(s.a * s.d - s.b * s.c)


def schmidt_coefficients(s):
    """Singular values ``(s0, s1)`` of ``[[a, b], [c, d]]``, descending."""
    sv = np.linalg.svd(s.amplitude_matrix(), compute_uv=False)
    return float(sv[0]), float(sv[1])


def apply_effective_gate(gate, s):
    """Apply a pair gate (basis ``00, 10, 01, 11``) to a state stored as ``a, b, c, d``."""
    m = gate.m if hasattr(gate, "m") else np.asarray(gate)
    out = m @ np.array([s.a, s.c, s.b, s.d])
    out /= np.linalg.norm(out)
    return PureTwoQubitState(out[0], out[2], out[1], out[3])


_SY2 = np.array([[0, 0, 0, -1], [0, 0, 1, 0], [0, 1, 0, 0], [-1, 0, 0, 0]], dtype=complex)


def wootters_concurrence(rho):
    """Concurrence of a two-qubit density matrix (basis ``00, 01, 10, 11``).

    Uses the singular values of ``X^T (sy x sy) X`` with ``rho = X X^dag``
    rather than square roots of the eigenvalues of ``rho rho~``; the latter
    turns roundoff-level zeros into errors of order 1e-8.
    """
    rho = np.asarray(rho, dtype=complex)
    w, v = np.linalg.eigh(0.5 * (rho + rho.conj().T))
    x = v * np.sqrt(np.clip(w, 0.0, None))
    lam = np.linalg.svd(x.T @ _SY2 @ x, compute_uv=False)
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def pair_density_matrix(alpha, i, j):
    """Reduced state of sites ``i`` and ``j`` for a single-excitation pure state.

    ``alpha`` holds site amplitudes (0-based ``i, j``); weight on other sites
    shows up as the ``|00>`` population.
    """
    ai, aj = alpha[i], alpha[j]
    rest = max(0.0, 1.0 - abs(ai) ** 2 - abs(aj) ** 2)
    # basis 00, 01, 10, 11 with the first label on site i
    v = np.array([0.0, aj, ai, 0.0], dtype=complex)
    rho = np.outer(v, v.conj())
    rho[0, 0] += rest
    return rho


def halfchain_matrix(spec):
    """Hamiltonian of the reflection-symmetric sector as a half-length chain.

    Odd ``N = 2n-1``: basis ``(|j> + |N-j+1>)/sqrt(2)`` for ``j < n`` plus the
    centre site; the last coupling is ``sqrt(2) * omega_{n-1}``.  Even
    ``N = 2n``: the last diagonal entry becomes ``lam_n + omega_n``.
    """
    if not spec.is_persymmetric(1e-12):
        raise ValueError("symmetric-sector reduction needs a persymmetric chain")
    N = spec.n
    if N < 2:
        raise ValueError("chain too short for a symmetric sector")
    if N % 2:
        n = (N + 1) // 2
        lam = spec.lam[:n].copy()
        omega = spec.omega[: n - 1].copy()
        omega[-1] *= math.sqrt(2.0)
    else:
        n = N // 2
        lam = spec.lam[:n].copy()
        lam[-1] += spec.omega[n - 1]
        omega = spec.omega[: n - 1].copy()
    return ChainSpec(lam, omega)


def protocol1_halfchain_matrix(spec):
    """Dense symmetric-sector matrix; see :func:`halfchain_matrix`."""
    return halfchain_matrix(spec).matrix()


def symmetric_basis(N):
    """Columns are the symmetric-sector basis vectors in the site basis."""
    n = (N + 1) // 2
    b = np.zeros((N, n))
    r = 1 / math.sqrt(2.0)
    for j in range(n):
        jb = N - 1 - j
        if j == jb:
            b[j, j] = 1.0
        else:
            b[j, j] = r
            b[jb, j] = r
    return b


@dataclass(frozen=True)
class Protocol1Result:
    """Outcome of a protocol-1 run at one time.

    ``pair_state`` is the end-pair state conditioned on the excitation being
    at an end (``|00>`` if it is nowhere near); ``pair_weight`` the
    probability of that; ``concurrence`` is that of the unconditioned
    reduced state of the two end sites.
    """

    t: float
    pair_state: PureTwoQubitState
    pair_weight: float
    concurrence: float
    amplitudes: np.ndarray


def _protocol1(spec, t, initial):
    u = propagate(spec, t).u
    alpha = u @ initial
    N = spec.n
    a1, aN = alpha[0], alpha[N - 1]
    weight = float(abs(a1) ** 2 + abs(aN) ** 2)
    if weight > PAIR_TOL:
        s = math.sqrt(weight)
        pair = PureTwoQubitState(0.0, aN / s, a1 / s, 0.0)
    else:
        pair = PureTwoQubitState(1.0, 0.0, 0.0, 0.0)
    c = wootters_concurrence(pair_density_matrix(alpha, 0, N - 1))
    return Protocol1Result(float(t), pair, weight, c, alpha)


def run_protocol1(spec, t):
    """Start with one excitation at the centre of an odd chain; evolve for ``t``."""
    N = spec.n
    if N % 2 == 0:
        raise ValueError("protocol 1 needs an odd chain; use run_protocol1_even for even N")
    initial = np.zeros(N, dtype=complex)
    initial[N // 2] = 1.0
    return _protocol1(spec, t, initial)


def run_protocol1_even(spec, t):
    """Start with the centre pair maximally entangled on an even chain."""
    N = spec.n
    if N % 2:
        raise ValueError("entanglement transfer needs an even chain; use run_protocol1")
    initial = np.zeros(N, dtype=complex)
    initial[N // 2 - 1] = initial[N // 2] = 1 / math.sqrt(2.0)
    return _protocol1(spec, t, initial)


def run_protocol2(spec, cert, x, stats, s):
    """Apply the pair gate of ``(x, mirror(x))`` to ``s``.

    Returns the output state and its concurrence.  Entangled inputs are
    processed but warned about: the protocol assumes a product input.
    """
    stats = as_statistics(stats)
    if concurrence(s) > 1e-10:
        warnings.warn("protocol 2 expects a product input state", stacklevel=2)
    out = apply_effective_gate(effective_gate(spec, cert, x, stats), s)
    return out, concurrence(out)
