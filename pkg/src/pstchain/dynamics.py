"""Free evolution of a chain in the zero-, one- and two-excitation sectors.

Units have hbar = 1.  Propagators are built from the chain's eigensystem,
``U(t) = V exp(-i E t) V^T``, so one eigensolve serves a whole time sweep.
"""
import math
from dataclasses import dataclass
from itertools import combinations, combinations_with_replacement

import numpy as np

from .errors import (
    NumericalError,
    TruncationError,
    UnsupportedSiteError,
    UnsupportedStatisticsError,
)
from .jacobi import EigenSystem, eigensolve, mirror_index

FERMION = "fermion"
BOSON = "boson"
GATE_TOL = 1e-8


@dataclass(frozen=True)
class ParticleStatistics:
    kind: str

    def __post_init__(self):
        if self.kind not in (FERMION, BOSON):
            raise ValueError(f"statistics must be 'fermion' or 'boson', not {self.kind!r}")

    @property
    def eta(self):
        """1 for fermions, 0 for bosons."""
        return 1 if self.kind == FERMION else 0

    @property
    def sign(self):
        """Exchange sign: -1 for fermions, +1 for bosons."""
        return -1 if self.kind == FERMION else 1


def as_statistics(stats):
    return stats if isinstance(stats, ParticleStatistics) else ParticleStatistics(stats)


@dataclass(frozen=True)
class Propagator:
    """``u[j, x] = <j| exp(-i H t) |x>`` with 0-based array indices."""

    t: float
    u: np.ndarray

    def amplitude(self, j, x):
        """Amplitude from site ``x`` to site ``j`` (1-based sites)."""
        return complex(self.u[j - 1, x - 1])


def _eig(spec_or_eig):
    return spec_or_eig if isinstance(spec_or_eig, EigenSystem) else eigensolve(spec_or_eig)


def propagate(spec, t):
    """Single-excitation propagator at time ``t``.

    ``spec`` may be a :class:`ChainSpec` or a precomputed :class:`EigenSystem`.
    """
    eig = _eig(spec)
    v = eig.vectors
    phases = np.exp(-1j * eig.values * float(t))
    return Propagator(t=float(t), u=(v * phases) @ v.T)


def amplitude_series(spec, x, y, times):
    """``<y| U(t) |x>`` over an array of times, without forming full propagators."""
    eig = _eig(spec)
    coef = eig.vectors[y - 1, :] * eig.vectors[x - 1, :]
    times = np.asarray(times, dtype=float)
    out = np.empty(times.size, dtype=complex)
    # chunk to bound memory on long sweeps
    step = 4096
    for s in range(0, times.size, step):
        ts = times[s:s + step]
        out[s:s + step] = np.exp(-1j * np.outer(ts, eig.values)) @ coef
    return out


def transfer_fidelity(spec, x, y, t):
    """Magnitude and phase of the amplitude from site ``x`` to site ``y``."""
    n = spec.n
    for site in (x, y):
        if not 1 <= site <= n:
            raise ValueError(f"site {site} outside 1..{n}")
    f = amplitude_series(spec, x, y, [t])[0]
    return abs(f), math.atan2(f.imag, f.real)


def reversal(n):
    return np.eye(n)[::-1]


def mirror_check(spec, cert):
    """``max |U(tau) - exp(-i phi) R|`` with ``R`` the site-reversal matrix."""
    u = propagate(spec, cert.tau).u
    return float(np.max(np.abs(u - np.exp(-1j * cert.phi) * reversal(spec.n))))


def pair_basis(n, stats):
    """Ascending site pairs (1-based): ``j < l`` for fermions, ``j <= l`` for bosons."""
    stats = as_statistics(stats)
    sites = range(1, n + 1)
    if stats.kind == FERMION:
        return list(combinations(sites, 2))
    return list(combinations_with_replacement(sites, 2))


@dataclass(frozen=True)
class TwoParticleState:
    """Two identical particles; ``amplitudes`` follow :func:`pair_basis`.

    For fermions the basis ket ``(j, l)`` is ``a_j^dag a_l^dag |0>`` with
    ``j < l`` (ascending-order convention).
    """

    statistics: ParticleStatistics
    n: int
    amplitudes: np.ndarray

    def __post_init__(self):
        stats = as_statistics(self.statistics)
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        dim = len(pair_basis(self.n, stats))
        if amps.size != dim:
            raise ValueError(f"expected {dim} amplitudes for n={self.n}, got {amps.size}")
        if abs(np.linalg.norm(amps) - 1.0) > 1e-12:
            raise ValueError("two-particle state must have unit norm")
        amps.setflags(write=False)
        object.__setattr__(self, "statistics", stats)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_sites(cls, n, stats, x, y):
        """Basis state with particles on sites ``x`` and ``y`` (any order).

        For fermions ``|x y>`` with ``x > y`` equals ``-|y x>``.
        """
        stats = as_statistics(stats)
        if stats.kind == FERMION and x == y:
            raise ValueError("two fermions cannot share a site")
        basis = pair_basis(n, stats)
        amps = np.zeros(len(basis), dtype=complex)
        key = (min(x, y), max(x, y))
        amps[basis.index(key)] = -1.0 if (stats.kind == FERMION and x > y) else 1.0
        return cls(stats, n, amps)

    def amplitude(self, j, l):
        basis = pair_basis(self.n, self.statistics)
        sign = 1.0
        if j > l:
            j, l = l, j
            sign = float(self.statistics.sign)
        return sign * complex(self.amplitudes[basis.index((j, l))])


def _pair_to_matrix(n, stats, amps):
    """Embed pair amplitudes as a (anti)symmetric ``n x n`` product-space tensor."""
    a = np.zeros((n, n), dtype=complex)
    r2 = math.sqrt(2.0)
    for c, (j, l) in zip(amps, pair_basis(n, stats)):
        j -= 1
        l -= 1
        if j == l:
            a[j, j] = c
        else:
            a[j, l] = c / r2
            a[l, j] = stats.sign * c / r2
    return a


def _matrix_to_pair(n, stats, a):
    r2 = math.sqrt(2.0)
    return np.array(
        [a[j - 1, l - 1] if j == l else r2 * a[j - 1, l - 1] for j, l in pair_basis(n, stats)]
    )


def evolve_two_particle(spec, psi, t):
    """Evolve a two-particle state for time ``t``.

    Particles do not interact, so the product-space tensor evolves as
    ``U A U^T``: the amplitude moving from pair ``(x, y)`` to ``(j, l)`` is
    ``f_jx f_ly +/- f_jy f_lx``.
    """
    n = spec.n
    if psi.n != n:
        raise ValueError(f"state is for {psi.n} sites, chain has {n}")
    u = propagate(spec, t).u
    a = _pair_to_matrix(n, psi.statistics, psi.amplitudes)
    out = _matrix_to_pair(n, psi.statistics, u @ a @ u.T)
    out /= np.linalg.norm(out)
    return TwoParticleState(psi.statistics, n, out)


@dataclass(frozen=True)
class TwoQubitGate:
    """4x4 gate on basis ``(|00>, |10>, |01>, |11>)``; ``|10>`` is site x occupied.

    ``m`` is the analytic gate; ``numeric`` the matrix read off the simulated
    sector evolutions and ``deviation`` their max entrywise difference.
    """

    m: np.ndarray
    numeric: np.ndarray = None
    deviation: float = 0.0

    def __post_init__(self):
        m = np.array(self.m, dtype=complex)
        if m.shape != (4, 4):
            raise ValueError("gate must be 4x4")
        if np.max(np.abs(m.conj().T @ m - np.eye(4))) > 1e-10:
            raise ValueError("gate is not unitary")
        m.setflags(write=False)
        object.__setattr__(self, "m", m)


def analytic_gate(phi, stats):
    """Effective pair gate for global phase ``phi`` and the given statistics."""
    stats = as_statistics(stats)
    p = np.exp(-1j * phi)
    g = np.zeros((4, 4), dtype=complex)
    g[0, 0] = 1.0
    g[1, 2] = p
    g[2, 1] = p
    g[3, 3] = (-1.0) ** stats.eta * p * p
    return g


def numeric_gate(spec, tau, x, stats):
    """Gate read off the evolved sectors for the pair ``(x, mirror(x))``."""
    stats = as_statistics(stats)
    n = spec.n
    xb = mirror_index(x, n)
    eig = _eig(spec)
    u = propagate(eig, tau).u
    g = np.zeros((4, 4), dtype=complex)
    g[0, 0] = 1.0
    # |10> = particle at x, |01> = particle at the mirror site
    idx = {1: x - 1, 2: xb - 1}
    for col, src in idx.items():
        for row, dst in idx.items():
            g[row, col] = u[dst, src]
    psi = TwoParticleState.from_sites(n, stats, x, xb)
    out = evolve_two_particle(eig, psi, tau)
    g[3, 3] = out.amplitude(x, xb)
    return g


def effective_gate(spec, cert, x, stats):
    """Two-qubit gate induced on sites ``x`` and its mirror over one transfer time.

    The analytic form and the simulated sector amplitudes are both computed;
    a disagreement above ``1e-8`` means the chain does not transfer perfectly.
    """
    stats = as_statistics(stats)
    if x == mirror_index(x, spec.n):
        raise UnsupportedSiteError(f"site {x} is the chain centre and its own mirror")
    m = analytic_gate(cert.phi, stats)
    num = numeric_gate(spec, cert.tau, x, stats)
    dev = float(np.max(np.abs(m - num)))
    if dev > GATE_TOL:
        raise NumericalError(
            f"simulated gate deviates from the analytic form by {dev:.3e}; "
            "chain does not realize the certificate"
        )
    return TwoQubitGate(m=m, numeric=num, deviation=dev)


def _factorize(amp):
    """Rank-1 split of a 2x2 amplitude matrix; returns factors and the residual."""
    uu, s, vh = np.linalg.svd(amp)
    left = uu[:, 0] * s[0]
    right = vh[0, :]
    # gauge: make the larger component of the right factor real positive
    k = int(np.argmax(np.abs(right)))
    ph = right[k] / abs(right[k])
    return left * ph, right / ph, float(s[1])


def two_way_transfer(spec, cert, x, a, b, stats=BOSON):
    """Send qubit ``a`` from site ``x`` and ``b`` from its mirror simultaneously.

    Returns ``(received_at_x, received_at_mirror)``, each a length-2 complex
    array of ``(|0>, |1>)`` amplitudes.
    """
    stats = as_statistics(stats)
    if stats.kind != BOSON:
        raise UnsupportedStatisticsError("two-way transfer needs bosonic statistics")
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    gate = effective_gate(spec, cert, x, stats)
    # basis order (00, 10, 01, 11): first label is site x
    vec = np.array([a[0] * b[0], a[1] * b[0], a[0] * b[1], a[1] * b[1]])
    out = gate.numeric @ vec
    amp = np.array([[out[0], out[2]], [out[1], out[3]]])
    at_x, at_mirror, resid = _factorize(amp)
    if resid > 1e-10:
        raise NumericalError(f"output is not a product state (second Schmidt value {resid:.3e})")
    return at_x, at_mirror


_PANEL_NODES = 40


def _composite_gauss(length, panels):
    """Nodes and weights of ``panels`` equal Gauss-Legendre panels on ``[0, length]``."""
    xg, wg = np.polynomial.legendre.leggauss(_PANEL_NODES)
    h = length / panels
    left = h * np.arange(panels)
    x = (left[:, None] + 0.5 * h * (xg + 1.0)).ravel()
    w = np.tile(0.5 * h * wg, panels)
    return x, w


@dataclass(frozen=True)
class WellPacket:
    """Wave packet in the infinite square well ``[0, L]``.

    ``coefficients[k-1]`` multiplies ``sqrt(2/L) sin(k pi x / L)``.  ``tail``
    is the norm left outside the retained modes (0 for explicit packets).
    """

    coefficients: np.ndarray
    length: float = 1.0
    tail: float = 0.0

    def __post_init__(self):
        c = np.array(self.coefficients, dtype=complex).reshape(-1)
        if c.size < 1:
            raise ValueError("packet needs at least one mode")
        if abs(np.vdot(c, c).real - 1.0) > 1e-10:
            raise ValueError("mode coefficients must have unit norm")
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)

    @property
    def modes(self):
        return self.coefficients.size

    @property
    def ground_energy(self):
        return math.pi**2 / (2.0 * self.length**2)

    @classmethod
    def gaussian(cls, x0, sigma, modes, length=1.0, k0=0.0, quad_points=4000):
        """Project ``exp(-(x-x0)^2 / (2 sigma^2) + i k0 x)`` onto the first ``modes`` states.

        Overlaps use composite Gauss-Legendre quadrature on ``[0, L]`` with
        about ``quad_points`` nodes (40-point panels).  ``tail`` sums the
        squared overlaps of modes ``modes+1 .. quad_points//4`` plus a
        ``1/k^2`` estimate of the remainder (the Gaussian does not vanish
        exactly at the walls).  Retained coefficients are renormalized.
        """
        x, w = _composite_gauss(length, max(1, quad_points // _PANEL_NODES))
        g = np.exp(-((x - x0) ** 2) / (2.0 * sigma**2) + 1j * k0 * x)
        g /= math.sqrt(np.sum(w * np.abs(g) ** 2))
        kmax = max(4 * modes, quad_points // 4)
        k = np.arange(1, kmax + 1)
        basis = math.sqrt(2.0 / length) * np.sin(np.outer(k, x) * math.pi / length)
        c = basis @ (w * g)
        high = np.abs(c[modes:]) ** 2
        tail = float(np.sum(high) + kmax * high[-1])
        kept = c[:modes]
        return cls(kept / np.linalg.norm(kept), length, tail)

    def evaluate(self, x, t=0.0):
        k = np.arange(1, self.modes + 1)
        phases = np.exp(-1j * self.ground_energy * k**2 * t)
        basis = math.sqrt(2.0 / self.length) * np.sin(
            np.outer(np.asarray(x, dtype=float), k) * math.pi / self.length
        )
        return basis @ (self.coefficients * phases)


@dataclass(frozen=True)
class RevivalResult:
    max_deviation: float
    max_amplitude: float
    mirror_time: float

    @property
    def relative_deviation(self):
        return self.max_deviation / self.max_amplitude if self.max_amplitude else 0.0


TAIL_LIMIT = 1e-12


def well_mirror_revival(packet, samples=2001):
    """Compare ``Psi(x, pi/E_1)`` with ``-Psi(L - x, 0)`` on a uniform grid.

    Raises :class:`TruncationError` when the packet's tail norm exceeds 1e-12.
    """
    if packet.tail > TAIL_LIMIT:
        raise TruncationError(
            f"packet leaves {packet.tail:.3e} of its norm outside {packet.modes} modes",
            tail=packet.tail,
        )
    if samples < 2:
        raise ValueError("need at least two sample points")
    t_m = math.pi / packet.ground_energy
    x = np.linspace(0.0, packet.length, samples)
    psi_t = packet.evaluate(x, t_m)
    psi_0_mirror = packet.evaluate(packet.length - x)
    dev = float(np.max(np.abs(psi_t + psi_0_mirror)))
    return RevivalResult(dev, float(np.max(np.abs(packet.evaluate(x)))), t_m)
