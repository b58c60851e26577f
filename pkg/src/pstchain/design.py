"""Spectrum-first chain design.

A spectrum certifies for perfect mirror transfer when all consecutive gaps are
odd multiples of a common unit ``delta``; the transfer time is then
``tau = pi / delta``.  Given a certified spectrum, the unique persymmetric
chain with positive couplings is rebuilt from its spectral weights by a
Lanczos (discrete Stieltjes) recurrence.
"""
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce

import numpy as np

from .errors import (
    CertificationIndeterminate,
    ConditioningError,
    DegenerateSpectrumError,
    ReconstructionBreakdown,
    SpectrumRejected,
)
from .jacobi import ChainSpec

MAX_DENOMINATOR = 10**6
RATIONAL_TOL = 1e-9
TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Spectrum:
    """Strictly descending eigenvalues.

    Values given as ``int`` or ``Fraction`` (all of them) make the spectrum
    exact and certification runs in rational arithmetic.  Input order is
    irrelevant; values are sorted descending.
    """

    values: tuple
    exact: bool = False

    def __init__(self, values, exact=None):
        vals = list(values)
        if not vals:
            raise ValueError("spectrum needs at least one eigenvalue")
        all_rational = all(
            isinstance(v, (int, Fraction)) and not isinstance(v, bool) for v in vals
        )
        if exact is None:
            exact = all_rational
        if exact:
            if not all_rational:
                raise ValueError("exact spectra take int or Fraction values")
            vals = [Fraction(v) for v in vals]
        else:
            vals = [float(v) for v in vals]
            if not all(math.isfinite(v) for v in vals):
                raise ValueError("spectrum values must be finite")
        vals.sort(reverse=True)
        for k in range(len(vals) - 1):
            if vals[k] == vals[k + 1]:
                raise DegenerateSpectrumError(
                    f"eigenvalue {vals[k]} repeated; Jacobi spectra are simple"
                )
        object.__setattr__(self, "values", tuple(vals))
        object.__setattr__(self, "exact", bool(exact))

    def __len__(self):
        return len(self.values)

    def as_array(self):
        return np.array([float(v) for v in self.values])

    def gaps(self):
        return [self.values[k] - self.values[k + 1] for k in range(len(self.values) - 1)]


@dataclass(frozen=True)
class PSTCertificate:
    """Transfer time, global phase and gap structure of a certified spectrum.

    ``phi`` lies in ``[0, 2*pi)``.  For exact spectra ``phi_over_pi`` holds
    ``phi / pi`` as a ``Fraction`` and ``delta_exact`` the exact gap unit.
    """

    tau: float
    phi: float
    delta: float
    odd_multipliers: tuple
    exact: bool = False
    delta_exact: Fraction = None
    phi_over_pi: Fraction = None

    def phase_residual(self, spectrum):
        """``max_k |exp(-i E_k tau) - (-1)**k exp(-i phi)|``."""
        e = spectrum.as_array()
        k = np.arange(e.size)
        lhs = np.exp(-1j * e * self.tau)
        rhs = (-1.0) ** k * np.exp(-1j * self.phi)
        return float(np.max(np.abs(lhs - rhs)))


@dataclass(frozen=True)
class SpectralWeights:
    """Squared first eigenvector components; positive and summing to one."""

    w: np.ndarray = field(repr=False)

    def __post_init__(self):
        w = np.array(self.w, dtype=float).reshape(-1)
        if np.any(w <= 0.0) or abs(w.sum() - 1.0) > 1e-12:
            raise ValueError("spectral weights must be positive and sum to 1")
        w.setflags(write=False)
        object.__setattr__(self, "w", w)


def _gcd_fractions(fracs):
    num = reduce(math.gcd, (f.numerator for f in fracs))
    den = reduce(lambda a, b: a * b // math.gcd(a, b), (f.denominator for f in fracs))
    return Fraction(num, den)


def _reject(quotients):
    for k, q in enumerate(quotients):
        if q % 2 == 0:
            raise SpectrumRejected(
                f"gap {k} is an even multiple ({q}) of the common unit",
                gap_index=k,
                quotient=q,
            )


def certify_spectrum(spectrum):
    """Check the perfect-transfer gap condition and build a certificate.

    Raises
    ------
    SpectrumRejected
        Some gap quotient is even.  No transfer time exists.
    CertificationIndeterminate
        Float-mode gap ratios are not rational within ``1e-9`` at denominator
        ``<= 1e6``.  This is not a rejection.
    """
    if not isinstance(spectrum, Spectrum):
        spectrum = Spectrum(spectrum)
    n = len(spectrum)
    if n == 1:
        # any time works for one site; fix the unit gap convention
        e0 = spectrum.values[0]
        if spectrum.exact:
            phi_pi = e0 % 2
            return PSTCertificate(
                tau=math.pi, phi=float(phi_pi) * math.pi, delta=1.0, odd_multipliers=(),
                exact=True, delta_exact=Fraction(1), phi_over_pi=phi_pi,
            )
        return PSTCertificate(
            tau=math.pi, phi=math.fmod(e0 * math.pi, TWO_PI) % TWO_PI, delta=1.0,
            odd_multipliers=(),
        )

    gaps = spectrum.gaps()
    if spectrum.exact:
        unit = _gcd_fractions(gaps)
        quotients = [int(g / unit) for g in gaps]
        _reject(quotients)
        phi_pi = (spectrum.values[0] / unit) % 2
        return PSTCertificate(
            tau=math.pi / float(unit),
            phi=float(phi_pi) * math.pi,
            delta=float(unit),
            odd_multipliers=tuple(quotients),
            exact=True,
            delta_exact=unit,
            phi_over_pi=phi_pi,
        )

    ref = min(gaps)
    ratios = []
    for k, g in enumerate(gaps):
        r = g / ref
        frac = Fraction(r).limit_denominator(MAX_DENOMINATOR)
        if abs(r - float(frac)) > RATIONAL_TOL * max(1.0, r):
            raise CertificationIndeterminate(
                f"gap {k} ratio {r!r} is not rational to {RATIONAL_TOL} "
                f"with denominator <= {MAX_DENOMINATOR}"
            )
        ratios.append(frac)
    unit_rel = _gcd_fractions(ratios)
    quotients = [int(r / unit_rel) for r in ratios]
    _reject(quotients)
    # average over all gaps; each gap estimates the unit independently
    delta = sum(gaps) / sum(quotients)
    tau = math.pi / delta
    phi = math.fmod(spectrum.values[0] * tau, TWO_PI) % TWO_PI
    return PSTCertificate(tau=tau, phi=phi, delta=delta, odd_multipliers=tuple(quotients))


def weights_from_spectrum(spectrum):
    """Spectral weights of the persymmetric chain with this spectrum.

    ``w_k`` is proportional to ``1 / |prod_{j != k} (E_k - E_j)|``.  Products
    are accumulated in log space, so long spectra do not underflow.
    """
    if not isinstance(spectrum, Spectrum):
        spectrum = Spectrum(spectrum)
    e = spectrum.as_array()
    n = e.size
    if n == 1:
        return SpectralWeights(np.ones(1))
    scale = max(float(np.max(np.abs(e))), float(e[0] - e[-1]))
    diff = np.abs(e[:, None] - e[None, :])
    np.fill_diagonal(diff, np.inf)
    k, j = np.unravel_index(np.argmin(diff), diff.shape)
    if diff[k, j] <= 64 * np.finfo(float).eps * scale:
        raise ConditioningError(
            f"eigenvalues {min(k, j)} and {max(k, j)} differ by {diff[k, j]!r}, "
            "below floating-point resolution",
            pair=(int(min(k, j)), int(max(k, j))),
        )
    np.fill_diagonal(diff, 1.0)
    logw = -np.sum(np.log(diff), axis=1)
    logw -= logw.max()
    w = np.exp(logw)
    w /= w.sum()
    if np.any(w <= 0.0):
        k = int(np.argmin(w))
        raise ConditioningError(f"weight {k} underflowed to zero", pair=(k, k))
    return SpectralWeights(w)


def lanczos_recurrence(nodes, weights):
    """Three-term recurrence coefficients of the discrete measure.

    Runs Lanczos on ``diag(nodes)`` from the start vector ``sqrt(weights)``
    with full (two-pass) reorthogonalization.  Returns ``(alpha, beta)``:
    diagonal and off-diagonal of the Jacobi matrix, in recurrence order.
    """
    x = np.asarray(nodes, dtype=float)
    n = x.size
    q = np.zeros((n, n))
    alpha = np.zeros(n)
    beta = np.zeros(max(n - 1, 0))
    q[:, 0] = np.sqrt(np.asarray(weights, dtype=float))
    q[:, 0] /= np.linalg.norm(q[:, 0])
    scale = float(np.max(np.abs(x))) or 1.0
    for j in range(n):
        v = x * q[:, j]
        alpha[j] = q[:, j] @ v
        if j == n - 1:
            break
        v -= alpha[j] * q[:, j]
        if j > 0:
            v -= beta[j - 1] * q[:, j - 1]
        for _ in range(2):
            v -= q[:, : j + 1] @ (q[:, : j + 1].T @ v)
        b = float(np.linalg.norm(v))
        if not b > 64 * np.finfo(float).eps * scale:
            raise ReconstructionBreakdown(
                f"coupling {j + 1} collapsed to {b!r}; weights inconsistent or "
                "severely ill-conditioned"
            )
        beta[j] = b
        q[:, j + 1] = v / b
    return alpha, beta


def reconstruct_chain(spectrum, weights, enforce_persymmetry=True):
    """Jacobi matrix with the given eigenvalues and spectral weights."""
    if not isinstance(spectrum, Spectrum):
        spectrum = Spectrum(spectrum)
    w = weights.w if isinstance(weights, SpectralWeights) else np.asarray(weights, float)
    if w.size != len(spectrum):
        raise ValueError("spectrum and weights differ in length")
    alpha, beta = lanczos_recurrence(spectrum.as_array(), w)
    if enforce_persymmetry:
        alpha = 0.5 * (alpha + alpha[::-1])
        beta = 0.5 * (beta + beta[::-1])
    return ChainSpec(alpha, beta)


@dataclass(frozen=True)
class Design:
    chain: ChainSpec
    certificate: PSTCertificate
    spectrum: Spectrum

    def __iter__(self):
        return iter((self.chain, self.certificate))


def design(spectrum):
    """Certify, weigh and reconstruct: spectrum to transfer chain.

    Returns a :class:`Design`, which also unpacks as ``(chain, certificate)``.
    """
    if not isinstance(spectrum, Spectrum):
        spectrum = Spectrum(spectrum)
    cert = certify_spectrum(spectrum)
    chain = reconstruct_chain(spectrum, weights_from_spectrum(spectrum))
    return Design(chain=chain, certificate=cert, spectrum=spectrum)


def design_protocol1_odd(half_spectrum):
    """Odd chain of ``2n-1`` sites whose centre excitation spreads to the ends.

    The half chain (size ``n``) designed from ``half_spectrum`` is the
    dynamics of the reflection-symmetric sector; the full chain copies it and
    divides the coupling next to the centre by ``sqrt(2)``.
    """
    half = design(half_spectrum)
    lam_h, om_h = half.chain.lam, half.chain.omega
    n = lam_h.size
    if n < 2:
        raise ValueError("protocol 1 needs a half chain of at least two sites")
    lam = np.concatenate([lam_h, lam_h[-2::-1]])
    om_left = om_h.copy()
    om_left[-1] /= math.sqrt(2.0)
    omega = np.concatenate([om_left, om_left[::-1]])
    return ChainSpec(lam, omega)


def design_protocol1_even(half_spectrum, center_coupling=1.0):
    """Even chain of ``2n`` sites transferring a centre pair to the end pair.

    In the symmetric sector of an even persymmetric chain the last diagonal
    entry is ``lam_n + omega_n``; the free centre coupling ``omega_n`` is a
    parameter and ``lam_n`` absorbs it.
    """
    if not center_coupling > 0.0:
        raise ValueError("centre coupling must be positive")
    half = design(half_spectrum)
    lam_h, om_h = half.chain.lam, half.chain.omega
    lam_left = lam_h.copy()
    lam_left[-1] -= center_coupling
    lam = np.concatenate([lam_left, lam_left[::-1]])
    omega = np.concatenate([om_h, [float(center_coupling)], om_h[::-1]])
    return ChainSpec(lam, omega)
