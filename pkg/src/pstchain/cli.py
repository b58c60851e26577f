"""Command-line front end.

Exit codes: 0 success, 2 domain rejection, 3 numerical failure, 64 usage.
Reports go to stdout as JSON (floats in shortest round-trip form); sweeps
are written as CSV.
"""
import argparse
import ast
import csv
import io
import json
import math
import operator
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__, chainfile
from .design import Spectrum, certify_spectrum, design, design_protocol1_even, design_protocol1_odd
from .dynamics import WellPacket, amplitude_series, effective_gate, well_mirror_revival
from .entanglement import (
    PureTwoQubitState,
    concurrence,
    halfchain_matrix,
    run_protocol1,
    run_protocol1_even,
    run_protocol2,
    schmidt_coefficients,
)
from .errors import (
    CertificationIndeterminate,
    DomainError,
    NumericalError,
    SpectrumRejected,
    TruncationError,
)
from .jacobi import eigenvalues

EXIT_OK = 0
EXIT_DOMAIN = 2
EXIT_NUMERIC = 3
EXIT_USAGE = 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


_OPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
}


def parse_real(text):
    """Float from a literal or simple expression in ``pi`` (``pi/2``, ``3*pi``)."""
    def ev(node):
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.left), ev(node.right))
        raise UsageError(f"cannot parse number {text!r}")

    try:
        value = ev(ast.parse(text.strip(), mode="eval").body)
    except (SyntaxError, ZeroDivisionError) as exc:
        raise UsageError(f"cannot parse number {text!r}") from exc
    if not math.isfinite(value):
        raise UsageError(f"number {text!r} is not finite")
    return value


def parse_spectrum(text):
    """Comma-separated values; integers and ``p/q`` are exact, decimals are floats.

    The spectrum is exact only if every entry is.
    """
    items = [t.strip() for t in text.split(",") if t.strip()]
    if not items:
        raise UsageError("empty spectrum")
    vals = []
    for tok in items:
        try:
            if "/" in tok or tok.lstrip("+-").isdigit():
                vals.append(Fraction(tok))
            else:
                vals.append(parse_real(tok))
        except (ValueError, ZeroDivisionError) as exc:
            raise UsageError(f"malformed spectrum entry {tok!r}") from exc
    if all(isinstance(v, Fraction) for v in vals):
        return Spectrum(vals, exact=True)
    return Spectrum([float(v) for v in vals], exact=False)


def parse_complex_list(text, size):
    try:
        vals = [complex(t.strip().replace(" ", "")) for t in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"malformed complex list {text!r}") from exc
    if len(vals) != size:
        raise UsageError(f"expected {size} values, got {len(vals)}")
    return vals


def _cplx(z):
    z = complex(z)
    return [z.real, z.imag]


def _matrix(m):
    return [[_cplx(v) for v in row] for row in np.asarray(m)]


def _emit(doc, stream=None):
    stream = stream or sys.stdout
    stream.write(json.dumps(doc, indent=2, allow_nan=False) + "\n")


def _certificate_doc(cert):
    doc = {
        "certified": True,
        "tau": cert.tau,
        "phi": cert.phi,
        "delta": cert.delta,
        "odd_multipliers": list(cert.odd_multipliers),
        "exact": cert.exact,
    }
    if cert.exact:
        doc["delta_exact"] = str(cert.delta_exact)
        doc["phi_over_pi"] = str(cert.phi_over_pi)
    return doc


def _load_chain(path):
    try:
        return chainfile.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read chain file {path}: {exc}") from exc


def _chain_certificate(chain, meta):
    """Certificate from file metadata, or recomputed from the chain's spectrum."""
    if "spectrum" in meta:
        vals = meta["spectrum"]
        exact = all(isinstance(v, (int, Fraction)) for v in vals)
        return certify_spectrum(Spectrum(vals, exact=exact))
    return certify_spectrum(Spectrum(eigenvalues(chain).tolist()))


def _check_site(site, n):
    if not 1 <= site <= n:
        raise UsageError(f"site {site} outside 1..{n}")


def cmd_check(args):
    spectrum = parse_spectrum(args.spectrum)
    try:
        cert = certify_spectrum(spectrum)
    except SpectrumRejected as exc:
        _emit({
            "certified": False,
            "reason": exc.reason,
            "offending_gap_index": exc.gap_index,
            "quotient": exc.quotient,
        })
        return EXIT_DOMAIN
    except CertificationIndeterminate as exc:
        _emit({"certified": False, "reason": str(exc), "indeterminate": True})
        return EXIT_NUMERIC
    _emit(_certificate_doc(cert))
    return EXIT_OK


def cmd_design(args):
    spectrum = parse_spectrum(args.spectrum)
    chain, cert = design(spectrum)
    computed = eigenvalues(chain)
    target = spectrum.as_array()
    scale = max(float(np.max(np.abs(target))), 1e-300)
    err = float(np.max(np.abs(computed - target))) / scale
    doc = chainfile.chain_to_dict(
        chain, spectrum=spectrum.values, tau=cert.tau, phi=cert.phi,
        generator=f"pstchain {__version__}",
    )
    Path(args.out).write_text(chainfile.dumps(doc), encoding="utf-8", newline="\n")
    sys.stderr.write(f"round-trip max relative eigenvalue error: {err!r}\n")
    _emit({"out": str(args.out), "n": chain.n, "max_relative_eigenvalue_error": err,
           **_certificate_doc(cert)})
    return EXIT_OK


def cmd_fidelity(args):
    chain, _ = _load_chain(args.chain)
    _check_site(args.source, chain.n)
    _check_site(args.target, chain.n)
    if args.steps < 2:
        raise UsageError("--steps must be at least 2")
    t_max = parse_real(args.t_max)
    times = np.array([i * t_max / (args.steps - 1) for i in range(args.steps)])
    amps = amplitude_series(chain, args.source, args.target, times)
    buf = io.StringIO(newline="")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["t", "magnitude", "phase"])
    for t, f in zip(times, amps):
        writer.writerow([repr(float(t)), repr(float(abs(f))), repr(math.atan2(f.imag, f.real))])
    if args.csv_out:
        Path(args.csv_out).write_text(buf.getvalue(), encoding="utf-8", newline="")
    else:
        sys.stdout.write(buf.getvalue())
    return EXIT_OK


def cmd_gate(args):
    chain, meta = _load_chain(args.chain)
    _check_site(args.site, chain.n)
    cert = _chain_certificate(chain, meta)
    gate = effective_gate(chain, cert, args.site, args.statistics)
    _emit({
        "site": args.site,
        "statistics": args.statistics,
        "tau": cert.tau,
        "phi": cert.phi,
        "basis": ["00", "10", "01", "11"],
        "analytic": _matrix(gate.m),
        "numeric": _matrix(gate.numeric),
        "max_deviation": gate.deviation,
    })
    return EXIT_OK


def _state_doc(s):
    return {"a": _cplx(s.a), "b": _cplx(s.b), "c": _cplx(s.c), "d": _cplx(s.d)}


def _protocol1(args, even):
    if args.chain:
        chain, _ = _load_chain(args.chain)
        if (chain.n % 2 == 0) != even:
            raise UsageError(
                f"{'p1-even' if even else 'p1-odd'} needs an {'even' if even else 'odd'} "
                f"chain, file has n={chain.n}"
            )
        half = halfchain_matrix(chain)
        tau = certify_spectrum(Spectrum(eigenvalues(half).tolist())).tau
    elif args.half_spectrum:
        half_spec = parse_spectrum(args.half_spectrum)
        if even:
            chain = design_protocol1_even(half_spec, args.center_coupling)
        else:
            chain = design_protocol1_odd(half_spec)
        tau = certify_spectrum(half_spec).tau
    else:
        raise UsageError("protocol 1 needs --half-spectrum or --chain")
    if args.steps < 2:
        raise UsageError("--steps must be at least 2")
    run = run_protocol1_even if even else run_protocol1
    trajectory = []
    for i in range(args.steps):
        t = i * tau / (args.steps - 1)
        r = run(chain, t)
        trajectory.append({"t": t, "concurrence": r.concurrence, "pair_weight": r.pair_weight})
    final = run(chain, tau)
    _emit({
        "variant": "p1-even" if even else "p1-odd",
        "n": chain.n,
        "lambda": chain.lam.tolist(),
        "omega": chain.omega.tolist(),
        "tau": tau,
        "trajectory": trajectory,
        "final": {
            "concurrence": final.concurrence,
            "pair_weight": final.pair_weight,
            "pair_state": _state_doc(final.pair_state),
            "amplitudes": [_cplx(v) for v in final.amplitudes],
        },
    })
    return EXIT_OK


def cmd_protocol(args):
    if args.variant in ("p1-odd", "p1-even"):
        return _protocol1(args, even=args.variant == "p1-even")
    if not args.chain:
        raise UsageError("p2 needs --chain")
    chain, meta = _load_chain(args.chain)
    _check_site(args.site, chain.n)
    if args.state == "plus-plus":
        s = PureTwoQubitState.plus_plus()
    else:
        try:
            s = PureTwoQubitState(*parse_complex_list(args.state, 4))
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    cert = _chain_certificate(chain, meta)
    before = concurrence(s)
    out, after = run_protocol2(chain, cert, args.site, args.statistics, s)
    _emit({
        "variant": "p2",
        "site": args.site,
        "statistics": args.statistics,
        "phi": cert.phi,
        "concurrence_before": before,
        "concurrence_after": after,
        "schmidt": list(schmidt_coefficients(out)),
        "input_state": _state_doc(s),
        "output_state": _state_doc(out),
    })
    return EXIT_OK


def cmd_revival(args):
    if args.coefficients:
        coefs = parse_complex_list(args.coefficients, len(args.coefficients.split(",")))
        try:
            packet = WellPacket(coefs, args.length)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    else:
        if args.modes < 2:
            raise UsageError("--modes must be at least 2")
        packet = WellPacket.gaussian(
            args.x0 * args.length, args.sigma * args.length, args.modes, args.length, args.k0
        )
    try:
        res = well_mirror_revival(packet, args.samples)
    except TruncationError as exc:
        _emit({"error": "truncation", "tail": exc.tail, "modes": packet.modes})
        return EXIT_NUMERIC
    _emit({
        "modes": packet.modes,
        "length": packet.length,
        "tail": packet.tail,
        "mirror_time": res.mirror_time,
        "max_deviation": res.max_deviation,
        "relative_deviation": res.relative_deviation,
    })
    return EXIT_OK


def build_parser():
    p = _Parser(prog="pstchain", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"pstchain {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("check", help="certify a spectrum for perfect mirror transfer")
    c.add_argument("--spectrum", required=True, help="comma-separated; p/q for exact")
    c.set_defaults(func=cmd_check)

    d = sub.add_parser("design", help="build the persymmetric chain for a spectrum")
    d.add_argument("--spectrum", required=True)
    d.add_argument("--out", required=True, help="chain file to write")
    d.set_defaults(func=cmd_design)

    f = sub.add_parser("fidelity", help="transfer amplitude sweep as CSV")
    f.add_argument("--chain", required=True)
    f.add_argument("--from", dest="source", type=int, required=True)
    f.add_argument("--to", dest="target", type=int, required=True)
    f.add_argument("--t-max", required=True, help="e.g. 3.14159 or pi")
    f.add_argument("--steps", type=int, default=101)
    f.add_argument("--csv-out")
    f.set_defaults(func=cmd_fidelity)

    g = sub.add_parser("gate", help="effective two-qubit gate of a mirror pair")
    g.add_argument("--chain", required=True)
    g.add_argument("--site", type=int, required=True)
    g.add_argument("--statistics", choices=["fermion", "boson"], required=True)
    g.set_defaults(func=cmd_gate)

    r = sub.add_parser("protocol", help="entanglement generation protocols")
    r.add_argument("variant", choices=["p1-odd", "p1-even", "p2"])
    r.add_argument("--half-spectrum")
    r.add_argument("--chain")
    r.add_argument("--center-coupling", type=float, default=1.0)
    r.add_argument("--steps", type=int, default=51)
    r.add_argument("--site", type=int, default=1)
    r.add_argument("--statistics", choices=["fermion", "boson"], default="fermion")
    r.add_argument("--state", default="plus-plus", help="'plus-plus' or a,b,c,d")
    r.set_defaults(func=cmd_protocol)

    v = sub.add_parser("revival", help="square-well mirror revival check")
    v.add_argument("--modes", type=int, default=64)
    v.add_argument("--x0", type=float, default=0.25, help="centre, in units of L")
    v.add_argument("--sigma", type=float, default=0.05, help="width, in units of L")
    v.add_argument("--k0", type=float, default=0.0)
    v.add_argument("--length", type=float, default=1.0)
    v.add_argument("--samples", type=int, default=2001)
    v.add_argument("--coefficients", help="explicit mode coefficients c1,c2,...")
    v.set_defaults(func=cmd_revival)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"pstchain: error: {exc}\n")
        return EXIT_USAGE
    except DomainError as exc:
        sys.stderr.write(f"pstchain: rejected: {exc}\n")
        return EXIT_DOMAIN
    except NumericalError as exc:
        sys.stderr.write(f"pstchain: numerical failure: {exc}\n")
        return EXIT_NUMERIC
    except ValueError as exc:
        sys.stderr.write(f"pstchain: error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
