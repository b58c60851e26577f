"""Canonical JSON chain files.

Keys are written in a fixed order and floats as their shortest round-trip
decimal (``repr``), so parse followed by serialize reproduces the bytes.
Exact rational spectra in the metadata are stored as ``"p/q"`` strings, and
integers as JSON integers.
"""
import json
from fractions import Fraction

from .jacobi import ChainSpec

VERSION = 1


def _number(v):
    if isinstance(v, Fraction):
        return int(v) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return v


def _parse_number(v):
    if isinstance(v, str):
        return Fraction(v)
    if isinstance(v, int) and not isinstance(v, bool):
        return v
    return float(v)


def chain_to_dict(chain, spectrum=None, tau=None, phi=None, generator=None):
    doc = {
        "version": VERSION,
        "n": chain.n,
        "lambda": [float(v) for v in chain.lam],
        "omega": [float(v) for v in chain.omega],
    }
    meta = {}
    if spectrum is not None:
        meta["spectrum"] = [_number(v) for v in spectrum]
    if tau is not None:
        meta["tau"] = float(tau)
    if phi is not None:
        meta["phi"] = float(phi)
    if generator is not None:
        meta["generator"] = generator
    if meta:
        doc["metadata"] = meta
    return doc


def dumps(doc):
    return json.dumps(doc, indent=2, ensure_ascii=True, allow_nan=False) + "\n"


def loads(text):
    """Parse and validate a chain file; returns ``(chain, metadata)``.

    Metadata spectrum values come back as ``Fraction``/``int`` for exact
    entries and ``float`` otherwise.
    """
    doc = json.loads(text)
    if not isinstance(doc, dict) or doc.get("version") != VERSION:
        raise ValueError(f"unsupported chain file version {doc.get('version')!r}")
    n = doc.get("n")
    lam = doc.get("lambda")
    omega = doc.get("omega")
    if not isinstance(n, int) or not isinstance(lam, list) or not isinstance(omega, list):
        raise ValueError("chain file needs integer 'n' and arrays 'lambda', 'omega'")
    if len(lam) != n or len(omega) != n - 1:
        raise ValueError(f"array lengths {len(lam)}, {len(omega)} do not match n={n}")
    chain = ChainSpec(lam, omega)
    meta = dict(doc.get("metadata", {}))
    if "spectrum" in meta:
        meta["spectrum"] = [_parse_number(v) for v in meta["spectrum"]]
    return chain, meta


def canonicalize(text):
    """Re-serialize a chain file document without altering its content."""
    return dumps(json.loads(text))
