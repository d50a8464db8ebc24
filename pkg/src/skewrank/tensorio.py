"""Tensor files and report files.

A tensor file is JSON::

    {"n": 7, "k": 3, "terms": [{"coeff": "1", "indices": [1, 2, 3]}, ...]}

Coefficients are strings ("p/q" or an integer) so no float ever touches a
coefficient.  Indices are 1-based and strictly increasing.
"""
from __future__ import annotations

import hashlib
import json
import re
from fractions import Fraction
from typing import Any

from .errors import InvariantError, SkewRankError
from .exterior import Multivector
from .linalg import Subspace

__all__ = [
    "ParseError",
    "parse_tensor",
    "load_tensor",
    "tensor_to_dict",
    "dump_tensor",
    "parse_rational",
    "format_rational",
    "digest",
    "dump_report",
    "subspace_payload",
]


class ParseError(SkewRankError):
    exit_code = 2


_RATIONAL = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$")


def parse_rational(s: Any) -> Fraction:
    if isinstance(s, bool) or not isinstance(s, (str, int)):
        raise ParseError(f"coefficient must be a string like '3' or '-2/5', got {s!r}")
    m = _RATIONAL.match(str(s))
    if not m:
        raise ParseError(f"malformed rational {s!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ParseError(f"zero denominator in {s!r}")
    return Fraction(num, den)


def format_rational(c: Fraction) -> str:
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _int_field(doc: dict, key: str) -> int:
    v = doc.get(key)
    if isinstance(v, bool) or not isinstance(v, int):
        raise ParseError(f"field {key!r} must be an integer")
    return v


def parse_tensor(text: str) -> Multivector:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ParseError("tensor file must be a JSON object")
    n, k = _int_field(doc, "n"), _int_field(doc, "k")
    terms = doc.get("terms")
    if not isinstance(terms, list):
        raise ParseError("field 'terms' must be a list")
    if n < 1 or k < 1 or k > n:
        raise InvariantError(f"need 1 <= k <= n, got n={n}, k={k}")
    if not terms:
        raise InvariantError("a tensor file needs at least one term")
    out: dict = {}
    for pos, term in enumerate(terms):
        if not isinstance(term, dict) or "coeff" not in term or "indices" not in term:
            raise ParseError(f"term {pos} must have 'coeff' and 'indices'")
        idx = term["indices"]
        if not isinstance(idx, list) or any(isinstance(i, bool) or not isinstance(i, int) for i in idx):
            raise ParseError(f"term {pos}: indices must be a list of integers")
        c = parse_rational(term["coeff"])
        key = tuple(idx)
        if len(key) != k:
            raise InvariantError(f"term {pos}: {len(key)} indices for grade {k}")
        if any(b <= a for a, b in zip(key, key[1:])):
            raise InvariantError(f"term {pos}: indices {list(key)} are not strictly increasing")
        if key[0] < 1 or key[-1] > n:
            raise InvariantError(f"term {pos}: indices {list(key)} outside 1..{n}")
        if key in out:
            raise InvariantError(f"term {pos}: duplicate index set {list(key)}")
        if c == 0:
            raise InvariantError(f"term {pos}: zero coefficient")
        out[key] = c
    return Multivector(n, k, out)


def load_tensor(path: str) -> Multivector:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    return parse_tensor(text)


def tensor_to_dict(t: Multivector) -> dict:
    return {
        "n": t.n,
        "k": t.grade,
        "terms": [{"coeff": format_rational(c), "indices": list(idx)} for idx, c in t.items()],
    }


def dump_tensor(t: Multivector) -> str:
    return json.dumps(tensor_to_dict(t), indent=2, sort_keys=True) + "\n"


def digest(*tensors: Multivector) -> str:
    h = hashlib.sha256()
    for t in tensors:
        h.update(json.dumps(tensor_to_dict(t), sort_keys=True, separators=(",", ":")).encode())
    return "sha256:" + h.hexdigest()


def subspace_payload(s: Subspace) -> list[list[str]]:
    return [[format_rational(x) for x in row] for row in s.rows]


def dump_report(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"
