"""Exact linear algebra over the rationals.

Vectors are sparse mappings ``key -> coefficient``; keys only need to be
mutually comparable (ints, or index tuples of a fixed length, which compare
lexicographically).  Elimination runs on primitive integer rows, so no
``Fraction`` arithmetic happens in the inner loop; results are converted back
to ``Fraction`` only when a canonical form is requested.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Hashable, Iterable, Mapping, Sequence

__all__ = [
    "Echelon",
    "RationalMatrix",
    "Subspace",
    "integral",
    "rank",
    "kernel",
    "rref",
    "express",
]


def integral(vec: Mapping[Hashable, Fraction | int]) -> tuple[dict, int]:
    """Scale ``vec`` to a primitive integer vector.

    Returns ``(ivec, scale)`` with ``ivec == scale * vec`` entrywise.
    """
    den = 1
    for c in vec.values():
        if isinstance(c, Fraction):
            d = c.denominator
            den = den * d // gcd(den, d)
    ivec = {}
    for k, c in vec.items():
        if c:
            ivec[k] = int(c * den)
    g = 0
    for c in ivec.values():
        g = gcd(g, c)
        if g == 1:
            break
    if g > 1:
        for k in ivec:
            ivec[k] //= g
        return ivec, Fraction(den, g)
    return ivec, den


def _content(*dicts: dict) -> int:
    g = 0
    for d in dicts:
        for c in d.values():
            g = gcd(g, c)
            if g == 1:
                return 1
    return g


class Echelon:
    """Incremental row-echelon basis of a subspace of Q^keys.

    With ``track=True`` every stored row remembers which input vectors it is
    a combination of, and every dependent input produces a linear relation
    (collected in :attr:`relations`).
    """

    def __init__(self, track: bool = False):
        self.rows: dict = {}
        self.track = track
        self._combos: dict = {}
        self.relations: list[dict] = []

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def rank(self) -> int:
        return len(self.rows)

    def _reduce(self, v: dict, combo: dict | None) -> None:
        rows = self.rows
        heap = [c for c in v if c in rows]
        heapq.heapify(heap)
        steps = 0
        while heap:
            c = heapq.heappop(heap)
            a = v.get(c)
            if not a:
                continue
            r = rows[c]
            b = r[c]
            g = gcd(a, b)
            a //= g
            b //= g
            if b != 1:
                for k in v:
                    v[k] *= b
                if combo is not None:
                    for k in combo:
                        combo[k] *= b
            for k, x in r.items():
                nv = v.get(k, 0) - a * x
                if nv:
                    if k not in v and k in rows:
                        heapq.heappush(heap, k)
                    v[k] = nv
                else:
                    v.pop(k, None)
            if combo is not None:
                for k, x in self._combos[c].items():
                    nc = combo.get(k, 0) - a * x
                    if nc:
                        combo[k] = nc
                    else:
                        combo.pop(k, None)
            steps += 1
            if steps % 8 == 0 and v:
                g = _content(v, combo) if combo is not None else _content(v)
                if g > 1:
                    for k in v:
                        v[k] //= g
                    if combo is not None:
                        for k in combo:
                            combo[k] //= g

    def add(self, vec: Mapping, tag: Hashable | None = None) -> bool:
        """Insert ``vec``; return True when it enlarged the span."""
        v, scale = integral(vec)
        combo = None
        if self.track:
            s = Fraction(scale)
            # combo entries must stay integral: scale = p/q -> record p, multiply v by q
            if s.denominator != 1:
                for k in v:
                    v[k] *= s.denominator
            combo = {tag: s.numerator}
        self._reduce(v, combo)
        if not v:
            if combo:
                g = _content(combo)
                self.relations.append({k: c // g for k, c in combo.items()})
            return False
        piv = min(v)
        g = _content(v, combo) if combo is not None else _content(v)
        sign = -1 if v[piv] < 0 else 1
        if g > 1 or sign < 0:
            d = g * sign
            v = {k: c // d for k, c in v.items()}
            if combo is not None:
                combo = {k: c // d for k, c in combo.items()}
        self.rows[piv] = v
        if combo is not None:
            self._combos[piv] = combo
        return True

    def contains(self, vec: Mapping) -> bool:
        v, _ = integral(vec)
        self._reduce(v, None)
        return not v

    def pivots(self) -> list:
        return sorted(self.rows)


def rank(vectors: Iterable[Mapping]) -> int:
    ech = Echelon()
    for v in vectors:
        ech.add(v)
    return ech.rank


def _back_substitute(rows: dict) -> list[dict]:
    """Fully reduce integer echelon rows; return Fraction rows with unit pivots."""
    pivs = sorted(rows)
    out: dict = {}
    for p in reversed(pivs):
        r = dict(rows[p])
        for q in [c for c in r if c != p and c in out]:
            a = r.get(q)
            if not a:
                continue
            for k, x in out[q].items():
                nv = r.get(k, 0) - a * x
                if nv:
                    r[k] = nv
                else:
                    r.pop(k, None)
        lead = Fraction(r[p])
        out[p] = {k: Fraction(c) / lead for k, c in r.items()}
    return [out[p] for p in pivs]


def rref(vectors: Iterable[Mapping]) -> list[dict]:
    """Reduced row echelon basis of the span, rows sorted by pivot key."""
    ech = Echelon()
    for v in vectors:
        ech.add(v)
    return _back_substitute(ech.rows)


def kernel(vectors: Sequence[Mapping]) -> list[dict]:
    """Canonical (RREF) basis of ``{c : sum_i c_i * vectors[i] = 0}``.

    Relations are dicts keyed by input position.
    """
    ech = Echelon(track=True)
    for i, v in enumerate(vectors):
        ech.add(v, tag=i)
    return rref(ech.relations)


def express(target: Mapping, vectors: Sequence[Mapping]) -> list[Fraction] | None:
    """Coefficients ``c`` with ``target == sum c_i vectors[i]``, or None.

    When the vectors are dependent the solution with the fewest leading
    nonzero entries (from the canonical relation space) is returned.
    """
    if not any(target.values()):
        return [Fraction(0)] * len(vectors)
    rels = kernel([target, *vectors])
    for rel in rels:
        c0 = rel.get(0, 0)
        if c0:
            return [-Fraction(rel.get(i + 1, 0)) / c0 for i in range(len(vectors))]
    return None


@dataclass(frozen=True)
class RationalMatrix:
    """Dense exact matrix; thin wrapper used for reporting and small solves."""

    rows: tuple[tuple[Fraction, ...], ...]

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable]) -> "RationalMatrix":
        return cls(tuple(tuple(Fraction(x) for x in r) for r in rows))

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), (len(self.rows[0]) if self.rows else 0)

    def _sparse_rows(self) -> list[dict]:
        return [{j: x for j, x in enumerate(r) if x} for r in self.rows]

    def rank(self) -> int:
        return rank(self._sparse_rows())

    def rref(self) -> "RationalMatrix":
        ncols = self.shape[1]
        return RationalMatrix(
            tuple(tuple(r.get(j, Fraction(0)) for j in range(ncols)) for r in rref(self._sparse_rows()))
        )

    def nullspace(self) -> "RationalMatrix":
        """Right kernel: vectors x with self @ x == 0, as RREF rows."""
        nrows, ncols = self.shape
        cols = [{i: self.rows[i][j] for i in range(nrows) if self.rows[i][j]} for j in range(ncols)]
        ker = kernel(cols)
        return RationalMatrix(tuple(tuple(r.get(j, Fraction(0)) for j in range(ncols)) for r in ker))

    def __matmul__(self, other: "RationalMatrix") -> "RationalMatrix":
        n, m = self.shape
        m2, p = other.shape
        if m != m2:
            raise ValueError("shape mismatch")
        cols = list(zip(*other.rows))
        return RationalMatrix(tuple(tuple(sum((a * b for a, b in zip(r, c)), Fraction(0)) for c in cols) for r in self.rows))

    def transpose(self) -> "RationalMatrix":
        return RationalMatrix(tuple(zip(*self.rows)))

    def to_strings(self) -> list[list[str]]:
        return [[str(x) for x in r] for r in self.rows]


def _as_dense(n: int, v) -> tuple[Fraction, ...]:
    """Accept a length-n sequence, a {1-based index: coeff} mapping or a grade-1 multivector."""
    terms = getattr(v, "terms", None)
    if terms is not None:
        if getattr(v, "grade", 1) != 1:
            raise ValueError("expected a grade-1 element")
        out = [Fraction(0)] * n
        for (i,), c in terms.items():
            out[i - 1] = Fraction(c)
        return tuple(out)
    if isinstance(v, Mapping):
        out = [Fraction(0)] * n
        for i, c in v.items():
            out[i - 1] = Fraction(c)
        return tuple(out)
    v = tuple(Fraction(x) for x in v)
    if len(v) != n:
        raise ValueError(f"vector of length {len(v)} in ambient dimension {n}")
    return v


class Subspace:
    """A linear subspace of Q^n held as the RREF of a basis.

    Equality of subspaces is equality of their RREF matrices.  Coordinates
    are 1-based in every public method, matching e_1..e_n.
    """

    __slots__ = ("n", "rows", "_pivots")

    def __init__(self, n: int, vectors: Iterable = ()):
        self.n = n
        sparse = []
        for v in vectors:
            d = _as_dense(n, v)
            sparse.append({j + 1: x for j, x in enumerate(d) if x})
        red = rref(sparse)
        self.rows: tuple[tuple[Fraction, ...], ...] = tuple(
            tuple(r.get(j, Fraction(0)) for j in range(1, n + 1)) for r in red
        )
        self._pivots = tuple(min(r) for r in red)

    @classmethod
    def coordinate(cls, n: int, indices: Iterable[int]) -> "Subspace":
        return cls(n, [{i: 1} for i in indices])

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(n, ())

    @property
    def dim(self) -> int:
        return len(self.rows)

    @property
    def pivots(self) -> tuple[int, ...]:
        """1-based pivot columns of the RREF basis."""
        return self._pivots

    def complement_indices(self) -> tuple[int, ...]:
        """Coordinates e_j spanning the pivot-induced complement."""
        piv = set(self._pivots)
        return tuple(j for j in range(1, self.n + 1) if j not in piv)

    def basis_dicts(self) -> list[dict]:
        return [{j + 1: x for j, x in enumerate(r) if x} for r in self.rows]

    def contains(self, v) -> bool:
        d = _as_dense(self.n, v)
        coords = [d[p - 1] for p in self._pivots]
        recon = [sum((c * r[j] for c, r in zip(coords, self.rows)), Fraction(0)) for j in range(self.n)]
        return tuple(recon) == d

    def coordinates(self, v) -> tuple[Fraction, ...]:
        """Coordinates of ``v`` in the RREF basis; ValueError if v is outside."""
        if not self.contains(v):
            raise ValueError("vector not in subspace")
        d = _as_dense(self.n, v)
        return tuple(d[p - 1] for p in self._pivots)

    def is_subspace_of(self, other: "Subspace") -> bool:
        return all(other.contains(r) for r in self.rows)

    def __add__(self, other: "Subspace") -> "Subspace":
        _check_ambient(self, other)
        return Subspace(self.n, self.rows + other.rows)

    def intersection(self, other: "Subspace") -> "Subspace":
        _check_ambient(self, other)
        a = [{j + 1: x for j, x in enumerate(r) if x} for r in self.rows]
        b = [{j + 1: -x for j, x in enumerate(r) if x} for r in other.rows]
        rels = kernel(a + b)
        vecs = []
        for rel in rels:
            v = [Fraction(0)] * self.n
            for i, c in rel.items():
                if i < len(a):
                    for j, x in enumerate(self.rows[i]):
                        v[j] += c * x
            vecs.append(v)
        return Subspace(self.n, vecs)

    def transform(self, g: Sequence[Sequence]) -> "Subspace":
        """Image under the matrix g (acting on column vectors)."""
        out = []
        for r in self.rows:
            out.append([sum((Fraction(g[i][j]) * r[j] for j in range(self.n)), Fraction(0)) for i in range(self.n)])
        return Subspace(self.n, out)

    def __eq__(self, other) -> bool:
        return isinstance(other, Subspace) and self.n == other.n and self.rows == other.rows

    def __hash__(self) -> int:
        return hash((self.n, self.rows))

    def __repr__(self) -> str:
        body = "; ".join(" ".join(str(x) for x in r) for r in self.rows)
        return f"Subspace(n={self.n}, dim={self.dim}, [{body}])"

    def to_strings(self) -> list[list[str]]:
        return [[str(x) for x in r] for r in self.rows]


def _check_ambient(a: Subspace, b: Subspace) -> None:
    if a.n != b.n:
        from .errors import AmbientMismatch

        raise AmbientMismatch(f"ambient dimensions differ: {a.n} vs {b.n}")
