"""Sparse exterior algebra over Q.

An element of Lambda^d(Q^n) is a :class:`Multivector`: a mapping from
strictly increasing 1-based index tuples to nonzero ``Fraction`` values.
Elements of the dual algebra (coordinates x_i with x_i(e_j) = delta_ij) are
:class:`DualForm` instances with the same layout.
"""
from __future__ import annotations

from bisect import bisect_left
from fractions import Fraction
from itertools import combinations
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

from .errors import AmbientMismatch, GradeMismatch
from .linalg import Echelon, Subspace, kernel

IndexSet = tuple

__all__ = [
    "IndexSet",
    "Multivector",
    "DualForm",
    "merge_sign",
    "wedge",
    "wedge_all",
    "contract",
    "span_rank",
    "map_kernel",
    "psi_kernel",
    "act_matrix",
    "basis_sets",
    "check_index_set",
]


def check_index_set(idx: Sequence[int], n: int) -> tuple:
    idx = tuple(int(i) for i in idx)
    if any(b <= a for a, b in zip(idx, idx[1:])):
        raise ValueError(f"indices must be strictly increasing: {idx}")
    if idx and (idx[0] < 1 or idx[-1] > n):
        raise ValueError(f"indices {idx} out of range 1..{n}")
    return idx


def basis_sets(n: int, d: int) -> list[tuple]:
    """All grade-d index sets in lexicographic order."""
    return list(combinations(range(1, n + 1), d))


def merge_sign(a: Sequence[int], b: Sequence[int]):
    """Sort the concatenation (a, b) of two increasing index sets.

    Returns ``(sign, merged)`` or ``None`` when a and b share an index.
    """
    inv = 0
    for x in a:
        pos = bisect_left(b, x)
        if pos < len(b) and b[pos] == x:
            return None
        inv += pos
    merged = tuple(sorted((*a, *b)))
    return (-1 if inv & 1 else 1), merged


def _sort_sign(seq: Sequence[int]):
    """Sign and sorted tuple of an arbitrary index sequence, None on repeats."""
    seq = list(seq)
    if len(set(seq)) != len(seq):
        return None
    inv = 0
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                inv += 1
    return (-1 if inv & 1 else 1), tuple(sorted(seq))


class Multivector:
    """Immutable sparse element of Lambda^grade(Q^n)."""

    __slots__ = ("n", "grade", "_terms", "_hash")

    def __init__(self, n: int, grade: int, terms: Mapping | Iterable = (), *, _trusted: bool = False):
        if not _trusted and (grade < 0 or grade > n):
            raise GradeMismatch(f"grade {grade} outside 0..{n}")
        self.n = n
        self.grade = grade
        self._hash = None
        if _trusted:
            self._terms = terms
            return
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean: dict = {}
        for idx, c in items:
            key = check_index_set(idx, n)
            if len(key) != grade:
                raise GradeMismatch(f"index set {key} has grade {len(key)}, expected {grade}")
            c = Fraction(c)
            if c:
                clean[key] = clean.get(key, 0) + c
        self._terms = {k: v for k, v in clean.items() if v}

    # constructors -----------------------------------------------------
    @classmethod
    def zero(cls, n: int, grade: int):
        return cls(n, grade, {}, _trusted=True)

    @classmethod
    def scalar(cls, n: int, c=1):
        c = Fraction(c)
        return cls(n, 0, {(): c} if c else {}, _trusted=True)

    @classmethod
    def basis(cls, n: int, indices: Sequence[int], coeff=1):
        idx = check_index_set(indices, n)
        return cls(n, len(idx), {idx: coeff})

    @classmethod
    def vector(cls, n: int, coords: Sequence | Mapping):
        """Grade-1 element from dense coordinates or a {1-based index: coeff} map."""
        if isinstance(coords, Mapping):
            return cls(n, 1, {(i,): c for i, c in coords.items()})
        if len(coords) != n:
            raise AmbientMismatch(f"{len(coords)} coordinates in dimension {n}")
        return cls(n, 1, {(i + 1,): c for i, c in enumerate(coords)})

    def _new(self, n, grade, terms):
        return type(self)(n, grade, terms, _trusted=True)

    # mapping-like access ----------------------------------------------
    @property
    def terms(self) -> Mapping:
        return MappingProxyType(self._terms)

    @property
    def ambient_dim(self) -> int:
        return self.n

    def coefficient(self, indices: Sequence[int]) -> Fraction:
        return self._terms.get(tuple(indices), Fraction(0))

    def support(self) -> list[tuple]:
        return sorted(self._terms)

    def items(self) -> list:
        return sorted(self._terms.items())

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    # arithmetic -------------------------------------------------------
    def _check(self, other):
        if not isinstance(other, Multivector):
            return NotImplemented
        if other.n != self.n:
            raise AmbientMismatch(f"ambient dimensions differ: {self.n} vs {other.n}")
        if other.grade != self.grade:
            raise GradeMismatch(f"grades differ: {self.grade} vs {other.grade}")
        return None

    def __add__(self, other):
        bad = self._check(other)
        if bad is NotImplemented:
            return bad
        out = dict(self._terms)
        for k, c in other._terms.items():
            s = out.get(k, 0) + c
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return self._new(self.n, self.grade, out)

    def __neg__(self):
        return self._new(self.n, self.grade, {k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        bad = self._check(other)
        if bad is NotImplemented:
            return bad
        return self + (-other)

    def scale(self, c) -> "Multivector":
        c = Fraction(c)
        if not c:
            return self._new(self.n, self.grade, {})
        return self._new(self.n, self.grade, {k: v * c for k, v in self._terms.items()})

    def __mul__(self, c):
        if isinstance(c, (int, Fraction)):
            return self.scale(c)
        return NotImplemented

    __rmul__ = __mul__

    def __xor__(self, other):
        return wedge(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Multivector):
            return NotImplemented
        return (
            type(self) is type(other)
            and self.n == other.n
            and self.grade == other.grade
            and self._terms == other._terms
        )

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((type(self).__name__, self.n, self.grade, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self) -> str:
        return f"{type(self).__name__}(n={self.n}, grade={self.grade}, {self.format()})"

    _symbol = "e"

    def format(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for idx, c in self.items():
            mono = f"{self._symbol}_{{{','.join(map(str, idx))}}}" if idx else "1"
            if c == 1:
                s = mono
            elif c == -1:
                s = "-" + mono
            else:
                s = f"{c}*{mono}"
            parts.append(s)
        return " + ".join(parts).replace("+ -", "- ")

    def dense(self) -> tuple[Fraction, ...]:
        """Coordinates of a grade-1 element as a length-n tuple."""
        if self.grade != 1:
            raise GradeMismatch("dense() needs a grade-1 element")
        out = [Fraction(0)] * self.n
        for (i,), c in self._terms.items():
            out[i - 1] = c
        return tuple(out)

    def with_ambient(self, n: int):
        """Same coefficients in a different ambient dimension (indices must fit)."""
        return type(self)(n, self.grade, self._terms)

    def reindex(self, mapping: Mapping[int, int], n: int):
        """Rename indices by ``mapping`` (injective) into ambient dimension n, resorting with signs."""
        out: dict = {}
        for idx, c in self._terms.items():
            r = _sort_sign([mapping[i] for i in idx])
            if r is None:
                continue
            s, key = r
            out[key] = out.get(key, 0) + s * c
        return type(self)(n, self.grade, out)


class DualForm(Multivector):
    """Element of the dual exterior algebra; x_I pairs with e_I."""

    __slots__ = ()
    _symbol = "x"


def _same_family(u: Multivector, v: Multivector):
    if u.n != v.n:
        raise AmbientMismatch(f"ambient dimensions differ: {u.n} vs {v.n}")


def wedge(u: Multivector, v: Multivector) -> Multivector:
    _same_family(u, v)
    g = u.grade + v.grade
    cls = type(u)
    if g > u.n:
        return cls.zero(u.n, g)
    out: dict = {}
    for a, ca in u._terms.items():
        for b, cb in v._terms.items():
            r = merge_sign(a, b)
            if r is None:
                continue
            s, m = r
            val = out.get(m, 0) + (ca * cb if s > 0 else -ca * cb)
            if val:
                out[m] = val
            else:
                out.pop(m, None)
    return cls(u.n, g, out, _trusted=True)


def wedge_all(factors: Sequence[Multivector], n: int | None = None) -> Multivector:
    if not factors:
        if n is None:
            raise ValueError("empty wedge needs the ambient dimension")
        return Multivector.scalar(n, 1)
    out = factors[0]
    for f in factors[1:]:
        out = wedge(out, f)
    return out


def contract(x: Multivector, v: Multivector) -> Multivector:
    """Skew-apolarity action x ⌟ v of a dual form on a multivector.

    On monomials x_J ⌟ e_I = sign * e_{I minus J} when J is a subset of I,
    where sign is the parity of the permutation taking I to (J, I minus J);
    zero otherwise.  Extended bilinearly.
    """
    _same_family(x, v)
    h, k = x.grade, v.grade
    if h > k:
        return Multivector.zero(v.n, k - h)
    out: dict = {}
    for J, cx in x._terms.items():
        js = set(J)
        for I, cv in v._terms.items():
            if not js.issubset(I):
                continue
            rest = tuple(i for i in I if i not in js)
            s, _ = merge_sign(J, rest)
            val = out.get(rest, 0) + (cx * cv if s > 0 else -cx * cv)
            if val:
                out[rest] = val
            else:
                out.pop(rest, None)
    return Multivector(v.n, k - h, out, _trusted=True)


def span_rank(vectors: Sequence[Multivector]) -> tuple[int, list[dict]]:
    """Rank of a list of same-grade multivectors and a canonical basis of their relations.

    Relations are dicts ``{position: coefficient}`` in RREF.
    """
    if not vectors:
        raise ValueError("span_rank needs at least one vector")
    n, g = vectors[0].n, vectors[0].grade
    for v in vectors:
        if v.n != n:
            raise AmbientMismatch("mixed ambient dimensions")
        if v.grade != g:
            raise GradeMismatch("mixed grades")
    ker = kernel([v._terms for v in vectors])
    return len(vectors) - len(ker), ker


def span_dim(vectors: Iterable[Multivector]) -> int:
    """Rank only (no relation tracking)."""
    ech = Echelon()
    for v in vectors:
        ech.add(v._terms)
    return ech.rank


def map_kernel(images: Sequence[Multivector]) -> Subspace:
    """Kernel of the linear map Q^m -> Lambda sending e_i to images[i-1]."""
    m = len(images)
    ker = kernel([v._terms for v in images])
    return Subspace(m, [{i + 1: c for i, c in rel.items()} for rel in ker])


def psi_kernel(t: Multivector) -> Subspace:
    """H_t: the vectors x with x ∧ t = 0."""
    n = t.n
    if t.grade >= n:
        return Subspace.coordinate(n, range(1, n + 1))
    images = [wedge(Multivector.basis(n, (i,)), t) for i in range(1, n + 1)]
    return map_kernel(images)


def act_matrix(g: Sequence[Sequence], v: Multivector) -> Multivector:
    """Action of an n x n matrix: e_j -> sum_i g[i][j] e_i, extended to wedges."""
    n = v.n
    cols = []
    for j in range(n):
        cols.append({(i + 1,): Fraction(g[i][j]) for i in range(n) if g[i][j]})
    cache: dict = {}
    out: dict = {}
    for idx, c in v._terms.items():
        acc = {(): Fraction(1)}
        for pos, j in enumerate(idx):
            key = idx[: pos + 1]
            if key in cache:
                acc = cache[key]
                continue
            nxt: dict = {}
            for a, ca in acc.items():
                for (i,), cb in cols[j - 1].items():
                    r = merge_sign(a, (i,))
                    if r is None:
                        continue
                    s, m = r
                    val = nxt.get(m, 0) + s * ca * cb
                    if val:
                        nxt[m] = val
                    else:
                        nxt.pop(m, None)
            acc = nxt
            cache[key] = acc
        for m, cm in acc.items():
            val = out.get(m, 0) + c * cm
            if val:
                out[m] = val
            else:
                out.pop(m, None)
    return type(v)(n, v.grade, out, _trusted=True)
