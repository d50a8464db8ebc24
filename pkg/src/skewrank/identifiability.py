"""Recovering the Grassmannian points behind a point of the secant variety.

Everything here is reconstruct-and-verify: each returned witness is checked
by exact re-synthesis of the input tensor, so a successful return is a
certificate regardless of how the witness was found.

Outline for a grade-k tensor t with l = k - dim H_t >= 3:

1. factor t = h ^ t' where h spans H_t and t' lives on the coordinate
   complement W of H_t;
2. U = span of all contractions of t' by (l-1)-forms, the smallest space
   with t' in Lambda^l U; inside the secant variety dim U = 2l;
3. g = {X in gl(U) : X.t' = 0}, the stabilizer Lie algebra.  For a ^ b with
   transverse factors g = sl(A) + sl(B), whose trace form is nondegenerate;
   at a tangent point g has a nilpotent ideal, which shows up as the radical
   of the trace form, and its image is the tangency space;
4. secant: the centralizer of g in gl(U) is spanned by the two block
   idempotents; its eigenspaces are the two factor spaces.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import isqrt
from typing import Sequence

from .errors import (
    GradeMismatch,
    IrrationalSplit,
    NotSecant,
    NotTangent,
    ShapeMismatch,
    SplitFailed,
    WrongStratum,
    ZeroTensor,
)
from .exterior import DualForm, Multivector, contract, map_kernel, merge_sign, psi_kernel, wedge, wedge_all
from .grassmann import (
    GlGenerator,
    GrassPoint,
    gl_act,
    pluecker_embed,
    subspace_vectors,
    tangent_span_pair,
    tangent_space_basis,
)
from .linalg import Echelon, Subspace, express, kernel, rref

__all__ = [
    "Reduction",
    "reduce_tensor",
    "support_space",
    "SecantDecomposition",
    "TangentialLocusReport",
    "decompose_secant",
    "unident_family",
    "tangential_locus",
    "terracini_pair",
    "darboux",
    "skew_rank",
    "lie_structure",
    "wedge2_kernel",
]


# ------------------------------------------------------------------ reduction


@dataclass(frozen=True)
class Reduction:
    """t = head ^ lift(reduced), with reduced of grade l on the complement W."""

    tensor: Multivector
    kernel: Subspace
    complement: tuple[int, ...]
    head: Multivector
    reduced: Multivector

    @property
    def l(self) -> int:
        return self.reduced.grade

    @property
    def m(self) -> int:
        return self.kernel.dim

    def lift(self, u: Multivector) -> Multivector:
        """Element on W (ambient len(W)) -> element of V."""
        return u.reindex({i + 1: w for i, w in enumerate(self.complement)}, self.tensor.n)

    def lift_rows(self, rows: Sequence[Sequence[Fraction]]) -> list[list[Fraction]]:
        n = self.tensor.n
        out = []
        for r in rows:
            v = [Fraction(0)] * n
            for i, w in enumerate(self.complement):
                v[w - 1] = Fraction(r[i])
            out.append(v)
        return out

    def attach(self, rows: Sequence[Sequence[Fraction]]) -> Subspace:
        """H_t + (subspace of W given by rows in W coordinates)."""
        return Subspace(self.tensor.n, list(self.kernel.rows) + self.lift_rows(rows))


def _check_tensor(t: Multivector) -> None:
    if not isinstance(t, Multivector) or type(t) is DualForm:
        raise GradeMismatch("expected a multivector")
    if not t:
        raise ZeroTensor("the zero tensor has no stratum")
    if t.grade < 1:
        raise GradeMismatch("grade must be at least 1")


@lru_cache(maxsize=256)
def reduce_tensor(t: Multivector) -> Reduction:
    """Factor out the common kernel H_t on the pivot-induced coordinate complement."""
    _check_tensor(t)
    n, k = t.n, t.grade
    h_space = psi_kernel(t)
    m = h_space.dim
    piv = h_space.pivots
    comp = h_space.complement_indices()
    head = wedge_all(subspace_vectors(h_space), n) if m else Multivector.scalar(n, 1)
    pos = {w: i + 1 for i, w in enumerate(comp)}
    red: dict = {}
    for idx, c in t.terms.items():
        if not set(piv).issubset(idx):
            continue
        J = tuple(i for i in idx if i not in piv)
        s, _ = merge_sign(piv, J)
        red[tuple(pos[j] for j in J)] = s * c
    reduced = Multivector(len(comp), k - m, red)
    out = Reduction(t, h_space, comp, head, reduced)
    if wedge(head, out.lift(reduced)) != t:
        from .errors import VerificationFailure

        raise VerificationFailure("common-kernel factorization did not reproduce the tensor")
    return out


def wedge2_kernel(t: Multivector) -> list[Multivector]:
    """Basis of K2 = ker(beta -> beta ^ t') on Lambda^2 W for the reduced tensor t'.

    Both branches give the same dimension (l^2 for l >= 3), so this is a
    diagnostic only; branch decisions use the stabilizer algebra.
    """
    red = reduce_tensor(t).reduced
    m = red.n
    pairs = list(combinations(range(1, m + 1), 2))
    ker = map_kernel([wedge(Multivector.basis(m, ij), red) for ij in pairs])
    return [Multivector(m, 2, {pairs[i - 1]: c for i, c in enumerate(row, 1) if c}) for row in ker.rows]


def support_space(t: Multivector) -> Subspace:
    """Smallest U with t in Lambda^grade U: the span of all (grade-1)-contractions."""
    n, d = t.n, t.grade
    if d == 0:
        return Subspace.zero(n)
    vecs = []
    seen = set()
    for idx in t.terms:
        for drop in range(d):
            J = idx[:drop] + idx[drop + 1:]
            if J in seen:
                continue
            seen.add(J)
            vecs.append(contract(DualForm.basis(n, J), t).terms)
    rows = rref(vecs)
    return Subspace(n, [{i: c for (i,), c in r.items()} for r in rows])


def restrict(t: Multivector, u: Subspace) -> Multivector:
    """Coordinates of t in Lambda^d U w.r.t. the RREF basis of U (verified)."""
    piv = u.pivots
    pos = {p: i + 1 for i, p in enumerate(piv)}
    out = {}
    for idx, c in t.terms.items():
        if all(i in pos for i in idx):
            out[tuple(pos[i] for i in idx)] = c
    small = Multivector(u.dim, t.grade, out)
    if _expand(small, u) != t:
        raise SplitFailed("tensor does not live on its support space")
    return small


def _expand(small: Multivector, u: Subspace) -> Multivector:
    rows = subspace_vectors(u)
    acc = Multivector.zero(u.n, small.grade)
    for idx, c in small.terms.items():
        acc = acc + wedge_all([rows[i - 1] for i in idx], u.n).scale(c)
    return acc


# ------------------------------------------------------------------ 2-forms


def skew_matrix(t: Multivector) -> list[list[Fraction]]:
    n = t.n
    m = [[Fraction(0)] * n for _ in range(n)]
    for (i, j), c in t.terms.items():
        m[i - 1][j - 1] = c
        m[j - 1][i - 1] = -c
    return m


def skew_rank(t: Multivector) -> int:
    if t.grade != 2:
        raise GradeMismatch("skew rank is defined for 2-forms")
    return Subspace(t.n, skew_matrix(t)).dim


def darboux(t: Multivector) -> list[tuple[Multivector, Multivector]]:
    """Pairs (a_i, b_i) of vectors with t = sum a_i ^ b_i, found by symplectic reduction."""
    if t.grade != 2:
        raise GradeMismatch("Darboux decomposition needs a 2-form")
    n = t.n
    rest = t
    pairs = []
    while rest:
        (i, j), c = min(rest.terms.items())
        ui = contract(DualForm.basis(n, (i,)), rest)
        uj = contract(DualForm.basis(n, (j,)), rest)
        # rest(x_i, x_j) = c, so a = -uj / c, b = ui gives a ^ b agreeing with rest on <x_i, x_j>
        a = uj.scale(Fraction(-1) / c)
        b = ui
        pairs.append((a, b))
        rest = rest - wedge(a, b)
        if len(pairs) > n:
            raise SplitFailed("symplectic reduction did not terminate")
    return pairs


# ------------------------------------------------------------------ Lie data


def _mat_apply(x: Sequence[Sequence[Fraction]], v: Sequence[Fraction]) -> list[Fraction]:
    return [sum((a * b for a, b in zip(row, v)), Fraction(0)) for row in x]


def _mat_mul(a, b):
    n = len(a)
    return [[sum((a[i][r] * b[r][j] for r in range(n)), Fraction(0)) for j in range(n)] for i in range(n)]


def _trace(a) -> Fraction:
    return sum((a[i][i] for i in range(len(a))), Fraction(0))


def _derive(x, t: Multivector) -> Multivector:
    """Derivation action of the matrix x on t."""
    acc = Multivector.zero(t.n, t.grade)
    for r in range(t.n):
        for c in range(t.n):
            if x[r][c]:
                acc = acc + gl_act(GlGenerator(r + 1, c + 1), t).scale(x[r][c])
    return acc


def _rel_to_matrix(rel: dict, n: int):
    x = [[Fraction(0)] * n for _ in range(n)]
    for pos, c in rel.items():
        x[pos // n][pos % n] = Fraction(c)
    return x


@dataclass
class LieStructure:
    """Stabilizer data of a grade-l tensor on its 2l-dimensional support."""

    n: int
    algebra: list  # basis matrices of the stabilizer
    radical: list  # basis matrices of the trace-form radical


def lie_structure(t: Multivector) -> LieStructure:
    n = t.n
    gens = [gl_act(GlGenerator(r, c), t) for r in range(1, n + 1) for c in range(1, n + 1)]
    alg = [_rel_to_matrix(rel, n) for rel in kernel([g.terms for g in gens])]
    # Gram matrix of the trace form tr(AB) = sum A_ij B_ji on the stabilizer
    sparse = [{(i, j): x[i][j] for i in range(n) for j in range(n) if x[i][j]} for x in alg]
    prods = [
        [sum((c * b.get((j, i), 0) for (i, j), c in a.items()), Fraction(0)) for b in sparse]
        for a in sparse
    ]
    cols = [{i: prods[i][j] for i in range(len(alg)) if prods[i][j]} for j in range(len(alg))]
    rad = []
    for rel in kernel(cols):
        x = [[Fraction(0)] * n for _ in range(n)]
        for j, c in rel.items():
            for r in range(n):
                for s in range(n):
                    x[r][s] += c * alg[j][r][s]
        rad.append(x)
    return LieStructure(n, alg, rad)


def _centralizer(alg: list, n: int) -> list:
    images = []
    for r in range(n):
        for c in range(n):
            img = {}
            for xi, x in enumerate(alg):
                # (E_rc X - X E_rc)
                for b in range(n):
                    if x[c][b]:
                        img[(xi, r, b)] = img.get((xi, r, b), 0) + x[c][b]
                for a in range(n):
                    if x[a][r]:
                        img[(xi, a, c)] = img.get((xi, a, c), 0) - x[a][r]
            images.append({k: v for k, v in img.items() if v})
    return [_rel_to_matrix(rel, n) for rel in kernel(images)]


def _rational_sqrt(q: Fraction) -> Fraction | None:
    if q < 0:
        return None
    a, b = isqrt(q.numerator), isqrt(q.denominator)
    if a * a == q.numerator and b * b == q.denominator:
        return Fraction(a, b)
    return None


def _eigenspace(z, lam: Fraction) -> Subspace:
    n = len(z)
    shifted = [[z[i][j] - (lam if i == j else 0) for j in range(n)] for i in range(n)]
    cols = [{i: shifted[i][j] for i in range(n) if shifted[i][j]} for j in range(n)]
    return Subspace(n, [[rel.get(j, Fraction(0)) for j in range(n)] for rel in kernel(cols)])


# ------------------------------------------------------------------ reports


@dataclass(frozen=True)
class SecantDecomposition:
    """t = coefficients[0] * pluecker(p) + coefficients[1] * pluecker(q)."""

    p: GrassPoint
    q: GrassPoint
    unique: bool
    coefficients: tuple[Fraction, Fraction] = (Fraction(1), Fraction(1))

    def reconstruct(self) -> Multivector:
        return self.p.pluecker.scale(self.coefficients[0]) + self.q.pluecker.scale(self.coefficients[1])

    def spaces(self) -> frozenset:
        return frozenset((self.p.space, self.q.space))


@dataclass(frozen=True)
class TangentialLocusReport:
    points: tuple[GrassPoint, ...]
    dimension_hint: int
    unique: bool


def _ordered_pair(t: Multivector, a: Subspace, b: Subspace, unique: bool) -> SecantDecomposition:
    p, q = pluecker_embed(a), pluecker_embed(b)
    if q.sort_key() < p.sort_key():
        p, q = q, p
    coeffs = express(t.terms, [p.pluecker.terms, q.pluecker.terms])
    if coeffs is None or not coeffs[0] or not coeffs[1]:
        raise NotSecant("candidate factor spaces do not reproduce the tensor")
    dec = SecantDecomposition(p, q, unique, (coeffs[0], coeffs[1]))
    if dec.reconstruct() != t:
        raise NotSecant("reconstruction mismatch")
    return dec


def _in_tangent(t: Multivector, p: GrassPoint) -> bool:
    ech = Echelon()
    for v in tangent_space_basis(p):
        ech.add(v.terms)
    return ech.contains(t.terms)


@lru_cache(maxsize=256)
def _core(t: Multivector):
    """Reduction, support and restricted tensor for l >= 3 (None when support is not 2l-dim)."""
    red = reduce_tensor(t)
    u = support_space(red.reduced)
    if u.dim != 2 * red.l:
        return red, u, None, None
    small = restrict(red.reduced, u)
    return red, u, small, lie_structure(small)


def _to_ambient(red: Reduction, u: Subspace, rows) -> Subspace:
    """Subspace of the support coordinates -> subspace of V containing H_t."""
    wrows = [[sum((r[i] * u.rows[i][j] for i in range(u.dim)), Fraction(0)) for j in range(u.n)] for r in rows]
    return red.attach(wrows)


def decompose_secant(t: Multivector, l: int | None = None, H_t: Subspace | None = None) -> SecantDecomposition:
    red = reduce_tensor(t)
    if H_t is not None and H_t != red.kernel:
        raise ShapeMismatch("supplied common kernel does not match the tensor")
    if l is not None and l != red.l:
        raise NotSecant(f"tensor has l = {red.l}, not {l}")
    l = red.l
    if l < 2:
        raise NotSecant("decomposable tensor")
    if l == 2:
        pairs = darboux(red.reduced)
        if len(pairs) != 2:
            raise NotSecant(f"2-form of skew rank {2 * len(pairs)}")
        a = [list(v.dense()) for v in pairs[0]]
        b = [list(v.dense()) for v in pairs[1]]
        return _ordered_pair(t, red.attach(a), red.attach(b), unique=False)
    red, u, small, lie = _core(t)
    if small is None:
        raise NotSecant(f"support has dimension {u.dim}, not {2 * l}")
    if lie.radical:
        raise NotSecant("stabilizer has a nilpotent radical (tangent type)")
    cent = _centralizer(lie.algebra, u.dim)
    if len(cent) != 2:
        raise SplitFailed(f"centralizer of the stabilizer has dimension {len(cent)}, expected 2")
    n = u.dim
    ident = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    z = next(c for c in cent if any(c[i][j] != (c[0][0] if i == j else 0) for i in range(n) for j in range(n)))
    z2 = _mat_mul(z, z)
    flat = lambda m: {(i, j): m[i][j] for i in range(n) for j in range(n) if m[i][j]}
    sol = express(flat(z2), [flat(z), flat(ident)])
    if sol is None:
        raise SplitFailed("centralizer element is not quadratic")
    beta, gamma = sol
    disc = beta * beta + 4 * gamma
    root = _rational_sqrt(disc)
    if root is None:
        zc = [[z[i][j] - (beta / 2 if i == j else 0) for j in range(n)] for i in range(n)]
        if _trace(zc) == 0 and _derive(zc, _derive(zc, small)) == small.scale(l * l * disc / 4):
            raise IrrationalSplit(
                f"factor spaces are defined over Q(sqrt({disc})), not over Q", discriminant=disc
            )
        raise SplitFailed("no rational splitting and no conjugate-pair certificate")
    if root == 0:
        raise SplitFailed("centralizer element has a repeated eigenvalue")
    ha = _eigenspace(z, (beta + root) / 2)
    hb = _eigenspace(z, (beta - root) / 2)
    if ha.dim != l or hb.dim != l:
        raise SplitFailed("eigenspaces do not have the expected dimension")
    return _ordered_pair(t, _to_ambient(red, u, ha.rows), _to_ambient(red, u, hb.rows), unique=True)


def irrational_split_certificate(t: Multivector) -> Fraction | None:
    """Discriminant d when t is a secant point whose factors are conjugate over Q(sqrt d)."""
    try:
        decompose_secant(t)
    except IrrationalSplit as exc:
        return exc.discriminant
    except (NotSecant, SplitFailed):
        return None
    return None


def _lagrangian_planes(pairs) -> list[list[list[Fraction]]]:
    (u1, v1), (u2, v2) = pairs
    out = []
    for a in (u1, v1):
        for b in (u2, v2):
            out.append([list(a.dense()), list(b.dense())])
    return out


def tangential_locus(t: Multivector, l: int | None = None, samples: int = 0, seed: int = 0) -> TangentialLocusReport:
    red = reduce_tensor(t)
    if l is not None and l != red.l:
        raise NotTangent(f"tensor has l = {red.l}, not {l}")
    l = red.l
    if l < 2:
        raise NotTangent("decomposable tensor")
    if l == 2:
        pairs = darboux(red.reduced)
        if len(pairs) != 2:
            raise NotTangent(f"2-form of skew rank {2 * len(pairs)}")
        planes = _lagrangian_planes(pairs)
        rng = random.Random(seed)
        (u1, v1), (u2, v2) = pairs
        d = lambda v: v.dense()
        for _ in range(samples):
            a, b, c = (rng.randint(-3, 3) for _ in range(3))
            planes.append(
                [
                    [x + a * y + b * z for x, y, z in zip(d(u1), d(v1), d(v2))],
                    [x + b * y + c * z for x, y, z in zip(d(u2), d(v1), d(v2))],
                ]
            )
        pts = {}
        for rows in planes:
            p = pluecker_embed(red.attach(rows))
            if not _in_tangent(t, p):
                raise NotTangent("candidate Lagrangian plane is not a tangency point")
            pts[p.space] = p
        ordered = tuple(sorted(pts.values(), key=GrassPoint.sort_key))
        return TangentialLocusReport(ordered, 4, False)
    red, u, small, lie = _core(t)
    if small is None:
        raise NotTangent(f"support has dimension {u.dim}, not {2 * l}")
    if not lie.radical:
        raise NotTangent("stabilizer is reductive (secant type)")
    cols = []
    for x in lie.radical:
        for j in range(u.dim):
            cols.append([x[i][j] for i in range(u.dim)])
    e = Subspace(u.dim, cols)
    if e.dim != l:
        raise NotTangent(f"radical image has dimension {e.dim}, expected {l}")
    p = pluecker_embed(_to_ambient(red, u, e.rows))
    if not _in_tangent(t, p):
        raise NotTangent("tensor is not in the tangent space of the recovered point")
    return TangentialLocusReport((p,), 0, True)


def unident_family(t: Multivector, samples: int = 5, seed: int = 0) -> list[SecantDecomposition]:
    """Distinct verified decompositions of a tensor in the l = 2 secant stratum.

    Planes are A(r, s) = <u1 + r v2, v1 + s u2> in a Darboux basis of the
    reduced 2-form; (r, s) = (0, 1) is the first sample.  The complementary
    summand is t' - c a^b with c chosen to make it decomposable.
    """
    red = reduce_tensor(t)
    if red.l != 2:
        raise WrongStratum(f"tensor has l = {red.l}; the non-unique family exists only for l = 2")
    pairs = darboux(red.reduced)
    if len(pairs) != 2:
        raise WrongStratum(f"reduced 2-form has skew rank {2 * len(pairs)}")
    (u1, v1), (u2, v2) = pairs
    tp = red.reduced
    rng = random.Random(seed)
    params = [(0, 1)]
    tried = set()
    out: list[SecantDecomposition] = []
    seen = set()
    budget = 50 * max(samples, 1)
    while len(out) < samples and budget > 0:
        budget -= 1
        if params:
            r, s = params.pop(0)
        else:
            r, s = rng.randint(-4, 4), rng.randint(-4, 4)
        if (r, s) in tried or r * s == 1:
            continue
        tried.add((r, s))
        x = u1 + v2.scale(r)
        y = v1 + u2.scale(s)
        xy = wedge(x, y)
        top = wedge(tp, xy)
        c = next(iter(wedge(tp, tp).terms.values())) / (2 * next(iter(top.terms.values())))
        beta = tp - xy.scale(c)
        b_space = psi_kernel(beta)
        if b_space.dim != 2:
            continue
        dec = _ordered_pair(t, red.attach([list(x.dense()), list(y.dense())]), red.attach(b_space.rows), unique=False)
        if dec.spaces() not in seen:
            seen.add(dec.spaces())
            out.append(dec)
    return out


def terracini_pair(p: GrassPoint, q: GrassPoint) -> tuple[bool, int]:
    """(span of the two affine tangent spaces is deficient, its dimension)."""
    if p.n != q.n or p.k != q.k:
        raise ShapeMismatch("points on different Grassmannians")
    k, n = p.k, p.n
    dim, _ = tangent_span_pair(p, q)
    return dim < 2 * k * (n - k) + 2, dim
