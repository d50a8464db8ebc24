"""Subspaces, Pluecker points, distance on the Grassmannian and tangent spaces."""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import NotDecomposable, ShapeMismatch, ZeroDim
from .exterior import Multivector, _sort_sign, psi_kernel, span_dim, wedge_all
from .linalg import Subspace

__all__ = [
    "Subspace",
    "GrassPoint",
    "GlGenerator",
    "pluecker_embed",
    "grass_point",
    "hamming_distance",
    "distance_chain",
    "tangent_space_basis",
    "gl_act",
    "gl_generators",
    "tangent_span_pair",
    "random_unimodular",
    "random_subspace",
    "random_pair_at_distance",
    "subspace_vectors",
]


def subspace_vectors(s: Subspace) -> list[Multivector]:
    """RREF basis rows as grade-1 multivectors."""
    return [Multivector.vector(s.n, r) for r in s.rows]


@dataclass(frozen=True)
class GrassPoint:
    space: Subspace
    pluecker: Multivector

    @property
    def k(self) -> int:
        return self.space.dim

    @property
    def n(self) -> int:
        return self.space.n

    def sort_key(self):
        return (self.space.pivots, self.space.rows)

    def __repr__(self) -> str:
        return f"GrassPoint({self.pluecker.format()})"


def pluecker_embed(s: Subspace) -> GrassPoint:
    if s.dim < 1:
        raise ZeroDim("cannot embed the zero subspace")
    return GrassPoint(s, wedge_all(subspace_vectors(s)))


def grass_point(v: Multivector) -> GrassPoint:
    """GrassPoint spanned by a decomposable multivector (rejects anything else)."""
    if not v:
        raise NotDecomposable("zero multivector")
    h = psi_kernel(v)
    if h.dim != v.grade:
        raise NotDecomposable(f"kernel of x -> x^v has dim {h.dim}, expected {v.grade}")
    return pluecker_embed(h)


def _check_pair(p: GrassPoint, q: GrassPoint) -> None:
    if p.n != q.n or p.k != q.k:
        raise ShapeMismatch(f"points of Gr({p.k},{p.n}) and Gr({q.k},{q.n})")


def hamming_distance(p: GrassPoint, q: GrassPoint) -> int:
    _check_pair(p, q)
    return p.k - p.space.intersection(q.space).dim


def _extend(base: Subspace, big: Subspace) -> list[tuple]:
    """Rows of ``big`` completing a basis of ``base`` to one of ``big``."""
    cur = base
    out = []
    for r in big.rows:
        if not cur.contains(r):
            out.append(r)
            cur = Subspace(cur.n, cur.rows + (r,))
    return out


def distance_chain(p: GrassPoint, q: GrassPoint) -> list[GrassPoint]:
    """Points p = p_0, ..., p_d = q with consecutive points at distance one."""
    _check_pair(p, q)
    inter = p.space.intersection(q.space)
    a = _extend(inter, p.space)
    b = _extend(inter, q.space)
    chain = []
    for j in range(len(a) + 1):
        chain.append(pluecker_embed(Subspace(p.n, inter.rows + tuple(b[:j]) + tuple(a[j:]))))
    return chain


def tangent_space_basis(p: GrassPoint) -> list[Multivector]:
    """Basis of the affine tangent space Lambda^{k-1}H_p ^ V to the Pluecker cone."""
    hs = subspace_vectors(p.space)
    n = p.n
    comp = [Multivector.basis(n, (c,)) for c in p.space.complement_indices()]
    out = [p.pluecker]
    for i in range(len(hs)):
        for c in comp:
            out.append(wedge_all(hs[:i] + [c] + hs[i + 1:]))
    return out


@dataclass(frozen=True)
class GlGenerator:
    """Elementary matrix E_ij of gl(N): e_j -> e_i, other basis vectors -> 0."""

    i: int
    j: int

    @property
    def diagonal(self) -> bool:
        return self.i == self.j


def gl_generators(n: int) -> list[GlGenerator]:
    return [GlGenerator(i, j) for i in range(1, n + 1) for j in range(1, n + 1)]


def gl_act(g: GlGenerator, v: Multivector) -> Multivector:
    """Derivation action of E_ij on Lambda^k."""
    i, j = g.i, g.j
    out: dict = {}
    for idx, c in v.terms.items():
        if j not in idx:
            continue
        if i == j:
            out[idx] = out.get(idx, 0) + c
            continue
        if i in idx:
            continue
        s, key = _sort_sign([i if x == j else x for x in idx])
        out[key] = out.get(key, 0) + s * c
    return type(v)(v.n, v.grade, out)


def tangent_span_pair(p: GrassPoint, q: GrassPoint) -> tuple[int, int]:
    """(dim of T_p + T_q, dim of T_p ∩ T_q) for the affine tangent spaces."""
    _check_pair(p, q)
    tp = tangent_space_basis(p)
    tq = tangent_space_basis(q)
    dim = span_dim(tp + tq)
    return dim, len(tp) + len(tq) - dim


# ---------------------------------------------------------------- sampling


def random_unimodular(n: int, rng: random.Random, steps: int | None = None) -> list[list[int]]:
    """Integer matrix of determinant +-1 from seeded elementary operations."""
    g = [[int(r == c) for c in range(n)] for r in range(n)]
    perm = list(range(n))
    rng.shuffle(perm)
    g = [g[p] for p in perm]
    for _ in range(steps if steps is not None else 3 * n):
        a, b = rng.sample(range(n), 2)
        c = rng.choice((-2, -1, 1, 2))
        for col in range(n):
            g[b][col] += c * g[a][col]
    return g


def random_subspace(k: int, n: int, rng: random.Random) -> Subspace:
    while True:
        rows = [[rng.randint(-2, 2) for _ in range(n)] for _ in range(k)]
        s = Subspace(n, rows)
        if s.dim == k:
            return s


def random_pair_at_distance(k: int, n: int, d: int, rng: random.Random) -> tuple[GrassPoint, GrassPoint]:
    """Two points of Gr(k,n) at Hamming distance exactly d, transported by a random g."""
    if d > k or k + d > n:
        raise ShapeMismatch(f"distance {d} impossible in Gr({k},{n})")
    g = random_unimodular(n, rng)
    a = Subspace.coordinate(n, range(1, k + 1)).transform(g)
    b = Subspace.coordinate(n, list(range(1, k - d + 1)) + list(range(k + 1, k + d + 1))).transform(g)
    return pluecker_embed(a), pluecker_embed(b)


def transform_point(g: Sequence[Sequence], p: GrassPoint) -> GrassPoint:
    return pluecker_embed(p.space.transform(g))


def as_fraction_rows(s: Subspace) -> list[list[Fraction]]:
    return [list(r) for r in s.rows]
