"""Skew-apolar annihilators, the squared annihilator ideal, and smoothness certificates.

For a grade-k tensor t, Ann_d(t) is the kernel of Lambda^d V^dual -> Lambda^{k-d} V,
y -> y ⌟ t.  A dual monomial x_J whose index set is not contained in any
monomial of t contracts t to zero; call such J *free*.  Ann_d is the span of
the free monomials plus the kernel of the contraction restricted to the few
non-free monomials, so the large part of every computation below is
combinatorial and only a small remainder needs elimination.

Since the annihilator is an ideal, the degree-k part of its square is
sum_{a=1}^{k-1} Ann_a ^ Ann_{k-a}.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Iterable

from .errors import OutOfRange, VerificationFailure, WrongStratum
from .exterior import DualForm, Multivector, contract, merge_sign, span_dim, wedge
from .grassmann import GrassPoint, tangent_space_basis
from .linalg import Echelon, _back_substitute, kernel

__all__ = [
    "ApolarIdealSlice",
    "SmoothnessCertificate",
    "annihilator",
    "squared_degree_k",
    "squared_dim",
    "perp_dim",
    "monomial_perp_dim",
    "q3_generator_groups",
    "q3_monomial_part",
    "tangent_lower_bound",
    "smoothness_certificate",
    "sigma2_cone_dim",
]


@dataclass(frozen=True)
class ApolarIdealSlice:
    degree: int
    generators: tuple[DualForm, ...]

    @property
    def dim(self) -> int:
        return len(self.generators)


def _relevant(t: Multivector, d: int) -> list[tuple]:
    """Degree-d index sets contained in some monomial of t, in lex order."""
    out = set()
    for idx in t.terms:
        out.update(combinations(idx, d))
    return sorted(out)


def _relevant_kernel(t: Multivector, d: int) -> list[dict]:
    """Kernel of the contraction on the span of non-free degree-d monomials, keyed by index set."""
    rel = _relevant(t, d)
    n = t.n
    images = [contract(DualForm.basis(n, J), t).terms for J in rel]
    return [{rel[i]: c for i, c in r.items()} for r in kernel(images)]


def _check_degree(t: Multivector, d: int) -> None:
    if d < 1 or d > t.grade:
        raise OutOfRange(f"degree {d} outside 1..{t.grade}")


def annihilator(t: Multivector, d: int) -> ApolarIdealSlice:
    """Ann_d(t) as an RREF basis of dual forms (pivot = lex-least index set)."""
    _check_degree(t, d)
    n = t.n
    rel = set(_relevant(t, d))
    gens = []
    for J in combinations(range(1, n + 1), d):
        if J not in rel:
            gens.append({J: Fraction(1)})
    gens.extend(_relevant_kernel(t, d))
    gens.sort(key=min)
    forms = tuple(DualForm(n, d, g) for g in gens)
    for f in forms:
        if contract(f, t):
            raise VerificationFailure("annihilator element does not kill the tensor")
    return ApolarIdealSlice(d, forms)


def _generator_degree(t: Multivector, generator_degree: int | None) -> int:
    top = t.grade - 1
    if generator_degree is None:
        return top
    if generator_degree < 1:
        raise OutOfRange("generator degree must be at least 1")
    return min(generator_degree, top)


def _pieces(t: Multivector, dmax: int):
    """Free-monomial predicate and non-monomial annihilator elements of degree <= dmax."""
    rel = {d: set(_relevant(t, d)) for d in range(1, t.grade)}
    kern = {d: _relevant_kernel(t, d) for d in range(1, dmax + 1)}
    return rel, kern


def _contains_free(I: tuple, rel: dict, dmax: int) -> list[tuple]:
    """Free subsets of I of size <= dmax."""
    out = []
    for d in range(1, min(dmax, len(I)) + 1):
        for A in combinations(I, d):
            if A not in rel[d]:
                out.append(A)
    return out


def _free_pair_monomials(t: Multivector, dmax: int, rel: dict) -> set:
    """Degree-k monomials x_I containing two disjoint free subsets of size <= dmax."""
    k, n = t.grade, t.n
    out = set()
    for I in combinations(range(1, n + 1), k):
        fs = _contains_free(I, rel, dmax)
        hit = False
        for i, A in enumerate(fs):
            sa = set(A)
            for B in fs[i + 1:]:
                if sa.isdisjoint(B):
                    hit = True
                    break
            if hit:
                break
        if hit:
            out.add(I)
    return out


def _mixed_products(t: Multivector, dmax: int, rel: dict, kern: dict, skip: set) -> list[dict]:
    """Products involving at least one non-monomial generator, with coordinates in ``skip`` dropped."""
    k, n = t.grade, t.n
    out = []

    def emit(alpha: dict, mono: tuple):
        prod: dict = {}
        for A, ca in alpha.items():
            r = merge_sign(A, mono)
            if r is None:
                continue
            s, I = r
            if I in skip:
                continue
            v = prod.get(I, 0) + s * ca
            if v:
                prod[I] = v
            else:
                prod.pop(I, None)
        if prod:
            out.append(prod)

    for a, gammas in kern.items():
        if not gammas:
            continue
        # gamma ^ x_C with x_C a monomial lying in the generated ideal
        for C in combinations(range(1, n + 1), k - a):
            if _contains_free(C, rel, dmax):
                for g in gammas:
                    emit(g, C)
        # gamma ^ gamma' ^ x_M
        for b, others in kern.items():
            if b < a or a + b > k:
                continue
            for g in gammas:
                for h in others:
                    gh = _wedge_terms(g, h)
                    if not gh:
                        continue
                    for M in combinations(range(1, n + 1), k - a - b):
                        emit(gh, M)
    return out


def squared_dim(t: Multivector, generator_degree: int | None = 2) -> int:
    """dim of the degree-k part of J^2, J the ideal generated by Ann_d(t) for d <= generator_degree.

    ``generator_degree=None`` uses the whole annihilator ideal.
    """
    if t.grade < 2:
        return 0
    dmax = _generator_degree(t, generator_degree)
    rel, kern = _pieces(t, dmax)
    mono = _free_pair_monomials(t, dmax, rel)
    ech = Echelon()
    for v in _mixed_products(t, dmax, rel, kern, mono):
        ech.add(v)
    return len(mono) + ech.rank


def squared_degree_k(t: Multivector, generator_degree: int | None = 2) -> list[DualForm]:
    """RREF basis of the degree-k part of J^2 (see :func:`squared_dim`)."""
    k, n = t.grade, t.n
    if k < 2:
        return []
    dmax = _generator_degree(t, generator_degree)
    rel, kern = _pieces(t, dmax)
    ech = Echelon()
    for I in sorted(_free_pair_monomials(t, dmax, rel)):
        ech.add({I: Fraction(1)})
    for v in _mixed_products(t, dmax, rel, kern, set()):
        ech.add(v)
    return [DualForm(n, k, r) for r in _back_substitute(ech.rows)]


def squared_degree_k_naive(t: Multivector, generator_degree: int | None = 2) -> list[DualForm]:
    """Same span as :func:`squared_degree_k`, built from every product alpha ^ beta ^ x_M.

    Slow; used as a cross-check.
    """
    k, n = t.grade, t.n
    dmax = _generator_degree(t, generator_degree)
    slices = {d: [g.terms for g in annihilator(t, d).generators] for d in range(1, dmax + 1)}
    ech = Echelon()
    for a in slices:
        for b in slices:
            if b < a or a + b > k:
                continue
            for alpha in slices[a]:
                for beta in slices[b]:
                    ab = _wedge_terms(alpha, beta)
                    if not ab:
                        continue
                    for m in combinations(range(1, n + 1), k - a - b):
                        v = _wedge_terms(ab, {m: 1})
                        if v:
                            ech.add(v)
    return [DualForm(n, k, r) for r in _back_substitute(ech.rows)]


def _wedge_terms(u: dict, v: dict) -> dict:
    out: dict = {}
    for A, ca in u.items():
        for B, cb in v.items():
            r = merge_sign(A, B)
            if r is None:
                continue
            s, I = r
            x = out.get(I, 0) + s * ca * cb
            if x:
                out[I] = x
            else:
                out.pop(I, None)
    return out


def perp_dim(t: Multivector, generator_degree: int | None = 2) -> int:
    """dim of (J^2)_k^perp in Lambda^k V, J generated by annihilators of degree <= generator_degree."""
    if t.grade < 1:
        raise OutOfRange("grade must be positive")
    return comb(t.n, t.grade) - squared_dim(t, generator_degree)


def monomial_perp_dim(monomials: Iterable[tuple], n: int, k: int) -> int:
    """Number of degree-k monomials divisible by none of the given dual monomials."""
    gens = [frozenset(m) for m in monomials]
    count = 0
    for I in combinations(range(1, n + 1), k):
        s = set(I)
        if not any(g <= s for g in gens):
            count += 1
    return count


# ------------------------------------------------------------------ the q3 point


def q3_generator_groups(k: int, n: int) -> dict[str, list[DualForm]]:
    """The four generator groups of the annihilator ideal of q3, written out explicitly."""
    if k < 3 or n < k + 3:
        raise OutOfRange("q3 needs k >= 3 and N >= k + 3")
    x = lambda *i: DualForm.basis(n, tuple(sorted(i)), _sort_parity(i))
    return {
        "1": [x(i) for i in range(k + 4, n + 1)],
        "2": [x(j, k + j) for j in (1, 2, 3)],
        "3": [x(k + 1, k + 2), x(k + 1, k + 3), x(k + 2, k + 3)],
        "4": [
            x(2, k + 1) + x(1, k + 2),
            x(3, k + 1) + x(1, k + 3),
            x(2, k + 3) + x(3, k + 2),
        ],
    }


def _sort_parity(seq) -> int:
    inv = sum(1 for i in range(len(seq)) for j in range(i + 1, len(seq)) if seq[i] > seq[j])
    return -1 if inv & 1 else 1


def q3_monomial_part(k: int, n: int) -> list[tuple]:
    """Monomials of the products (1)^2, (1)(2), (1)(3), (2)^2, (2)(3) of the q3 generator groups."""
    g = q3_generator_groups(k, n)
    out = set()
    for a, b in (("1", "1"), ("1", "2"), ("1", "3"), ("2", "2"), ("2", "3")):
        for f in g[a]:
            for h in g[b]:
                p = wedge(f, h)
                if len(p) > 1:
                    raise VerificationFailure("expected a monomial product")
                out.update(p.terms)
    return sorted(out)


# ------------------------------------------------------------------ certificates


def sigma2_cone_dim(k: int, n: int) -> int:
    """Dimension of the affine cone over the secant variety of Gr(k, n)."""
    if k == 1 or n - k <= 1:
        return comb(n, k)
    if k == 2 or n - k == 2:
        # skew forms of rank <= 4
        return min(4 * n - 10, comb(n, k))
    return min(2 * k * (n - k) + 2, comb(n, k))


@dataclass(frozen=True)
class SmoothnessCertificate:
    """Bounds on dim T_t(sigma_2) at t, for the affine cone.

    ``lower_dim`` is the span of tangent data forced into T_t (raised to the
    dimension of the variety when smaller, since every tangent space has at
    least that dimension); ``upper_dim`` is the perp of the squared ideal.
    """

    point_label: object
    lower_dim: int
    upper_dim: int
    sigma2_cone_dim: int
    verdict: str
    span_dim: int
    contributing_points: tuple = ()
    reason: str = ""

    @property
    def sandwich_holds(self) -> bool:
        return self.lower_dim <= self.upper_dim


def _span_of_tangents(points, extra=()) -> int:
    vecs = []
    for p in points:
        vecs.extend(tangent_space_basis(p))
    vecs.extend(extra)
    return span_dim(vecs)


def tangent_lower_bound(t: Multivector, report=None, points=None) -> tuple[int, list[GrassPoint]]:
    """Dimension of a subspace that T_t(sigma_2) must contain, and the points used.

    With explicit ``points`` only their tangent spaces are spanned.  Otherwise
    the data depends on the stratum: both factor points for secant strata,
    plus every tangency point found for the l = 2 stratum; the tangency point
    plus the orbit directions gl(N).t for tangent strata; for a Grassmannian
    point p, T_p together with every coordinate Pluecker point (the map
    (a, b, mu) -> a + mu b has differential q in the mu direction at mu = 0).
    """
    if points is not None:
        pts = list(points)
        return _span_of_tangents(pts), pts
    from .grassmann import gl_act, gl_generators
    from .orbits import classify

    if report is None:
        report = classify(t)
    label = report.label
    kind = label.kind
    if kind in ("Sigma", "K2Rank") and report.decomposition is not None:
        pts = [report.decomposition.p, report.decomposition.q]
        return _span_of_tangents(pts), pts
    if kind == "Sigma":
        # factors only over a quadratic extension: the span is the orbit tangent space
        return span_dim(gl_act(g, t) for g in gl_generators(t.n)), []
    if kind == "SigmaTheta2":
        pts = [report.decomposition.p, report.decomposition.q]
        for p in report.tangency:
            if p not in pts:
                pts.append(p)
        return _span_of_tangents(pts), pts
    if kind == "Theta":
        pts = list(report.tangency)
        extra = [gl_act(g, t) for g in gl_generators(t.n)]
        return _span_of_tangents(pts, extra), pts
    if kind == "Grass":
        p = report.point
        coords = [Multivector.basis(t.n, I) for I in combinations(range(1, t.n + 1), t.grade)]
        return _span_of_tangents([p], coords), [p]
    raise WrongStratum(f"no tangent data for a point labelled {label}")


def smoothness_certificate(t: Multivector, report=None) -> SmoothnessCertificate:
    """Smooth / Singular / Inconclusive verdict for t as a point of sigma_2(Gr(k, N))."""
    from .orbits import classify

    if report is None:
        report = classify(t)
    if not report.label.in_sigma2:
        raise WrongStratum(f"{report.label} is not a point of the secant variety")
    k, n = t.grade, t.n
    cone = sigma2_cone_dim(k, n)
    span, pts = tangent_lower_bound(t, report)
    lower = max(span, cone)
    upper = perp_dim(t)
    if cone == comb(n, k):
        verdict, reason = "Smooth", "the secant variety fills the ambient space"
    elif lower > cone:
        verdict, reason = "Singular", "forced tangent directions exceed the dimension of the variety"
    elif upper == cone:
        verdict, reason = "Smooth", "perp of the squared annihilator ideal equals the dimension of the variety"
    else:
        verdict, reason = "Inconclusive", "bounds do not meet"
    return SmoothnessCertificate(report.label, lower, upper, cone, verdict, span, tuple(pts), reason)
