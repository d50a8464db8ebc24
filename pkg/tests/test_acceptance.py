"""End-to-end acceptance checks, one marker per criterion.

Run with ``pytest tests/test_acceptance.py -v``; the terminal summary prints
one PASS/FAIL line per criterion.  Everything is exact: no tolerances.
"""
import json
import random
from fractions import Fraction

import pytest

from skewrank.apolarity import (
    monomial_perp_dim,
    perp_dim,
    q3_monomial_part,
    smoothness_certificate,
    tangent_lower_bound,
)
from skewrank.cli import run
from skewrank.exterior import DualForm, Multivector, act_matrix, contract, psi_kernel, wedge, wedge_all
from skewrank.grassmann import (
    hamming_distance,
    pluecker_embed,
    random_pair_at_distance,
    tangent_space_basis,
    random_unimodular,
)
from skewrank.identifiability import (
    _core,
    decompose_secant,
    reduce_tensor,
    tangential_locus,
    terracini_pair,
    unident_family,
)
from skewrank.linalg import Subspace, express
from skewrank.orbits import GRASS, OUTSIDE, SIGMA_THETA_2, OrbitLabel, Sigma, Theta, classify, orbit_dim, q3, representative
from skewrank.tensorio import dump_tensor, parse_tensor

from oracles import contract_by_minors, intersection_dim, wedge_of_vectors

SHAPES = [(k, n) for k in (3, 4, 5) for n in range(2 * k, 13)]
SING_SHAPES = [(k, n) for k in (3, 4, 5) for n in range(max(7, 2 * k), 13)]


def crit(number, title):
    return pytest.mark.criterion(number, title)


def coord(n, idx):
    return Subspace.coordinate(n, idx)


# ---------------------------------------------------------------- 1


@crit(1, "orbit dimensions match the closed formulas")
@pytest.mark.parametrize("k,n", SHAPES)
def test_orbit_dimension_table(k, n):
    g = k * (n - k)
    expected = {
        ("grass", 0): g,
        ("secant", 2): g + 2 * (n - 2) - 3,
        ("tangent", 2): g + 2 * (n - 2) - 3,
    }
    for l in range(3, k + 1):
        expected[("secant", l)] = g + l * (n - l) + 1
        expected[("tangent", l)] = g + l * (n - l)
    for (branch, l), dim in expected.items():
        t = Multivector.basis(n, range(1, k + 1)) if branch == "grass" else representative(branch, l, k, n)
        assert orbit_dim(t)[1] == dim, (branch, l)
    assert orbit_dim(representative("secant", k, k, n))[1] == 2 * k * (n - k) + 1
    assert orbit_dim(representative("tangent", k, k, n))[1] == 2 * k * (n - k)


# ---------------------------------------------------------------- 2


@crit(2, "common kernel of p + q has dimension k - d(p, q)")
@pytest.mark.parametrize("k,n", SHAPES)
def test_kernel_law(k, n):
    rng = random.Random(1000 * k + n)
    for _ in range(100):
        d = rng.randint(2, k)
        p, q = random_pair_at_distance(k, n, d, rng)
        h = psi_kernel(p.pluecker + q.pluecker)
        assert hamming_distance(p, q) == d
        assert h.dim == k - d == intersection_dim(p.space.rows, q.space.rows)
        assert h == p.space.intersection(q.space)


# ---------------------------------------------------------------- 3

ID_SHAPES = [(3, 6), (3, 7), (3, 9), (4, 8), (4, 9), (4, 11), (5, 10), (5, 11)]


def _fresh_decomposition(t):
    reduce_tensor.cache_clear()
    _core.cache_clear()
    return decompose_secant(t)


@crit(3, "secant points at distance >= 3 are identifiable; s2 is not")
def test_identifiability_on_random_pairs():
    rng = random.Random(31337)
    for i in range(100):
        k, n = ID_SHAPES[i % len(ID_SHAPES)]
        p, q = random_pair_at_distance(k, n, rng.randint(3, k), rng)
        a = Fraction(rng.choice([1, -1, 2, 3]), rng.choice([1, 2, 5]))
        t = p.pluecker.scale(a) + q.pluecker
        first = _fresh_decomposition(t)
        # second run: rebuilt from a shuffled term list and rescaled
        items = list(t.items())
        rng.shuffle(items)
        second = _fresh_decomposition(Multivector(n, k, dict(items)).scale(-7))
        assert first.unique and second.unique
        assert first.spaces() == second.spaces() == frozenset({p.space, q.space})
        assert first.reconstruct() == t


def _explicit(k, n):
    base = [[int(i == j) for i in range(1, n + 1)] for j in range(1, k - 1)]
    vec = lambda *idx: [int(i in idx) for i in range(1, n + 1)]
    return frozenset(
        {Subspace(n, base + [vec(k - 1), vec(k, k + 1)]), Subspace(n, base + [vec(k + 1), vec(k + 2, k - 1)])}
    )


@crit(3, "secant points at distance >= 3 are identifiable; s2 is not")
@pytest.mark.parametrize("k,n", [(3, 6), (3, 7), (4, 8), (4, 10), (5, 10), (5, 12)])
def test_unidentifiable_family(k, n):
    t = representative("secant", 2, k, n)
    fam = unident_family(t, samples=5, seed=k * n)
    spaces = [d.spaces() for d in fam]
    assert len(fam) >= 5 and len(set(spaces)) == len(spaces)
    assert all(d.reconstruct() == t for d in fam)
    assert _explicit(k, n) in spaces


# ---------------------------------------------------------------- 4

TAN_SHAPES = {3: [(3, 6), (3, 7), (4, 8), (5, 10)], 4: [(4, 8), (4, 9), (5, 10)], 5: [(5, 10), (5, 11)]}


@crit(4, "tangent points at distance >= 3 have a unique tangency point")
@pytest.mark.parametrize("l", [3, 4, 5])
def test_tangential_identifiability(l):
    rng = random.Random(77 + l)
    for i in range(50):
        k, n = TAN_SHAPES[l][i % len(TAN_SHAPES[l])]
        g = random_unimodular(n, rng)
        rep = tangential_locus(act_matrix(g, representative("tangent", l, k, n)))
        assert rep.unique
        assert [p.space for p in rep.points] == [coord(n, range(1, k + 1)).transform(g)]


@crit(4, "tangent points at distance >= 3 have a unique tangency point")
@pytest.mark.parametrize("k,n", [(3, 6), (3, 8), (4, 9), (5, 11)])
def test_theta2_has_several_tangency_points(k, n):
    g = random_unimodular(n, random.Random(k + n))
    t = act_matrix(g, representative("tangent", 2, k, n))
    rep = tangential_locus(t, samples=2, seed=3)
    assert not rep.unique and len({p.space for p in rep.points}) >= 2
    # independent check: t lies in the span of each tangent space
    for p in rep.points:
        basis = [v.terms for v in tangent_space_basis(p)]
        assert express(t.terms, basis) is not None


# ---------------------------------------------------------------- 5


@crit(5, "tangent spans are deficient exactly at distance <= 2")
@pytest.mark.parametrize("k,n", SHAPES)
def test_terracini_locus(k, n):
    rng = random.Random(5000 + 100 * k + n)
    seen = set()
    for _ in range(200):
        d = rng.randint(0, k)
        p, q = random_pair_at_distance(k, n, d, rng)
        inside, span = terracini_pair(p, q)
        assert inside == (d <= 2)
        if d >= 3:
            assert span == 2 * (k * (n - k) + 1)
        seen.add(d)
    assert seen == set(range(k + 1))


# ---------------------------------------------------------------- 6


@crit(6, "perp of the squared annihilator ideal at q3")
@pytest.mark.parametrize("k,n", [(3, n) for n in range(7, 13)] + [(k, n) for k in (4, 5) for n in range(2 * k, 13)])
def test_perp_at_q3(k, n):
    value = perp_dim(q3(k, n))
    if k == 3:
        assert value == 6 * (n - 3) + 2
    else:
        assert value == 2 * k * (n - k) + 2
        b_perp = monomial_perp_dim(q3_monomial_part(k, n), n, k)
        assert b_perp == 5 + 3 * (n - k - 3) * (k - 1) + 6 * (k - 2) + k * (n - k)


# ---------------------------------------------------------------- 7


@crit(7, "singular locus of the secant variety is the closure of the distance-2 stratum")
@pytest.mark.parametrize("k,n", SING_SHAPES)
def test_singular_locus(k, n):
    cases = [(Multivector.basis(n, range(1, k + 1)), "Singular"), (representative("secant", 2, k, n), "Singular")]
    for l in range(3, k + 1):
        cases.append((representative("secant", l, k, n), "Smooth"))
        cases.append((representative("tangent", l, k, n), "Smooth"))
    cases.append((q3(k, n), "Smooth"))
    for t, verdict in cases:
        cert = smoothness_certificate(t)
        assert cert.verdict == verdict, (str(cert.point_label), cert)
        if verdict == "Smooth":
            assert cert.lower_dim == cert.upper_dim == 2 * k * (n - k) + 2


@crit(7, "singular locus of the secant variety is the closure of the distance-2 stratum")
def test_theta3_smooth_in_gr_3_7():
    cert = smoothness_certificate(representative("tangent", 3, 3, 7))
    assert cert.verdict == "Smooth" and cert.upper_dim == 26


def _s2_points(k, n):
    base = list(range(1, k - 1))
    sets = [
        base + [k - 1, k],
        base + [k + 1, k + 2],
        base + [k - 1, k + 1],
        base + [k - 1, k + 2],
        base + [k, k + 1],
        base + [k, k + 2],
    ]
    return [pluecker_embed(coord(n, s)) for s in sets]


@crit(7, "singular locus of the secant variety is the closure of the distance-2 stratum")
@pytest.mark.parametrize("k,n", SING_SHAPES)
def test_s2_lower_bound(k, n):
    t = representative("secant", 2, k, n)
    pts = _s2_points(k, n)
    four, _ = tangent_lower_bound(t, points=pts[:4])
    assert four == (n - k) * (4 * k - 4) - 4 * k + 6
    if (k, n) == (3, 7):
        six, _ = tangent_lower_bound(t, points=pts)
        assert six == 30 > 26


# ---------------------------------------------------------------- 8


@crit(8, "k = 2: skew-rank classification and singular locus = Gr")
@pytest.mark.parametrize("n", range(6, 13))
def test_two_forms(n):
    e = lambda i, j: Multivector.basis(n, (i, j))
    grass, rank4, rank6 = e(1, 2), e(1, 2) + e(3, 4), e(1, 2) + e(3, 4) + e(5, 6)
    g = random_unimodular(n, random.Random(n))
    assert classify(act_matrix(g, grass)).label == GRASS
    assert classify(act_matrix(g, rank4)).label == OrbitLabel("K2Rank", 4)
    assert classify(act_matrix(g, rank6)).label == OUTSIDE
    assert smoothness_certificate(grass).verdict == "Singular"
    assert smoothness_certificate(rank4).verdict == "Smooth"
    assert smoothness_certificate(act_matrix(g, rank4)).verdict == "Smooth"


# ---------------------------------------------------------------- 9


def _random_mv(rng, n, g, terms=5):
    from itertools import combinations

    keys = list(combinations(range(1, n + 1), g))
    chosen = rng.sample(keys, min(terms, len(keys)))
    return Multivector(n, g, {c: Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for c in chosen})


@crit(9, "property suites: algebra, contraction oracle, equivariance, serialization, determinism")
def test_wedge_properties():
    rng = random.Random(9)
    for _ in range(200):
        n = rng.randint(2, 6)
        a, b, c = (_random_mv(rng, n, rng.randint(0, min(3, n))) for _ in range(3))
        assert wedge(a, b) == wedge(b, a).scale((-1) ** (a.grade * b.grade))
        assert wedge(wedge(a, b), c) == wedge(a, wedge(b, c))


@crit(9, "property suites: algebra, contraction oracle, equivariance, serialization, determinism")
def test_contraction_against_determinant_expansion():
    rng = random.Random(19)
    for _ in range(300):
        n = rng.randint(2, 6)
        k = rng.randint(1, min(4, n))
        h = rng.randint(1, k)
        vs = [[rng.randint(-2, 2) for _ in range(n)] for _ in range(k)]
        xs = [[rng.randint(-2, 2) for _ in range(n)] for _ in range(h)]
        t = wedge_all([Multivector.vector(n, v) for v in vs])
        assert dict(t.terms) == wedge_of_vectors(vs, n)
        form = wedge_all([DualForm.vector(n, x) for x in xs])
        assert dict(contract(form, t).terms) == contract_by_minors(xs, vs, n)
        if h >= 2:
            head, tail = DualForm.vector(n, xs[0]), wedge_all([DualForm.vector(n, x) for x in xs[1:]])
            assert contract(form, t) == contract(tail, contract(head, t))


@crit(9, "property suites: algebra, contraction oracle, equivariance, serialization, determinism")
def test_classification_equivariance_and_scaling():
    rng = random.Random(29)
    for _ in range(40):
        k, n = rng.choice([(3, 6), (3, 7), (4, 8), (4, 9), (5, 10)])
        branch, l = rng.choice(["secant", "tangent"]), rng.randint(1, k)
        t = representative(branch, l, k, n)
        base = classify(t).label
        moved = act_matrix(random_unimodular(n, rng), t).scale(Fraction(rng.choice([-2, 3]), rng.choice([1, 5])))
        assert classify(moved).label == base
        expect = GRASS if l == 1 else SIGMA_THETA_2 if l == 2 else (Sigma(l) if branch == "secant" else Theta(l))
        assert base == expect


@crit(9, "property suites: algebra, contraction oracle, equivariance, serialization, determinism")
def test_serialization_round_trip():
    rng = random.Random(39)
    for _ in range(200):
        n = rng.randint(2, 8)
        t = _random_mv(rng, n, rng.randint(1, n))
        if t:
            assert parse_tensor(dump_tensor(t)) == t


@crit(9, "property suites: algebra, contraction oracle, equivariance, serialization, determinism")
def test_report_determinism(tmp_path, capsys):
    path = tmp_path / "t.json"
    path.write_text(dump_tensor(representative("secant", 2, 4, 8)))
    for cmd in ("classify", "decompose", "tangential", "smooth", "perp_dim", "orbit_dim"):
        outs = []
        for _ in range(2):
            code = run([cmd, "--input", str(path), "--seed", "11", "--oracle"])
            outs.append(capsys.readouterr().out)
            assert code == 0
        assert outs[0] == outs[1]
        json.loads(outs[0])
