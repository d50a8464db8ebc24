import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from skewrank.errors import GradeMismatch, OutOfRange, ZeroTensor
from skewrank.exterior import Multivector, act_matrix
from skewrank.grassmann import GlGenerator, gl_act, random_unimodular
from skewrank.linalg import Subspace
from skewrank.orbits import (
    GRASS,
    OUTSIDE,
    SIGMA_THETA_2,
    OrbitLabel,
    Sigma,
    Theta,
    classify,
    expected_projective_dim,
    orbit_atlas,
    orbit_dim,
    q3,
    representative,
)


def e(n, *idx, c=1):
    return Multivector.basis(n, idx, c)


def expected_label(branch, l):
    if l == 1:
        return GRASS
    if l == 2:
        return SIGMA_THETA_2
    return Sigma(l) if branch == "secant" else Theta(l)


def test_representative_examples():
    assert representative("secant", 3, 3, 6) == e(6, 1, 2, 3) + e(6, 4, 5, 6)
    # slot replacement puts e_{k+1} first: sign (-1)^(k-1) against e_2..e_k e_{k+1}
    assert representative("tangent", 1, 4, 8) == e(8, 2, 3, 4, 5, c=-1)
    assert representative("tangent", 1, 3, 6) == e(6, 2, 3, 4)
    assert representative("secant", 2, 3, 7) == e(7, 1, 2, 3) + e(7, 1, 4, 5)
    # theta_3 for k = 3 is e_4 e_2 e_3 + e_1 e_5 e_3 + e_1 e_2 e_6 before sorting
    assert representative("tangent", 3, 3, 7) == e(7, 2, 3, 4) - e(7, 1, 3, 5) + e(7, 1, 2, 6)


def test_q3_and_theta3_agree_up_to_sign():
    assert q3(3, 7) == e(7, 2, 3, 4) - e(7, 1, 3, 5) + e(7, 1, 2, 6)
    assert q3(4, 8) == e(8, 2, 3, 4, 5) - e(8, 1, 3, 4, 6) + e(8, 1, 2, 4, 7)
    # e_5 e_2 e_3 e_4 sorts with sign -1, so theta_3 = -q3 here
    assert representative("tangent", 3, 4, 8) == q3(4, 8).scale(-1)
    assert classify(q3(4, 8)).label == Theta(3)


def test_out_of_range():
    with pytest.raises(OutOfRange):
        representative("secant", 4, 3, 7)
    with pytest.raises(OutOfRange):
        representative("secant", 3, 4, 7)
    with pytest.raises(OutOfRange):
        orbit_atlas(4, 7)


def test_label_parsing_and_ordering():
    assert str(Sigma(3)) == "Sigma(3)"
    assert OrbitLabel.parse("Theta(4)") == Theta(4)
    assert OrbitLabel.parse("Grass") == GRASS
    assert not OUTSIDE.in_sigma2 and Sigma(3).in_sigma2
    with pytest.raises(ValueError):
        OrbitLabel("Nope")


@pytest.mark.parametrize("k,n", [(3, 6), (3, 7), (4, 8), (4, 9), (5, 10)])
def test_classify_every_representative(k, n):
    for branch in ("secant", "tangent"):
        for l in range(1, k + 1):
            t = representative(branch, l, k, n)
            rep = classify(t)
            assert rep.label == expected_label(branch, l)
            assert rep.checked
            if l >= 2:
                assert rep.common_kernel.dim == k - l
            if branch == "secant" and l >= 2:
                assert rep.common_kernel == Subspace.coordinate(n, range(1, k - l + 1))
                assert rep.decomposition.reconstruct() == t


def test_rank_three_sum_is_outside():
    rep = classify(e(7, 1, 2, 3) + e(7, 1, 4, 5) + e(7, 1, 6, 7))
    assert rep.label == OUTSIDE
    rep = classify(e(9, 1, 2, 3) + e(9, 4, 5, 6) + e(9, 7, 8, 9))
    assert rep.label == OUTSIDE


def test_k2_path_uses_skew_rank():
    assert classify(e(6, 1, 2)).label == GRASS
    rep = classify(e(6, 1, 2) + e(6, 3, 4))
    assert rep.label == OrbitLabel("K2Rank", 4) and rep.skew_rank == 4
    rep = classify(e(6, 1, 2) + e(6, 3, 4) + e(6, 5, 6))
    assert rep.label == OUTSIDE and rep.skew_rank == 6


def test_classify_rejects_bad_input():
    with pytest.raises(ZeroTensor):
        classify(Multivector.zero(5, 2))
    with pytest.raises(GradeMismatch):
        classify("e_123")


@given(st.integers(0, 2**32 - 1))
def test_classification_is_equivariant_and_scale_invariant(seed):
    rng = random.Random(seed)
    k, n = rng.choice([(3, 6), (3, 7), (4, 8), (4, 9)])
    branch = rng.choice(["secant", "tangent"])
    l = rng.randint(1, k)
    t = representative(branch, l, k, n)
    g = random_unimodular(n, rng)
    c = Fraction(rng.choice([-3, -1, 2, 5]), rng.choice([1, 2, 7]))
    moved = act_matrix(g, t).scale(c)
    rep = classify(moved)
    assert rep.label == expected_label(branch, l)
    assert rep.common_kernel == classify(t).common_kernel.transform(g)


def test_orbit_dim_examples():
    assert orbit_dim(representative("secant", 3, 3, 7)) == (26, 25)
    assert orbit_dim(representative("tangent", 3, 3, 7)) == (25, 24)
    assert orbit_dim(representative("secant", 2, 3, 7)) == (20, 19)
    assert orbit_dim(e(7, 1, 2, 3)) == (13, 12)


def test_orbit_dim_is_invariant_along_the_orbit():
    rng = random.Random(4)
    t = representative("tangent", 3, 4, 8)
    for _ in range(3):
        assert orbit_dim(act_matrix(random_unimodular(8, rng), t)) == orbit_dim(t)


def test_diagonal_generators_reproduce_the_tensor():
    t = representative("secant", 3, 3, 7)
    total = sum((gl_act(GlGenerator(i, i), t) for i in range(1, 8)), Multivector.zero(7, 3))
    assert total == t.scale(3)


def test_closed_forms():
    assert expected_projective_dim(Sigma(3), 3, 7) == 25
    assert expected_projective_dim(Theta(3), 3, 7) == 24
    assert expected_projective_dim(SIGMA_THETA_2, 3, 7) == 19
    assert expected_projective_dim(GRASS, 3, 7) == 12


def test_atlas_3_7():
    rows = orbit_atlas(3, 7)
    assert [(str(r.label), r.projective_dim) for r in rows] == [
        ("Grass", 12),
        ("SigmaTheta2", 19),
        ("Theta(3)", 24),
        ("Sigma(3)", 25),
    ]
    arrows = {(str(r.label), str(d)) for r in rows for d in r.closure_of}
    assert arrows == {("Grass", "SigmaTheta2"), ("SigmaTheta2", "Theta(3)"), ("Theta(3)", "Sigma(3)")}


def test_atlas_strata_count():
    # Grass, SigmaTheta2 and a Theta/Sigma pair for each 3 <= l <= k
    for k, n in [(3, 6), (4, 8), (4, 9)]:
        rows = orbit_atlas(k, n)
        assert len(rows) == 2 * k - 2
        dims = {r.label: r.projective_dim for r in rows}
        assert dims[Theta(k)] == dims[Sigma(k)] - 1 == 2 * k * (n - k)


def test_atlas_k2():
    rows = orbit_atlas(2, 6)
    assert [str(r.label) for r in rows] == ["Grass", "K2Rank(4)"]
