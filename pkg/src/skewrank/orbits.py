"""Orbit representatives, classification into strata and orbit dimensions."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    GradeMismatch,
    IrrationalSplit,
    NotSecant,
    NotTangent,
    OutOfRange,
    SplitFailed,
    VerificationFailure,
    ZeroTensor,
)
from .exterior import DualForm, Multivector, _sort_sign, span_dim
from .grassmann import GrassPoint, gl_act, gl_generators, pluecker_embed
from .identifiability import (
    SecantDecomposition,
    decompose_secant,
    reduce_tensor,
    skew_rank,
    tangential_locus,
)
from .linalg import Subspace

__all__ = [
    "OrbitLabel",
    "ClassificationReport",
    "representative",
    "q3",
    "classify",
    "orbit_dim",
    "orbit_atlas",
    "AtlasRow",
    "expected_projective_dim",
    "label_representative",
    "Sigma",
    "Theta",
    "GRASS",
    "SIGMA_THETA_2",
    "OUTSIDE",
]


@dataclass(frozen=True, order=True)
class OrbitLabel:
    kind: str
    l: int | None = None

    KINDS = ("Zero", "Grass", "SigmaTheta2", "Sigma", "Theta", "OutsideSigma2", "K2Rank")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown orbit kind {self.kind!r}")

    def __str__(self) -> str:
        return f"{self.kind}({self.l})" if self.l is not None else self.kind

    @classmethod
    def parse(cls, s: str) -> "OrbitLabel":
        if "(" in s:
            kind, rest = s.split("(", 1)
            return cls(kind, int(rest.rstrip(")")))
        return cls(s)

    @property
    def in_sigma2(self) -> bool:
        return self.kind not in ("OutsideSigma2", "Zero")


GRASS = OrbitLabel("Grass")
SIGMA_THETA_2 = OrbitLabel("SigmaTheta2")
OUTSIDE = OrbitLabel("OutsideSigma2")


def Sigma(l: int) -> OrbitLabel:
    return OrbitLabel("Sigma", l)


def Theta(l: int) -> OrbitLabel:
    return OrbitLabel("Theta", l)


@dataclass(frozen=True)
class ClassificationReport:
    label: OrbitLabel
    common_kernel: Subspace
    reduced_ambient: Subspace
    checked: bool
    decomposition: SecantDecomposition | None = None
    tangency: tuple[GrassPoint, ...] = ()
    point: GrassPoint | None = None
    skew_rank: int | None = None
    discriminant: Fraction | None = None
    notes: tuple[str, ...] = ()

    @property
    def l(self) -> int | None:
        return self.label.l


# ------------------------------------------------------------------ representatives


def _check_range(l: int, k: int, n: int) -> None:
    if not (1 <= l <= k and 2 * k <= n):
        raise OutOfRange(f"need 1 <= l <= k <= N/2, got l={l}, k={k}, N={n}")


def representative(branch: str, l: int, k: int, n: int) -> Multivector:
    """s_l = omega + e_l (secant) or theta_l (tangent) on Gr(k, n)."""
    _check_range(l, k, n)
    omega = Multivector.basis(n, range(1, k + 1))
    if branch == "secant":
        far = list(range(1, k - l + 1)) + list(range(k + 1, k + l + 1))
        return omega + Multivector.basis(n, far)
    if branch == "tangent":
        terms: dict = {}
        for j in range(1, l + 1):
            seq = list(range(1, k + 1))
            seq[j - 1] = k + j
            s, key = _sort_sign(seq)
            terms[key] = s
        return Multivector(n, k, terms)
    raise OutOfRange(f"unknown branch {branch!r}")


def q3(k: int, n: int) -> Multivector:
    """The distance-3 tangent point e_2..e_k e_{k+1} - e_1 e_3..e_k e_{k+2} + e_1 e_2 e_4..e_k e_{k+3}."""
    if k < 3 or n < k + 3:
        raise OutOfRange("q3 needs k >= 3 and N >= k + 3")
    m1 = list(range(2, k + 1)) + [k + 1]
    m2 = [1] + list(range(3, k + 1)) + [k + 2]
    m3 = [1, 2] + list(range(4, k + 1)) + [k + 3]
    return Multivector(n, k, {tuple(m1): 1, tuple(m2): -1, tuple(m3): 1})


# ------------------------------------------------------------------ classification


def _full(n: int) -> Subspace:
    return Subspace.coordinate(n, range(1, n + 1))


def _classify_two_forms(t: Multivector) -> ClassificationReport:
    n = t.n
    r = skew_rank(t)
    zero = Subspace.zero(n)
    if r == 2:
        p = pluecker_embed(Subspace(n, [[c for c in row] for row in _skew_rows(t)]))
        return ClassificationReport(GRASS, zero, _full(n), True, point=p, skew_rank=2)
    if r == 4:
        dec = decompose_secant(t)
        return ClassificationReport(OrbitLabel("K2Rank", 4), zero, _full(n), True, decomposition=dec, skew_rank=4)
    return ClassificationReport(OUTSIDE, zero, _full(n), True, skew_rank=r,
                                notes=(f"skew rank {r} exceeds 4",))


def _skew_rows(t: Multivector):
    from .identifiability import skew_matrix

    return skew_matrix(t)


def classify(t: Multivector) -> ClassificationReport:
    """Stratum of t with exact witnesses; OutsideSigma2 when every recovery fails verification."""
    if not isinstance(t, Multivector) or isinstance(t, DualForm):
        raise GradeMismatch("expected a multivector")
    if not t:
        raise ZeroTensor("the zero tensor has no stratum")
    k, n = t.grade, t.n
    if k < 1:
        raise GradeMismatch("grade must be at least 1")
    if k == 1:
        p = pluecker_embed(Subspace(n, [t.dense()]))
        return ClassificationReport(GRASS, p.space, Subspace.zero(n), True, point=p)
    if k == 2:
        return _classify_two_forms(t)
    red = reduce_tensor(t)
    h = red.kernel
    w = Subspace.coordinate(n, red.complement)
    l = red.l
    if l == 0:
        return ClassificationReport(GRASS, h, w, True, point=pluecker_embed(h))
    if l == 1:
        raise VerificationFailure("kernel of codimension one inside a k-form is impossible")
    if l == 2:
        r = skew_rank(red.reduced)
        if r != 4:
            return ClassificationReport(OUTSIDE, h, w, True, skew_rank=r,
                                        notes=(f"reduced 2-form has skew rank {r}",))
        dec = decompose_secant(t)
        tan = tangential_locus(t)
        return ClassificationReport(SIGMA_THETA_2, h, w, True, decomposition=dec, tangency=tan.points, skew_rank=4)
    try:
        dec = decompose_secant(t)
        return ClassificationReport(Sigma(l), h, w, True, decomposition=dec)
    except IrrationalSplit as exc:
        return ClassificationReport(
            Sigma(l), h, w, True, discriminant=exc.discriminant,
            notes=("factor spaces are conjugate over a real quadratic extension; certified by the split-torus identity",),
        )
    except (NotSecant, SplitFailed) as exc:
        secant_note = str(exc)
    try:
        tan = tangential_locus(t)
        return ClassificationReport(Theta(l), h, w, True, tangency=tan.points)
    except NotTangent as exc:
        return ClassificationReport(OUTSIDE, h, w, True, notes=(f"secant: {secant_note}", f"tangent: {exc}"))


# ------------------------------------------------------------------ dimensions


def orbit_dim(t: Multivector) -> tuple[int, int]:
    """(affine cone dim, projective dim) of the GL(N)-orbit, via the span of gl(N).t."""
    if not t:
        raise ZeroTensor("orbit of the zero tensor")
    cone = span_dim(gl_act(g, t) for g in gl_generators(t.n))
    return cone, cone - 1


def expected_projective_dim(label: OrbitLabel, k: int, n: int) -> int:
    """Closed-form projective orbit dimensions."""
    grass = k * (n - k)
    if label == GRASS:
        return grass
    if label == SIGMA_THETA_2:
        return grass + 2 * (n - 2) - 3
    if label.kind == "Sigma":
        return grass + label.l * (n - label.l) + 1
    if label.kind == "Theta":
        return grass + label.l * (n - label.l)
    raise OutOfRange(f"no closed form for {label}")


@dataclass(frozen=True)
class AtlasRow:
    label: OrbitLabel
    projective_dim: int
    closure_of: tuple[OrbitLabel, ...]  # strata whose closure contains this one

    def __str__(self):
        return f"{self.label}: {self.projective_dim}"


def _strata(k: int) -> list[tuple[OrbitLabel, Multivector | None]]:
    out = [GRASS, SIGMA_THETA_2]
    for l in range(3, k + 1):
        out.append(Theta(l))
        out.append(Sigma(l))
    return out


def _arrows(k: int) -> list[tuple[OrbitLabel, OrbitLabel]]:
    """(source, target): source lies in the closure of target."""
    arrows = [(GRASS, SIGMA_THETA_2)]
    if k >= 3:
        arrows.append((SIGMA_THETA_2, Theta(3)))
    for l in range(3, k + 1):
        arrows.append((Theta(l), Sigma(l)))
        if l < k:
            arrows.append((Theta(l), Theta(l + 1)))
            arrows.append((Sigma(l), Sigma(l + 1)))
    return arrows


def label_representative(label: OrbitLabel, k: int, n: int) -> Multivector:
    if label == GRASS:
        return Multivector.basis(n, range(1, k + 1))
    if label == SIGMA_THETA_2:
        return representative("secant", 2, k, n)
    if label.kind == "Sigma":
        return representative("secant", label.l, k, n)
    if label.kind == "Theta":
        return representative("tangent", label.l, k, n)
    raise OutOfRange(f"no representative for {label}")


def orbit_atlas(k: int, n: int) -> list[AtlasRow]:
    """Strata of the secant variety of Gr(k, n) with computed dimensions and closure arrows."""
    if not (2 <= k and 2 * k <= n):
        raise OutOfRange(f"need 2 <= k <= N/2, got k={k}, N={n}")
    if k == 2:
        labels = [GRASS, OrbitLabel("K2Rank", 4)]
        reps = {GRASS: Multivector.basis(n, (1, 2)), labels[1]: representative("secant", 2, 2, n)}
        arrows = [(GRASS, labels[1])]
    else:
        labels = _strata(k)
        reps = {lab: label_representative(lab, k, n) for lab in labels}
        arrows = _arrows(k)
    dims = {lab: orbit_dim(reps[lab])[1] for lab in labels}
    for src, dst in arrows:
        if dims[src] >= dims[dst]:
            raise VerificationFailure(f"dimension does not increase along {src} -> {dst}")
    rows = []
    for lab in sorted(labels, key=lambda x: (dims[x], str(x))):
        rows.append(AtlasRow(lab, dims[lab], tuple(dst for src, dst in arrows if src == lab)))
    return rows
