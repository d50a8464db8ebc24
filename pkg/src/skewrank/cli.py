"""Command-line front end.

Every command prints a report (JSON by default, ``--format text`` for a
flat human-readable listing) and exits with

    0 success, 2 parse error, 3 invalid input, 4 wrong stratum,
    5 a certificate failed its own verification (a bug).
"""
from __future__ import annotations

import argparse
import os
import random
import sys
from math import comb
from typing import Any, Callable

from . import __version__
from .apolarity import (
    perp_dim,
    sigma2_cone_dim,
    smoothness_certificate,
    squared_degree_k_naive,
)
from .errors import SkewRankError, VerificationFailure, WrongStratum
from .exterior import Multivector, act_matrix
from .grassmann import (
    GrassPoint,
    distance_chain,
    grass_point,
    hamming_distance,
    random_unimodular,
)
from .identifiability import decompose_secant, tangential_locus, terracini_pair, unident_family
from .orbits import (
    classify,
    expected_projective_dim,
    orbit_atlas,
    orbit_dim,
    q3,
    representative,
)
from .tensorio import (
    ParseError,
    digest,
    dump_report,
    dump_tensor,
    format_rational,
    load_tensor,
    subspace_payload,
    tensor_to_dict,
)

SEED_ENV = "SKEWRANK_SEED"


# ------------------------------------------------------------------ payload helpers


def point_payload(p: GrassPoint) -> dict:
    return {"basis": subspace_payload(p.space), "pluecker": tensor_to_dict(p.pluecker)["terms"]}


def decomposition_payload(dec) -> dict:
    return {
        "p": point_payload(dec.p),
        "q": point_payload(dec.q),
        "coefficients": [format_rational(c) for c in dec.coefficients],
        "unique": dec.unique,
    }


def report_payload(rep) -> dict:
    return {
        "label": str(rep.label),
        "common_kernel": subspace_payload(rep.common_kernel),
        "common_kernel_dim": rep.common_kernel.dim,
        "reduced_ambient_dim": rep.reduced_ambient.dim,
        "checked": rep.checked,
        "decomposition": decomposition_payload(rep.decomposition) if rep.decomposition else None,
        "tangency_points": [point_payload(p) for p in rep.tangency],
        "grass_point": point_payload(rep.point) if rep.point else None,
        "skew_rank": rep.skew_rank,
        "discriminant": format_rational(rep.discriminant) if rep.discriminant is not None else None,
        "notes": list(rep.notes),
    }


# ------------------------------------------------------------------ input


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw == "":
        return 0
    try:
        return int(raw)
    except ValueError:
        raise ParseError(f"{SEED_ENV}={raw!r} is not an integer") from None


def _tensor(args, flag: str = "input") -> Multivector:
    path = getattr(args, flag, None)
    if path:
        return load_tensor(path)
    if args.branch is None or args.k is None or args.n is None:
        raise ParseError(f"give --{flag} FILE or --branch/--l/--k/--n")
    return _generate(args)


def _generate(args) -> Multivector:
    if args.branch == "q3":
        return q3(args.k, args.n)
    if args.l is None:
        raise ParseError("--l is required for secant/tangent representatives")
    return representative(args.branch, args.l, args.k, args.n)


def _check(flag: bool, what: str) -> None:
    if not flag:
        raise VerificationFailure(f"verification failed: {what}")


# ------------------------------------------------------------------ commands
# each returns (inputs, result, verification, formulas)


def cmd_classify(args, seed):
    t = _tensor(args)
    rep = classify(t)
    ver = {"checked": rep.checked}
    if rep.decomposition is not None:
        ver["reconstruction"] = rep.decomposition.reconstruct() == t
        _check(ver["reconstruction"], "decomposition does not reproduce the input")
    formulas = []
    if rep.l is not None and rep.label.kind in ("Sigma", "Theta"):
        formulas.append(f"dim H_t = k - l = {t.grade} - {rep.l} = {rep.common_kernel.dim}")
    if args.oracle:
        rng = random.Random(seed)
        g = random_unimodular(t.n, rng)
        moved = classify(act_matrix(g, t)).label
        scaled = classify(t.scale(-3)).label
        ver["oracle_transported_label"] = str(moved)
        ver["oracle_scaled_label"] = str(scaled)
        _check(moved == rep.label and scaled == rep.label, "label changed under the group or scaling")
    return [t], report_payload(rep), ver, formulas


def cmd_decompose(args, seed):
    t = _tensor(args)
    rep = classify(t)
    kind = rep.label.kind
    if kind in ("SigmaTheta2", "K2Rank"):
        decs = unident_family(t, samples=args.samples, seed=seed)
        unique = False
    elif kind == "Sigma":
        decs = [decompose_secant(t)]
        unique = True
    else:
        raise WrongStratum(f"{rep.label} has no secant decomposition")
    ok = all(d.reconstruct() == t for d in decs)
    _check(ok, "a decomposition does not reproduce the input")
    result = {"label": str(rep.label), "unique": unique, "decompositions": [decomposition_payload(d) for d in decs]}
    ver = {"reconstruction": ok, "distinct": len({d.spaces() for d in decs}) == len(decs)}
    formulas = []
    if unique:
        formulas.append("l >= 3: the pair of factor spaces is unique")
    else:
        formulas.append("l = 2: decompositions form a positive-dimensional family")
    if args.oracle and unique:
        again = decompose_secant(act_matrix(random_unimodular(t.n, random.Random(seed)), t))
        ver["oracle_transported_unique"] = again.unique
    return [t], result, ver, formulas


def cmd_tangential(args, seed):
    t = _tensor(args)
    rep = tangential_locus(t, samples=args.samples, seed=seed)
    from .identifiability import _in_tangent

    ok = all(_in_tangent(t, p) for p in rep.points)
    _check(ok, "a tangency point does not contain the input in its tangent space")
    result = {
        "points": [point_payload(p) for p in rep.points],
        "unique": rep.unique,
        "dimension_hint": rep.dimension_hint,
    }
    return [t], result, {"tangent_rank_test": ok}, []


def _two_points(args):
    p_t, q_t = load_tensor(args.p), load_tensor(args.q)
    return p_t, q_t, grass_point(p_t), grass_point(q_t)


def cmd_distance(args, seed):
    p_t, q_t, p, q = _two_points(args)
    d = hamming_distance(p, q)
    chain = distance_chain(p, q)
    steps = [hamming_distance(a, b) for a, b in zip(chain, chain[1:])]
    _check(all(s == 1 for s in steps), "chain steps are not lines")
    result = {"distance": d, "intersection_dim": p.k - d, "chain": [point_payload(c) for c in chain]}
    formulas = [f"d = k - dim(H_p ∩ H_q) = {p.k} - {p.k - d} = {d}"]
    return [p_t, q_t], result, {"chain_steps_are_lines": True}, formulas


def cmd_terracini(args, seed):
    p_t, q_t, p, q = _two_points(args)
    inside, span = terracini_pair(p, q)
    d = hamming_distance(p, q)
    k, n = p.k, p.n
    full = 2 * (k * (n - k) + 1)
    result = {
        "in_terracini": inside,
        "span_dim": span,
        "intersection_dim": full - span,
        "distance": d,
    }
    ver = {"matches_distance_criterion": inside == (d <= 2)}
    formulas = [f"generic span 2(k(N-k)+1) = {full}", "deficient exactly when d(p,q) <= 2"]
    return [p_t, q_t], result, ver, formulas


def cmd_orbit_dim(args, seed):
    t = _tensor(args)
    cone, proj = orbit_dim(t)
    rep = classify(t)
    result = {"label": str(rep.label), "cone_dim": cone, "projective_dim": proj}
    ver = {}
    formulas = []
    k, n = t.grade, t.n
    if rep.label.kind in ("Grass", "SigmaTheta2", "Sigma", "Theta") and k >= 3:
        exp = expected_projective_dim(rep.label, k, n)
        result["expected_projective_dim"] = exp
        ver["matches_closed_form"] = exp == proj
        formulas.append(_formula_text(rep.label, k, n, exp))
    if args.oracle:
        g = random_unimodular(n, random.Random(seed))
        ver["oracle_transported_equal"] = orbit_dim(act_matrix(g, t))[0] == cone
        _check(ver["oracle_transported_equal"], "orbit dimension changed under the group")
    return [t], result, ver, formulas


def _formula_text(label, k, n, value) -> str:
    if label.kind == "Grass":
        return f"k(N-k) = {value}"
    if label.kind == "SigmaTheta2":
        return f"k(N-k) + 2(N-2) - 3 = {value}"
    if label.kind == "Sigma":
        return f"k(N-k) + l(N-l) + 1 = {value}"
    return f"k(N-k) + l(N-l) = {value}"


def cmd_perp_dim(args, seed):
    t = _tensor(args)
    gdeg = None if args.generator_degree == "all" else int(args.generator_degree)
    value = perp_dim(t, gdeg)
    full = perp_dim(t, None)
    k, n = t.grade, t.n
    result = {
        "perp_dim": value,
        "generator_degree": args.generator_degree,
        "perp_dim_full_annihilator": full,
        "sigma2_cone_dim": sigma2_cone_dim(k, n),
    }
    ver = {}
    if args.oracle:
        naive = comb(n, k) - len(squared_degree_k_naive(t, gdeg))
        ver["oracle_naive_products"] = naive == value
        _check(naive == value, "fast and naive squared-ideal spans differ")
    formulas = [f"C(N,k) - dim (J^2)_k = {comb(n, k)} - {comb(n, k) - value} = {value}"]
    if k >= 3:
        formulas.append(f"2k(N-k) + 2 = {2 * k * (n - k) + 2}")
    return [t], result, ver, formulas


def cmd_smooth(args, seed):
    t = _tensor(args)
    cert = smoothness_certificate(t)
    result = {
        "label": str(cert.point_label),
        "verdict": cert.verdict,
        "reason": cert.reason,
        "lower_dim": cert.lower_dim,
        "upper_dim": cert.upper_dim,
        "span_dim": cert.span_dim,
        "sigma2_cone_dim": cert.sigma2_cone_dim,
        "contributing_points": [point_payload(p) for p in cert.contributing_points],
    }
    ver = {"sandwich_holds": cert.sandwich_holds}
    formulas = [f"cone dim of the secant variety = {cert.sigma2_cone_dim}"]
    return [t], result, ver, formulas


def cmd_atlas(args, seed):
    if args.k is None or args.n is None:
        raise ParseError("atlas needs --k and --n")
    rows = orbit_atlas(args.k, args.n)
    result = {
        "k": args.k,
        "n": args.n,
        "strata": [
            {"label": str(r.label), "projective_dim": r.projective_dim, "in_closure_of": [str(x) for x in r.closure_of]}
            for r in rows
        ],
    }
    return [], result, {"dims_increase_along_arrows": True}, []


COMMANDS: dict[str, Callable] = {
    "classify": cmd_classify,
    "decompose": cmd_decompose,
    "tangential": cmd_tangential,
    "distance": cmd_distance,
    "terracini": cmd_terracini,
    "orbit_dim": cmd_orbit_dim,
    "perp_dim": cmd_perp_dim,
    "smooth": cmd_smooth,
    "atlas": cmd_atlas,
}


# ------------------------------------------------------------------ rendering


def _flatten(prefix: str, value: Any, out: list[str]) -> None:
    if isinstance(value, dict):
        for key in sorted(value):
            _flatten(f"{prefix}.{key}" if prefix else key, value[key], out)
    elif isinstance(value, list) and value and isinstance(value[0], (dict, list)):
        for i, v in enumerate(value):
            _flatten(f"{prefix}[{i}]", v, out)
    else:
        if isinstance(value, list):
            value = "[" + ", ".join(map(str, value)) + "]"
        elif value is None:
            value = "-"
        elif isinstance(value, bool):
            value = "yes" if value else "no"
        out.append(f"{prefix}: {value}")


def render_text(report: dict) -> str:
    lines = [f"command: {report['command']}"]
    if report.get("input_digest"):
        lines.append(f"input: {report['input_digest']}")
    lines.append(f"seed: {report['seed']}")
    body: list[str] = []
    _flatten("", report["result"], body)
    lines += ["", "[result]"] + body
    ver: list[str] = []
    _flatten("", report["verification"], ver)
    if ver:
        lines += ["", "[verification]"] + ver
    if report.get("formulas"):
        lines += ["", "[formulas]"] + report["formulas"]
    return "\n".join(lines) + "\n"


def _echo(args) -> dict:
    keys = ("input", "p", "q", "branch", "l", "k", "n", "samples", "oracle", "generator_degree")
    return {k: getattr(args, k) for k in keys if getattr(args, k, None) not in (None, False)}


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default="json", help="report format")
    common.add_argument("--seed", type=int, default=None, help=f"random seed (default ${SEED_ENV} or 0)")
    common.add_argument("--oracle", action="store_true", help="run slow independent cross-checks")
    common.add_argument("--output", help="write the report here instead of stdout")

    gen = argparse.ArgumentParser(add_help=False)
    gen.add_argument("--input", help="tensor file (JSON)")
    gen.add_argument("--branch", choices=("secant", "tangent", "q3"), help="use a built-in representative")
    gen.add_argument("--l", type=int, help="distance l of the representative")
    gen.add_argument("--k", type=int, help="grade k")
    gen.add_argument("--n", type=int, help="ambient dimension N")

    parser = argparse.ArgumentParser(prog="skewrank", description="Exact computations on the secant variety of a Grassmannian.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("classify", parents=[common, gen], help="stratum of a tensor, with witnesses")
    p = sub.add_parser("decompose", parents=[common, gen], help="secant decomposition(s)")
    p.add_argument("--samples", type=int, default=5, help="decompositions to list in the non-unique case")
    p = sub.add_parser("tangential", parents=[common, gen], help="tangency points")
    p.add_argument("--samples", type=int, default=0, help="extra sampled tangency points for l = 2")
    for name, helptext in (("distance", "Hamming distance of two points"), ("terracini", "tangent-span test for two points")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--p", required=True, help="first decomposable tensor file")
        p.add_argument("--q", required=True, help="second decomposable tensor file")
    sub.add_parser("orbit_dim", aliases=["orbit-dim"], parents=[common, gen], help="orbit dimension via gl(N)")
    p = sub.add_parser("perp_dim", aliases=["perp-dim"], parents=[common, gen], help="perp of the squared annihilator ideal")
    p.add_argument("--generator-degree", default="2", help="degree bound for ideal generators, or 'all'")
    sub.add_parser("smooth", parents=[common, gen], help="smoothness certificate")
    p = sub.add_parser("atlas", parents=[common], help="table of strata")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p = sub.add_parser("representative", parents=[common], help="print a representative as a tensor file")
    p.add_argument("--branch", choices=("secant", "tangent", "q3"), required=True)
    p.add_argument("--l", type=int)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    return parser


_ALIASES = {"orbit-dim": "orbit_dim", "perp-dim": "perp_dim"}


def _write(args, text: str) -> None:
    if getattr(args, "output", None):
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    command = _ALIASES.get(args.command, args.command)
    try:
        seed = _seed(args)
        if command == "representative":
            _write(args, dump_tensor(_generate(args)))
            return 0
        if command == "perp_dim" and args.generator_degree != "all":
            try:
                int(args.generator_degree)
            except ValueError:
                raise ParseError("--generator-degree must be an integer or 'all'") from None
        inputs, result, ver, formulas = COMMANDS[command](args, seed)
        report = {
            "command": command,
            "arguments": _echo(args),
            "input_digest": digest(*inputs) if inputs else None,
            "result": result,
            "verification": ver,
            "formulas": formulas,
            "seed": seed,
            "version": __version__,
        }
        _write(args, render_text(report) if args.format == "text" else dump_report(report))
        return 0
    except SkewRankError as exc:
        sys.stderr.write(f"skewrank: {type(exc).__name__}: {exc}\n")
        return exc.exit_code
    except ValueError as exc:
        sys.stderr.write(f"skewrank: invalid input: {exc}\n")
        return 3


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
