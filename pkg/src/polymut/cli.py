"""Command-line surface: JSON in, JSON (or tables) out.

Exit codes: 0 success, 1 domain error (with a JSON error object on
stdout), 2 usage error.  Output is byte-deterministic for fixed inputs:
keys are sorted and every rational is a reduced-fraction string.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import warnings
from pathlib import Path

from .errors import DomainError
from . import deform, divpoly, fano, laurent, mutation
from .geom import (
    Polygon,
    Vector2,
    area,
    dual,
    fraction_str,
    parse_vertices,
    polygon_from_json,
    polygon_to_json,
)


def _emit(obj, fmt: str) -> None:
    if fmt == "table":
        print(_tableize(obj))
    else:
        print(json.dumps(obj, sort_keys=True, separators=(", ", ": ")))


def _tableize(obj, indent: str = "") -> str:
    lines = []
    if isinstance(obj, dict):
        for k in sorted(obj):
            v = obj[k]
            if isinstance(v, (dict, list)):
                lines.append(f"{indent}{k}:")
                lines.append(_tableize(v, indent + "  "))
            else:
                lines.append(f"{indent}{k}: {v}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, (dict, list)):
                lines.append(_tableize(v, indent + "  "))
                lines.append(indent + "-")
            else:
                lines.append(f"{indent}- {v}")
    else:
        lines.append(f"{indent}{obj}")
    return "\n".join(l for l in lines if l)


def _read_json_arg(arg: str):
    """Accept inline JSON, a file path, or '-' for stdin."""
    text = arg
    if arg == "-":
        text = sys.stdin.read()
    elif not arg.lstrip().startswith("{") and os.path.exists(arg):
        text = Path(arg).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise DomainError(f"invalid JSON: {e}") from e


def _read_polygon(arg: str) -> Polygon:
    return polygon_from_json(_read_json_arg(arg))


def _parse_w(s: str) -> Vector2:
    try:
        p, q = s.split(",")
        return Vector2(int(p), int(q))
    except (ValueError, TypeError) as e:
        raise DomainError(f"--w expects 'p,q' integers: {s!r}") from e


def _parse_weights(s: str) -> tuple[int, int, int]:
    try:
        a, b, c = (int(x) for x in s.split(","))
        return a, b, c
    except (ValueError, TypeError) as e:
        raise DomainError(f"--weights expects 'a,b,c' integers: {s!r}") from e


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="polymut",
        description="combinatorial mutations of Fano polygons and the matching toric deformations",
    )
    ap.add_argument("--format", choices=("json", "table"), default="json")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, **kw):
        p = sub.add_parser(name, **kw)
        p.add_argument(
            "--format", choices=("json", "table"), default=argparse.SUPPRESS
        )
        return p

    p = add("hull", help="convex hull of a point set")
    p.add_argument("--points", required=True, help="polygon JSON whose vertices are hulled")

    p = add("dual", help="polar dual of a polygon with interior origin")
    p.add_argument("--polygon", required=True)

    p = add("weights", help="fake-plane weights of a Fano triangle (input vertex order)")
    p.add_argument("--polygon", required=True)

    p = add("multiplicity", help="index of the vertex sublattice of a Fano triangle")
    p.add_argument("--polygon", required=True)

    p = add("triangle", help="Fano triangle with given pairwise-coprime weights")
    p.add_argument("--weights", required=True)

    p = add("factors", help="mutation factors of a Fano polygon")
    p.add_argument("--polygon", required=True)
    p.add_argument("--w", help="height function p,q (default: scan edge normals)")

    p = add("mutate", help="combinatorial mutation")
    p.add_argument("--polygon", required=True)
    p.add_argument("--w", required=True)
    p.add_argument("--t", type=int, default=1)

    p = add("graph", help="mutation graph of lattice-equivalence classes")
    p.add_argument("--polygon")
    p.add_argument("--weights")
    p.add_argument("--depth", type=int, required=True)

    p = add("markov", help="Markov triples within a Vieta-step depth")
    p.add_argument("--depth", type=int, required=True)

    p = add("diophantine", help="Diophantine class of a weight triple")
    p.add_argument("--weights", required=True)

    p = add("laurent-mutate", help="algebraic mutation of a Laurent polynomial")
    p.add_argument("--f", required=True)
    p.add_argument("--g", required=True)
    p.add_argument("--divide", choices=("x", "y"), required=True)

    p = add("period", help="period sequence (constant terms of powers)")
    p.add_argument("--f", required=True)
    p.add_argument("--dmax", type=int, required=True)

    p = add("divpoly", help="divisorial polytope of a lattice polygon")
    p.add_argument("--polygon", required=True)

    p = add("deform", help="mutation-to-deformation pipeline with certificate")
    p.add_argument("--polygon")
    p.add_argument("--weights")
    p.add_argument("--w")
    p.add_argument("--t", type=int, default=1)
    p.add_argument("--dilation", default="auto", help="'auto' or a positive integer")

    p = add("check-corollary", help="re-check the corollary clauses of a certificate")
    p.add_argument("--certificate", required=True, help="certificate JSON (inline, path, or '-')")

    p = add("batch-verify", help="run the cross-module checks over a corpus directory")
    p.add_argument("corpus")

    return ap


def _cmd_hull(args) -> dict:
    pts = parse_vertices(_read_json_arg(args.points))
    return polygon_to_json(Polygon(pts))


def _cmd_dual(args) -> dict:
    return polygon_to_json(dual(_read_polygon(args.polygon)))


def _cmd_weights(args) -> dict:
    verts = parse_vertices(_read_json_arg(args.polygon))
    if len(verts) != 3:
        raise fano.NotATriangle("weights need exactly three vertices")
    P = Polygon(verts)
    if not fano.is_fano(P):
        raise fano.NotFano("weights are defined for Fano triangles only")
    return {"weights": list(fano.weights_of_vertices(*verts))}


def _cmd_multiplicity(args) -> dict:
    P = _read_polygon(args.polygon)
    return {"multiplicity": fano.multiplicity(P), "weights": sorted(fano.weights(P))}


def _cmd_triangle(args) -> dict:
    return polygon_to_json(fano.triangle_from_weights(_parse_weights(args.weights)))


def _cmd_factors(args) -> dict:
    P = _read_polygon(args.polygon)
    if args.w:
        ws = [_parse_w(args.w)]
    else:
        ws = mutation.factor_directions(P)
    out = []
    for w in ws:
        for md in mutation.find_factors(P, w):
            out.append(md.to_json())
    return {"factors": out, "directions": [[str(w.x), str(w.y)] for w in ws]}


def _cmd_mutate(args) -> dict:
    P = _read_polygon(args.polygon)
    md = mutation.factor_for(P, _parse_w(args.w), args.t)
    Q = mutation.mutate(P, md)
    return {"polygon": polygon_to_json(Q), "certificate": md.to_json()}


def _triangle_arg(args) -> Polygon:
    if getattr(args, "polygon", None):
        return _read_polygon(args.polygon)
    if getattr(args, "weights", None):
        return fano.triangle_from_weights(_parse_weights(args.weights))
    raise DomainError("need --polygon or --weights")


def _cmd_graph(args) -> dict:
    P = _triangle_arg(args)
    return mutation.mutation_graph(P, args.depth).to_json()


def _cmd_markov(args) -> list:
    return [list(t) for t in sorted(fano.markov_tree(args.depth))]


def _cmd_diophantine(args) -> dict:
    return fano.diophantine_class(_parse_weights(args.weights)).to_json()


def _cmd_laurent_mutate(args) -> dict:
    f = laurent.parse(args.f)
    spec = laurent.MutationSpec(args.divide, laurent.parse(args.g))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        g = laurent.algebraic_mutate(f, spec)
    md, shear = laurent.derive_mutation_data(f, spec)
    out = {
        "mutated": laurent.render(g),
        "newton_before": polygon_to_json(laurent.newton_polytope(f)),
        "newton_after": polygon_to_json(laurent.newton_polytope(g)),
        "mutation_data": md.to_json(),
        "factor_shear": [fraction_str(shear.x), fraction_str(shear.y)],
    }
    if caught:
        out["warnings"] = sorted(str(w.message) for w in caught)
    return out


def _cmd_period(args) -> list:
    f = laurent.parse(args.f)
    return [fraction_str(c) for c in laurent.period_sequence(f, args.dmax)]


def _cmd_divpoly(args) -> dict:
    return divpoly.from_polygon(_read_polygon(args.polygon)).to_json()


def _cmd_deform(args) -> dict:
    P = _triangle_arg(args)
    if args.w:
        md = mutation.factor_for(P, _parse_w(args.w), args.t)
    else:
        md = _default_reducing_factor(P)
    dil = None if args.dilation == "auto" else int(args.dilation)
    cert = deform.mutation_to_deformation(P, md, dil)
    return cert.to_json()


def _default_reducing_factor(P: Polygon) -> mutation.MutationData:
    for w in mutation.factor_directions(P):
        for md in mutation.find_factors(P, w):
            if deform.is_weight_reducing(P, md):
                return md
    raise DomainError("no weight-decreasing mutation exists for this triangle")


def _cmd_check_corollary(args) -> dict:
    obj = _read_json_arg(args.certificate)
    if "decomposition" not in obj:
        raise DomainError("certificate JSON needs a 'decomposition' entry")
    dobj = obj["decomposition"]
    d = deform.Decomposition(
        divpoly.PointLabel.parse(dobj["label"]),
        divpoly.PLFunc.from_json(dobj["part0"]),
        divpoly.PLFunc.from_json(dobj["part1"]),
    )
    return deform.corollary_check(d).to_json()


# --- batch verification -----------------------------------------------------

def batch_verify(corpus: str) -> dict:
    """Cross-module invariants over a directory of JSON entries: duality
    commutation, Diophantine constancy, period invariance, and deformation
    certificates, with a pass/fail matrix."""
    results = []
    root = Path(corpus)
    if not root.is_dir():
        raise DomainError(f"corpus directory not found: {corpus}")
    for path in sorted(root.glob("*.json")):
        try:
            obj = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError) as e:
            results.append(_entry(path, "parse", "error", str(e)))
            continue
        try:
            results.extend(_verify_entry(path, obj))
        except DomainError as e:
            results.append(_entry(path, "verify", "error", str(e)))
    failed = sum(1 for r in results if r["status"] != "pass")
    return {"results": results, "passed": len(results) - failed, "failed": failed}


def _entry(path: Path, check: str, status: str, detail: str = "") -> dict:
    return {"file": path.name, "check": check, "status": status, "detail": detail}


def _verify_entry(path: Path, obj) -> list[dict]:
    if not isinstance(obj, dict):
        return [_entry(path, "parse", "error", "entry must be a JSON object")]
    if "laurent" in obj:
        return _verify_laurent(path, obj)
    if "weights" in obj:
        T = fano.triangle_from_weights(tuple(obj["weights"]))
    elif "vertices" in obj:
        T = polygon_from_json(obj)
    else:
        return [_entry(path, "parse", "error", "expected 'weights', 'vertices' or 'laurent'")]
    return _verify_polygon(path, T)


def _verify_polygon(path: Path, T: Polygon) -> list[dict]:
    out = []
    ok = dual(dual(T)) == T
    out.append(_entry(path, "dual-involution", "pass" if ok else "fail"))
    if len(T.vertices) == 3:
        cls = fano.diophantine_class(fano.weights(T))
    else:
        cls = None
    for w in mutation.factor_directions(T):
        for md in mutation.find_factors(T, w):
            tag = f"w={w} t={md.t}"
            Q = mutation.mutate(T, md)
            ok = area(dual(Q)) == area(dual(T))
            out.append(_entry(path, f"dual-area [{tag}]", "pass" if ok else "fail"))
            ok = dual(mutation.dual_map(md.pl_map, dual(T))) == Q
            out.append(_entry(path, f"duality-commutation [{tag}]", "pass" if ok else "fail"))
            if cls is not None and len(Q.vertices) == 3:
                ok = fano.diophantine_class(fano.weights(Q)) == cls
                out.append(_entry(path, f"diophantine-constancy [{tag}]", "pass" if ok else "fail"))
            if len(T.vertices) == 3 and deform.is_weight_reducing(T, md):
                try:
                    cert = deform.mutation_to_deformation(T, md)
                    ok = cert.corollary.passed
                    out.append(_entry(path, f"deformation-certificate [{tag}]", "pass" if ok else "fail"))
                except DomainError as e:
                    out.append(_entry(path, f"deformation-certificate [{tag}]", "fail", str(e)))
    return out


def _verify_laurent(path: Path, obj) -> list[dict]:
    out = []
    f = laurent.parse(obj["laurent"])
    spec = laurent.MutationSpec(obj.get("divide", "y"), laurent.parse(obj["g"]))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        g = laurent.algebraic_mutate(f, spec)
    ok = laurent.period_sequence(f, 8) == laurent.period_sequence(g, 8)
    out.append(_entry(path, "period-invariance", "pass" if ok else "fail"))
    md, shear = laurent.derive_mutation_data(f, spec)
    Q = mutation.mutate(laurent.newton_polytope(f), md)
    if not shear.is_zero():
        Q = Polygon([v + shear.scale(md.w.dot(v)) for v in Q.vertices])
    ok = laurent.newton_polytope(g) == Q
    out.append(_entry(path, "newton-compatibility", "pass" if ok else "fail"))
    return out


_COMMANDS = {
    "hull": _cmd_hull,
    "dual": _cmd_dual,
    "weights": _cmd_weights,
    "multiplicity": _cmd_multiplicity,
    "triangle": _cmd_triangle,
    "factors": _cmd_factors,
    "mutate": _cmd_mutate,
    "graph": _cmd_graph,
    "markov": _cmd_markov,
    "diophantine": _cmd_diophantine,
    "laurent-mutate": _cmd_laurent_mutate,
    "period": _cmd_period,
    "divpoly": _cmd_divpoly,
    "deform": _cmd_deform,
    "check-corollary": _cmd_check_corollary,
}


def main(argv: list[str] | None = None) -> int:
    ap = _build_parser()
    args = ap.parse_args(argv)
    try:
        if args.command == "batch-verify":
            report = batch_verify(args.corpus)
            _emit(report, args.format)
            return 1 if report["failed"] else 0
        out = _COMMANDS[args.command](args)
        _emit(out, args.format)
        return 0
    except DomainError as e:
        print(json.dumps({"error": {"type": type(e).__name__, "message": str(e)}}, sort_keys=True))
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
