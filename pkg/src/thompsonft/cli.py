"""``tft``: JSON command-line frontend.

Every command prints one JSON document.  Floats carry 17 significant digits,
computed numbers are [re, im] pairs and exact dyadics are {"m", "k"}.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction

import numpy as np

from . import correlators as corr
from . import diffapprox, forest, semicont, tensorlab, thompson, trivalent
from .errors import ParameterError, TFTError


# ---------------------------------------------------------------- output

def _float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        return json.dumps(str(x))
    return format(x, ".17g") if x != int(x) or abs(x) >= 1e17 else f"{x:.1f}"


def _plain(obj):
    """Turn results into JSON-ready values with numbers kept exact where possible."""
    if isinstance(obj, Fraction):
        try:
            return forest.dyadic_json(obj)
        except TFTError:
            return {"num": obj.numerator, "den": obj.denominator}
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (forest.Tree, forest.Forest)):
        return str(obj)
    if hasattr(obj, "to_json"):
        return _plain(obj.to_json())
    return obj


def _flat(d: dict) -> bool:
    return all(not isinstance(x, (dict, list)) for x in d.values())


def _encode(v, indent=0) -> str:
    pad = "  " * (indent + 1)
    if isinstance(v, dict):
        if not v:
            return "{}"
        if _flat(v) and len(v) <= 3:
            return "{" + ", ".join(f"{json.dumps(k)}: {_encode(v[k])}" for k in sorted(v)) + "}"
        items = [f"{pad}{json.dumps(k)}: {_encode(v[k], indent + 1)}" for k in sorted(v)]
        return "{\n" + ",\n".join(items) + "\n" + "  " * indent + "}"
    if isinstance(v, list):
        if all(not isinstance(x, (dict, list)) for x in v):
            return "[" + ", ".join(_encode(x) for x in v) + "]"
        if all(isinstance(x, dict) and _flat(x) for x in v):
            return "[\n" + ",\n".join(pad + _encode(x) for x in v) + "\n" + "  " * indent + "]"
        items = [pad + _encode(x, indent + 1) for x in v]
        return "[\n" + ",\n".join(items) + "\n" + "  " * indent + "]"
    if isinstance(v, float):
        return _float(v)
    return json.dumps(v)


def dumps(obj) -> str:
    return _encode(_plain(obj)) + "\n"


def _pair(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


# ---------------------------------------------------------------- input parsing

def parse_element(text: str) -> thompson.GroupElement:
    """``gen:A``, ``id``, ``num/den@rot`` or an inline JSON object."""
    text = text.strip()
    if text.startswith("{"):
        return thompson.GroupElement.from_json(json.loads(text))
    if text in ("id", "identity", "1"):
        return thompson.identity_element()
    if text.startswith("gen:"):
        return thompson.generator(text[4:])
    if all(c in "ABC" for c in text):
        return thompson.compose_word(list(text))
    body, _, rot = text.partition("@")
    num, sep, den = body.partition("/")
    if not sep:
        raise ParameterError(f"cannot read group element {text!r}")
    return thompson.reduce(num, den, int(rot or 0))


def parse_points(text: str) -> list:
    return [corr.as_point(p) for p in text.split(",") if p.strip()]


def parse_labels(text: str) -> list:
    return [p.strip() for p in text.split(",") if p.strip()]


def _load_json(path_or_text: str):
    s = path_or_text.strip()
    if s.startswith("{") or s.startswith("["):
        return json.loads(s)
    with open(s) as fh:
        return json.load(fh)


def _tensor(args) -> tensorlab.Isometry3:
    if getattr(args, "tensor", None):
        return tensorlab.Isometry3.from_json(_load_json(args.tensor))
    name = args.preset or "qutrit"
    if name not in tensorlab.PRESETS:
        raise ParameterError(f"preset {name!r} has no tensor; use --preset qutrit")
    return tensorlab.preset(name)


def _system(args, V):
    if getattr(args, "tensor", None):
        sys_ = tensorlab.ascending_eigensystem(V, tol=args.tol)
        sys_.fusion = tensorlab.fusion_coefficients(sys_, V)
        return sys_
    return tensorlab.qutrit_system(V)


def _params(args) -> trivalent.TrivalentParams:
    if args.preset == "fibonacci":
        return trivalent.fibonacci()
    if args.d is None or args.b is None:
        raise ParameterError("give --d and --b (and --t), or --preset fibonacci")
    return trivalent.TrivalentParams(complex(args.d), complex(args.b), complex(args.t or 0),
                                     args.dim, tol=args.tol)


# ---------------------------------------------------------------- commands

def cmd_forest(args):
    if args.action == "compose":
        w = forest.compose(forest.parse_forest(args.w1), forest.parse_forest(args.w2))
        return {"result": str(w), "domain": w.domain, "codomain": w.codomain}
    if args.action == "tensor":
        w = forest.tensor(forest.parse_forest(args.w1), forest.parse_forest(args.w2))
        return {"result": str(w), "domain": w.domain, "codomain": w.codomain}
    u, tau, sigma = forest.join(args.w1, args.w2)
    return {"join": str(u), "tau": str(tau), "sigma": str(sigma),
            "partition": forest.tree_partition(u)}


def cmd_thompson(args):
    if args.action == "mul":
        out = parse_element(args.a)
        for other in [args.b] + (args.c or []):
            if other is None:
                raise ParameterError("mul needs --b")
            out = thompson.multiply(out, parse_element(other))
        return _element_json(out)
    if args.action == "inv":
        return _element_json(thompson.inverse(parse_element(args.a)))
    if args.action == "reduce":
        return _element_json(thompson.reduce(args.num, args.den, args.rot))
    if args.action == "gen":
        return _element_json(thompson.generator(args.name))
    if args.action == "topl":
        pl = thompson.element_to_pl(parse_element(args.a))
        return {"circle": pl.circle, "points": [list(p) for p in pl.points]}
    pts = [tuple(Fraction(str(c)) for c in p) for p in _load_json(args.points)]
    f = thompson.PLMap(tuple(pts), circle=args.circle)
    return _element_json(thompson.pl_to_element(f))


def _element_json(g):
    out = g.to_json()
    out["identity"] = g.leaves == 1
    out["in_F"] = g.in_F
    return out


def cmd_approx(args):
    if args.table:
        f, S, mode = diffapprox.from_table(args.table, args.mode), None, args.mode
        fprime = None
    else:
        f, fprime, S, mode = diffapprox.builtin(args.f)
    if args.action == "run":
        g = diffapprox.approximate(f, S, args.eps, mode)
        pl = thompson.element_to_pl(g)
        return {"element": g.to_json(), "eps": args.eps, "mode": mode,
                "valid": thompson.is_valid_pl(pl),
                "sup_error": diffapprox.sup_error(f, g, args.samples, mode),
                "breakpoints": len(pl.points)}
    if fprime is None:
        raise ParameterError("dist needs a builtin function with a known derivative")
    g = parse_element(args.element)
    return {"element": g.to_json(), "sup_error": diffapprox.sup_error(f, g, args.samples, mode),
            "derivative_distance": diffapprox.derivative_distance(fprime, g)}


def cmd_tensor(args):
    if args.preset == "fibonacci":
        if args.action not in ("eigen", "fusion"):
            raise ParameterError("the fibonacci preset supports eigen and fusion only")
        return trivalent.fib_ascending(tol=args.tol).to_json()
    V = _tensor(args)
    if args.action == "verify":
        out = tensorlab.verify_tensor(V, args.tol)
        out["d"] = V.d
        return out
    if args.action == "blob":
        vecs = [np.asarray(_load_json(args.vector), dtype=complex)] if args.vector \
            else tensorlab.qutrit_blobs()
        return {"blobs": [{"vector": v, "residual": tensorlab.blob_residual(V, v),
                           "verified": tensorlab.verify_blob(V, v, args.tol)} for v in vecs]}
    sys_ = _system(args, V)
    if args.action == "eigen":
        out = sys_.to_json()
        out["biorthogonality_residual"] = tensorlab.biorthogonality_residual(sys_)
        out["eigen_residual"] = tensorlab.eigen_residual(sys_, V)
        return out
    f = tensorlab.fusion_coefficients(sys_, V, args.convention)
    return {"labels": sys_.labels, "convention": args.convention,
            "fusion": {a: {b: [_pair(f[i, j, k]) for k in range(sys_.size)]
                           for j, b in enumerate(sys_.labels)}
                       for i, a in enumerate(sys_.labels)}}


def _state(source, V):
    if source is None or source == "vacuum":
        return semicont.vacuum(V)
    return semicont.LimitState.from_json(_load_json(source))


def cmd_state(args):
    V = _tensor(args)
    if args.action == "vacuum":
        return semicont.vacuum(V, args.tol).to_json()
    s = _state(args.state, V)
    if args.action == "act":
        out = semicont.act(parse_element(args.g), s, V)
        return {"state": out.to_json(), "norm": out.norm(),
                "distance_to_input": semicont.distance(out, s, V)}
    r = _state(args.other, V)
    return {"inner": semicont.inner(s, r, V), "distance": semicont.distance(s, r, V)}


def cmd_corr(args):
    if args.action == "metric":
        return corr.xor_and_tree_metric(args.x, args.y, args.level)
    if args.action == "support":
        pts = parse_points(args.points)
        return {"partition": corr.minimal_supporting_partition(pts),
                "tree": str(corr.support_tree(pts))}
    V = _tensor(args)
    sys_ = _system(args, V)
    if args.action == "npoint":
        state = parse_element(args.g) if args.g else None
        return corr.npoint_details(parse_points(args.points), parse_labels(args.alphas),
                                   sys_, V, state)
    if args.action == "twopoint":
        out = corr.two_point_closed_form(args.x, args.y, args.alpha, args.beta, sys_, V, args.m)
        if args.m is not None:
            n = 2 ** args.m
            ix, iy = (corr.as_point(p) * n for p in (args.x, args.y))
            if ix.denominator != 1 or iy.denominator != 1:
                raise ParameterError("with --m the points must be level-m leaves")
            ops = [(int(ix), corr.field_at_depth(sys_, sys_.index(args.alpha), 0)),
                   (int(iy), corr.field_at_depth(sys_, sys_.index(args.beta), 0))]
            out["oracle"] = corr.brute_force_npoint(V, args.m, ops)
            out["oracle_difference"] = abs(out["oracle"] - out["value"])
        else:
            out["direct"] = corr.npoint([args.x, args.y], [args.alpha, args.beta], sys_, V)
        return out
    if args.action == "ope":
        return corr.ope_table(sys_, V, args.tol)
    if args.action == "oracle":
        ops = []
        for item in parse_labels(args.ops):
            leaf, _, lab = item.partition(":")
            ops.append((int(leaf), corr.field_at_depth(sys_, sys_.index(lab), 0)))
        return {"m": args.m, "value": corr.brute_force_npoint(V, args.m, ops)}
    return corr.covariance_details(parse_element(args.g), parse_points(args.points),
                                   parse_labels(args.alphas), sys_, V)


_NAMED = {"circle": trivalent.circle, "theta": trivalent.theta,
          "lollipop": trivalent.lollipop_closed, "square": trivalent.square4,
          "vertex": trivalent.vertex_tangle, "strand": trivalent.strand_tangle,
          "cupcap": trivalent.cupcap}


def _diagram(source: str):
    if source in _NAMED:
        return _NAMED[source]()
    if source.startswith("beta4:"):
        return trivalent.beta4(int(source[6:]))
    return trivalent.Diagram.from_json(_load_json(source))


def cmd_trivalent(args):
    if args.action == "fib":
        return trivalent.fib_ascending(tol=args.tol).to_json()
    p = _params(args)
    if args.action == "reduce":
        r = trivalent.reduce(_diagram(args.diagram), p)
        if isinstance(r, trivalent.DiagramSum):
            return {"params": p, "terms": [{"coefficient": c, "diagram": D} for c, D in r.terms]}
        return {"params": p, "value": r}
    if args.action == "gram":
        names = parse_labels(args.diagrams) if args.diagrams else \
            [f"beta4:{i}" for i in range(1, 5)] + ["square"]
        G = trivalent.gram_matrix([_diagram(n) for n in names], p)
        out = {"params": p, "diagrams": names, "gram": G}
        if not args.diagrams:
            out["symbolic"] = trivalent.m41_symbolic(p)
            out["max_difference"] = float(np.abs(G - out["symbolic"]).max())
        return out
    coeffs, w = trivalent.square_window(p, printed=args.printed)
    return {"params": p, "coefficients": coeffs, "window": w}


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    def flags(parser, default):
        parser.add_argument("--tol", type=float, default=default(1e-9))
        parser.add_argument("--preset", choices=["qutrit", "fibonacci"], default=default(None))
        parser.add_argument("--out", default=default(None))

    # global flags may come before or after the subcommand
    common = argparse.ArgumentParser(add_help=False)
    flags(common, lambda v: argparse.SUPPRESS)
    ap = argparse.ArgumentParser(prog="tft", description="Thompson-group field theory toolkit")
    flags(ap, lambda v: v)
    sub = ap.add_subparsers(dest="module", required=True)

    def group(name, actions, handler):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("action", choices=actions)
        p.set_defaults(handler=handler)
        return p

    p = group("forest", ["compose", "tensor", "join"], cmd_forest)
    p.add_argument("--w1", required=True)
    p.add_argument("--w2", required=True)

    p = group("thompson", ["mul", "inv", "reduce", "topl", "frompl", "gen"], cmd_thompson)
    p.add_argument("--a", default="id")
    p.add_argument("--b")
    p.add_argument("--c", action="append")
    p.add_argument("--num", default="*")
    p.add_argument("--den", default="*")
    p.add_argument("--rot", type=int, default=0)
    p.add_argument("--name", default="A")
    p.add_argument("--points", default="[[0, 0], [1, 1]]")
    p.add_argument("--circle", action="store_true")

    p = group("approx", ["run", "dist"], cmd_approx)
    p.add_argument("--f", default="quadratic")
    p.add_argument("--table")
    p.add_argument("--mode", default="interval", choices=["interval", "circle"])
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--samples", type=int, default=10 ** 4)
    p.add_argument("--element", default="id")

    p = group("tensor", ["verify", "eigen", "fusion", "blob"], cmd_tensor)
    p.add_argument("--tensor")
    p.add_argument("--vector")
    p.add_argument("--convention", default="dual", choices=["dual", "projection"])

    p = group("state", ["vacuum", "act", "inner"], cmd_state)
    p.add_argument("--tensor")
    p.add_argument("--state", default="vacuum")
    p.add_argument("--other", default="vacuum")
    p.add_argument("--g", default="id")

    p = group("corr", ["metric", "support", "npoint", "twopoint", "ope", "oracle",
                       "covariance"], cmd_corr)
    p.add_argument("--tensor")
    p.add_argument("--x", default="0")
    p.add_argument("--y", default="1/2")
    p.add_argument("--level", type=int, default=5)
    p.add_argument("--points", default="")
    p.add_argument("--alphas", default="")
    p.add_argument("--alpha", default="1")
    p.add_argument("--beta", default="1")
    p.add_argument("--m", type=int)
    p.add_argument("--ops", default="")
    p.add_argument("--g")

    p = group("trivalent", ["reduce", "gram", "square", "fib"], cmd_trivalent)
    p.add_argument("--d", type=complex)
    p.add_argument("--b", type=complex)
    p.add_argument("--t", type=complex)
    p.add_argument("--dim", type=int, default=4)
    p.add_argument("--diagram", default="theta")
    p.add_argument("--diagrams")
    p.add_argument("--printed", action="store_true")
    return ap


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)      # exits with 2 on usage errors
    if args.module == "corr" and args.action == "oracle" and args.m is None:
        parser.error("corr oracle needs --m")
    try:
        result = args.handler(args)
    except (TFTError, ValueError, KeyError, IndexError, OSError) as exc:
        code = getattr(exc, "code", type(exc).__name__)
        sys.stdout.write(dumps({"error": {"code": code, "type": type(exc).__name__,
                                          "message": str(exc).strip("'\"")}}))
        return 1
    text = dumps(result)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
