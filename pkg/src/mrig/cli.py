"""Command-line front end: model ingestion, subcommands, deterministic seeding.

Model files are JSON objects {"n": int, "w": [[i, j, w_ij], ...],
"a": [...], "b": [...]} with 0-based indices and upper-triangle entries
only.  Exit codes: 2 usage, 3 model validation, 4 not in cone, 5 failed
verification.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import gstz, integrals
from .linalg import ModelError, NotInConeError, build_weight_matrix

EXIT_USAGE = 2
EXIT_MODEL = 3
EXIT_NOT_IN_CONE = 4
EXIT_VERIFY_FAILED = 5


# ---------------------------------------------------------------------------
# Serialization: all numeric output carries 17 significant digits.


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        f = float(v)
        if math.isnan(f) or math.isinf(f):
            return "null"
        return f"{f:.17g}"
    if v is None:
        return "null"
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, np.ndarray):
        v = v.tolist()
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_fmt(e) for e in v) + "]"
    if isinstance(v, dict):
        return "{" + ", ".join(f"{json.dumps(k)}: {_fmt(e)}" for k, e in v.items()) + "}"
    raise TypeError(f"cannot serialize {type(v)!r}")


def emit(obj) -> None:
    sys.stdout.write(_fmt(obj) + "\n")


# ---------------------------------------------------------------------------
# Model file handling


def load_model(path: str) -> gstz.GstzParams:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ModelError(f"cannot read model file {path}: {exc}") from exc
    for key in ("n", "w", "a", "b"):
        if key not in raw:
            raise ModelError(f"model file missing field {key!r}")
    W = build_weight_matrix(int(raw["n"]), [(int(i), int(j), float(v)) for i, j, v in raw["w"]])
    return gstz.GstzParams(np.asarray(raw["a"], float), np.asarray(raw["b"], float), W)


def model_dict(p: gstz.GstzParams) -> dict:
    return {
        "n": p.n,
        "w": [[i, j, p.W.w[i, j]] for i, j in p.W.edges],
        "a": p.a,
        "b": p.b,
    }


def _parse_vector(text: str, name: str) -> np.ndarray:
    try:
        return np.array([float(tok) for tok in text.split(",")], dtype=float)
    except ValueError as exc:
        raise ModelError(f"cannot parse {name} vector {text!r}") from exc


def _threads(args) -> int:
    if args.threads is not None:
        return args.threads
    return int(os.environ.get("MRIG_THREADS", "1"))


# ---------------------------------------------------------------------------
# Subcommands


def cmd_density(args):
    p = load_model(args.model)
    x = _parse_vector(args.at, "--at")
    ld = gstz.log_density(p, x)
    in_cone = np.isfinite(ld)
    emit({"log_density": ld if in_cone else None, "in_cone": bool(in_cone)})
    return 0 if in_cone else EXIT_NOT_IN_CONE


def cmd_sample(args):
    p = load_model(args.model)
    rng = np.random.default_rng(args.seed)
    draws = gstz.sample(p, rng, args.count)
    if args.out == "csv":
        for row in draws:
            sys.stdout.write(",".join(f"{v:.17g}" for v in row) + "\n")
    else:
        for row in draws:
            emit(list(row))
    return 0


def cmd_laplace(args):
    p = load_model(args.model)
    s = _parse_vector(args.s, "--s")
    emit({"value": gstz.laplace(p, s)})
    return 0


def cmd_moments(args):
    p = load_model(args.model)
    mean, cov = gstz.moments(p)
    emit({"mean": mean, "cov": cov})
    return 0


def cmd_marginalize(args):
    p = load_model(args.model)
    emit(model_dict(gstz.marginalize(p, args.keep)))
    return 0


def cmd_condition(args):
    p = load_model(args.model)
    head = _parse_vector(args.given, "--given")
    res = gstz.condition(p, head)
    emit(
        {
            "alpha": res.tail_params.a,
            "beta": res.tail_params.b,
            "gamma": res.shift,
            "w_tilde": res.tail_params.W.w,
        }
    )
    return 0


def cmd_tree_integral(args):
    p = load_model(args.model)
    closed = integrals.tree_integral_closed_y(p.W, p.a**2, args.q)
    est = integrals.quad_tree_integral(p.W, p.a**2, args.q)
    ok = abs(est.value - closed) <= args.tol * abs(closed) + est.error
    emit({"closed_form": closed, "quadrature": est.value, "pass": bool(ok)})
    return 0 if ok else EXIT_VERIFY_FAILED


def cmd_orthant(args):
    p = load_model(args.model)
    x = _parse_vector(args.at, "--at")
    try:
        if args.method == "conv":
            est = integrals.orthant_via_convolution(p.W, x)
        else:
            est = integrals.chunked_mc(
                lambda rng, k: integrals.orthant_mc(p.W, x, rng, k),
                args.seed,
                args.count,
                threads=_threads(args),
            )
    except NotInConeError:
        raise
    emit({"value": est.value, "error": est.error})
    return 0


def _verify_pair(lhs_est, rhs, tol):
    err = abs(lhs_est.value - rhs)
    ok = err <= tol * abs(rhs) + 3.0 * lhs_est.error
    return {
        "lhs": lhs_est.value,
        "rhs": rhs,
        "error": err,
        "pass": bool(ok),
    }


def cmd_verify(args):
    p = load_model(args.model)
    tol = args.tol
    threads = _threads(args)
    ident = args.identity
    if ident == "gstz":
        rhs = integrals.gstz_rhs(p.a, p.b)
        if p.n <= 2:
            est = integrals.quad_gstz_lhs(p.W, p.a, p.b)
        else:
            est = integrals.chunked_mc(
                lambda rng, k: integrals.mc_gstz_lhs(p.W, p.a, p.b, rng, k),
                args.seed,
                args.count,
                threads=threads,
            )
        result = _verify_pair(est, rhs, tol)
    elif ident == "stz":
        y = p.a**2
        rhs = integrals.stz_rhs(p.W, y)
        if p.n <= 2:
            est = integrals.quad_stz_lhs(p.W, y)
        else:
            est = integrals.chunked_mc(
                lambda rng, k: integrals.mc_stz_lhs(p.W, y, rng, k),
                args.seed,
                args.count,
                threads=threads,
            )
        result = _verify_pair(est, rhs, tol)
    elif ident == "tree":
        rhs = integrals.tree_integral_closed_y(p.W, p.a**2, args.q)
        est = integrals.quad_tree_integral(p.W, p.a**2, args.q)
        result = _verify_pair(est, rhs, tol)
    elif ident == "orthant":
        if args.at is None:
            raise ModelError("verify --identity orthant requires --at")
        x = _parse_vector(args.at, "--at")
        conv = integrals.orthant_via_convolution(p.W, x)
        mc = integrals.chunked_mc(
            lambda rng, k: integrals.orthant_mc(p.W, x, rng, k),
            args.seed,
            args.count,
            threads=threads,
        )
        err = abs(conv.value - mc.value)
        ok = err <= tol + 3.0 * (mc.error + conv.error)
        result = {"lhs": conv.value, "rhs": mc.value, "error": err, "pass": bool(ok)}
    elif ident == "hhh":
        est, rhs = integrals.orthant_laplace_check(p.W, p.a**2, p.b)
        result = _verify_pair(est, rhs, tol)
    elif ident == "arccos":
        if args.at is None:
            raise ModelError("verify --identity arccos requires --at")
        if p.n != 2:
            raise ModelError("the arccos identity is the n = 2 case")
        x = _parse_vector(args.at, "--at")
        conv = integrals.orthant_via_convolution(p.W, x)
        rhs = float(
            np.arccos(p.W.w[0, 1] / (2.0 * np.sqrt(x[0] * x[1]))) / (2.0 * np.pi)
        )
        result = _verify_pair(conv, rhs, tol)
    else:  # pragma: no cover - argparse restricts choices
        raise ModelError(f"unknown identity {ident!r}")
    emit(result)
    return 0 if result["pass"] else EXIT_VERIFY_FAILED


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mrig",
        description="Multivariate reciprocal inverse Gaussian distributions "
        "and their numerical verification harness.",
    )
    parser.add_argument("--threads", type=int, default=None, help="Monte Carlo worker threads (default: MRIG_THREADS or 1)")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, **kwargs):
        sp = sub.add_parser(name, **kwargs)
        sp.add_argument("--model", required=True, help="path to a model JSON file")
        sp.set_defaults(fn=fn)
        return sp

    sp = add("density", cmd_density, help="log density at a point")
    sp.add_argument("--at", required=True, help="comma-separated coordinates")

    sp = add("sample", cmd_sample, help="draw samples")
    sp.add_argument("--count", type=int, required=True)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--out", choices=["csv", "jsonl"], default="jsonl")

    sp = add("laplace", cmd_laplace, help="Laplace transform at s")
    sp.add_argument("--s", required=True, help="comma-separated transform argument")

    add("moments", cmd_moments, help="mean vector and covariance matrix")

    sp = add("marginalize", cmd_marginalize, help="emit the head-marginal model")
    sp.add_argument("--keep", type=int, required=True)

    sp = add("condition", cmd_condition, help="conditional tail parameters")
    sp.add_argument("--given", required=True, help="comma-separated head coordinates")

    sp = add("verify", cmd_verify, help="check a closed-form identity numerically")
    sp.add_argument(
        "--identity",
        required=True,
        choices=["gstz", "stz", "tree", "orthant", "hhh", "arccos"],
    )
    sp.add_argument("--tol", type=float, default=5e-3)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--count", type=int, default=1_000_000, help="MC sample size")
    sp.add_argument("--q", type=float, default=1.0, help="determinant exponent for --identity tree")
    sp.add_argument("--at", default=None, help="evaluation point for orthant/arccos")

    sp = add("tree-integral", cmd_tree_integral, help="tree integral: closed form vs quadrature")
    sp.add_argument("--q", type=float, required=True)
    sp.add_argument("--tol", type=float, default=5e-3)

    sp = add("orthant", cmd_orthant, help="Gaussian orthant probability")
    sp.add_argument("--at", required=True, help="comma-separated coordinates")
    sp.add_argument("--method", choices=["conv", "mc"], default="conv")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--count", type=int, default=1_000_000)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except NotInConeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_IN_CONE
    except ModelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MODEL


if __name__ == "__main__":
    sys.exit(main())
