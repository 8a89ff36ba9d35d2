"""Command-line interface.

Every subcommand prints one JSON object on stdout containing at least
``result``, ``tolerance``, and ``elapsed_ms``.  Exit status is 0 whenever
the evaluation succeeded (whatever the predicate says), 2 on malformed
input, 3 on numerical failure.  Floats are serialized with 17 significant
digits so identical runs produce identical bytes.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from . import algebra as alg_mod
from . import majorization as maj
from . import oracle as oracle_mod
from . import synthesis as syn
from .errors import InputError, NumericalError, OrbitHullError, ShapeMismatch

DEFAULT_TOL_FACTOR = 1e-9


def _tol_factor() -> float:
    raw = os.environ.get("ORBITHULL_TOL")
    if raw is None:
        return DEFAULT_TOL_FACTOR
    try:
        value = float(raw)
    except ValueError as exc:
        raise InputError(f"ORBITHULL_TOL={raw!r} is not a number") from exc
    if not (value > 0):
        raise InputError("ORBITHULL_TOL must be positive")
    return value


def _format_json(obj) -> str:
    """Deterministic JSON text: 17 significant digits for floats."""
    if isinstance(obj, float):
        if obj != obj or obj in (float("inf"), float("-inf")):
            raise NumericalError("non-finite value in output")
        return format(obj, ".17g")
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(_format_json(v) for v in obj) + "]"
    if isinstance(obj, dict):
        return "{" + ",".join(json.dumps(str(k)) + ":" + _format_json(v) for k, v in obj.items()) + "}"
    if isinstance(obj, np.floating):
        return _format_json(float(obj))
    raise TypeError(f"cannot serialize {type(obj)}")


def _load_element(path: str) -> alg_mod.HermitianElement:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc
    return alg_mod.element_from_obj(obj)


def _load_pair(path_a: str, path_b: str):
    a = _load_element(path_a)
    b = _load_element(path_b)
    if a.block_dims != b.block_dims:
        raise ShapeMismatch(f"block dimensions differ: {a.block_dims} vs {b.block_dims}")
    return alg_mod.algebra_of(a), a, b


def _tolerance_for(*elements) -> float:
    from .spectral import operator_norm

    scale = 1.0
    for x in elements:
        scale = max(scale, operator_norm(x))
    return _tol_factor() * scale


def _parse_dims(spec: str) -> list[int]:
    spec = spec.strip()
    if ".." in spec:
        lo, hi = spec.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(tok) for tok in spec.split(",") if tok]


def _parse_reals(spec: str) -> list[float]:
    return [float(tok) for tok in spec.split(",") if tok]


def _parse_ints(spec: str) -> list[int]:
    return [int(tok) for tok in spec.split(",") if tok]


def _combination_obj(comb: syn.ConvexCombination) -> dict:
    return {
        "weights": [float(w) for w in comb.weights],
        "unitaries": [
            {"blocks": [alg_mod.matrix_to_obj(blk) for blk in u]} for u in comb.unitaries
        ],
        "target_error": float(comb.target_error),
    }


def _emit(payload: dict, started: float) -> None:
    payload["elapsed_ms"] = (time.perf_counter() - started) * 1000.0
    sys.stdout.write(_format_json(payload) + "\n")


def _cmd_check_majorize(args, started) -> int:
    algebra, a, b = _load_pair(args.a, args.b)
    tol = _tolerance_for(a, b)
    ok = maj.majorize(algebra, a, b, tol=tol)
    payload: dict = {"result": ok, "tolerance": tol}
    if not ok:
        r = maj.orbit_distance(algebra, a, b)
        payload["witness"] = {"orbit_distance": float(r)}
    _emit(payload, started)
    return 0


def _cmd_check_submajorize(args, started) -> int:
    algebra, a, b = _load_pair(args.a, args.b)
    tol = _tolerance_for(a, b)
    r, _ = maj.submaj_distance(algebra, a, b)
    ok = r <= tol
    payload: dict = {"result": ok, "tolerance": tol}
    if not ok:
        payload["witness"] = {"submaj_distance": float(r)}
    _emit(payload, started)
    return 0


def _cmd_distance(args, started) -> int:
    algebra, a, b = _load_pair(args.a, args.b)
    tol = _tolerance_for(a, b)
    r = maj.orbit_distance(algebra, a, b)
    _emit({"result": float(r), "tolerance": tol}, started)
    return 0


def _cmd_distance_submaj(args, started) -> int:
    algebra, a, b = _load_pair(args.a, args.b)
    tol = _tolerance_for(a, b)
    r, witness = maj.submaj_distance(algebra, a, b)
    _emit(
        {"result": float(r), "tolerance": tol, "witness": alg_mod.element_to_obj(witness)},
        started,
    )
    return 0


def _cmd_zero_in_hull(args, started) -> int:
    a = _load_element(args.a)
    algebra = alg_mod.algebra_of(a)
    tol = _tolerance_for(a)
    ok, reason = maj.zero_in_hull(algebra, a, tol=tol)
    payload: dict = {"result": ok, "tolerance": tol}
    if reason is not None:
        payload["witness"] = reason
    _emit(payload, started)
    return 0


def _cmd_synthesize(args, started) -> int:
    algebra, a, b = _load_pair(args.a, args.b)
    tol = _tolerance_for(a, b)
    comb = syn.synthesize_combination(algebra, a, b, args.epsilon)
    payload = {
        "result": float(comb.target_error),
        "tolerance": tol,
        "witness": _combination_obj(comb),
    }
    _emit(payload, started)
    return 0


def _parse_rank_pairs(spec: str) -> tuple[list[int], list[int]]:
    rank_p, rank_q = [], []
    for token in spec.split(","):
        if not token:
            continue
        p_str, _, q_str = token.partition(":")
        if not q_str:
            raise InputError(f"rank token {token!r} is not of the form p:q")
        rank_p.append(int(p_str))
        rank_q.append(int(q_str))
    return rank_p, rank_q


def _cmd_pinch(args, started) -> int:
    dims = _parse_ints(args.dims)
    algebra = alg_mod.build_algebra(dims)
    mu = alg_mod.CentralElement(tuple(_parse_reals(args.mu)))
    nu = alg_mod.CentralElement(tuple(_parse_reals(args.nu)))
    rank_p, rank_q = _parse_rank_pairs(args.ranks)
    rho, comb = syn.dixmier_pinch(algebra, rank_p, rank_q, mu, nu)
    payload = {
        "result": [float(v) for v in rho.values],
        "tolerance": _tol_factor(),
        "witness": _combination_obj(comb),
    }
    _emit(payload, started)
    return 0


def _cmd_probe_uniform(args, started) -> int:
    result = syn.uniform_probe(args.epsilon, _parse_dims(args.dims), args.trials, args.seed)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(result.to_csv())
    payload = {
        "result": {"table": [[int(n), int(count)] for n, count in result.table]},
        "tolerance": _tol_factor(),
    }
    _emit(payload, started)
    return 0


def _cmd_oracle_distance(args, started) -> int:
    algebra, a, b = _load_pair(args.a, args.b)
    tol = _tolerance_for(a, b)
    r = oracle_mod.frank_wolfe_distance(
        algebra, a, b, iterations=args.iterations, restarts=args.restarts, seed=args.seed
    )
    _emit({"result": float(r), "tolerance": tol}, started)
    return 0


def _cmd_gen(args, started) -> int:
    dims = _parse_dims(args.dims)
    algebra = alg_mod.build_algebra(dims)
    a, b = oracle_mod.generate_pair(algebra, args.seed, args.kind, radius=args.radius)
    obj_a = alg_mod.element_to_obj(a)
    obj_b = alg_mod.element_to_obj(b)
    if args.out_a:
        with open(args.out_a, "w", encoding="utf-8") as fh:
            fh.write(_format_json(obj_a) + "\n")
    if args.out_b:
        with open(args.out_b, "w", encoding="utf-8") as fh:
            fh.write(_format_json(obj_b) + "\n")
    payload = {
        "result": {"kind": args.kind, "seed": int(args.seed), "dims": [int(d) for d in dims]},
        "tolerance": _tol_factor(),
        "a": obj_a,
        "b": obj_b,
    }
    _emit(payload, started)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="orbithull",
        description="Majorization checks, orbit-hull distances, and constructive synthesis "
        "for selfadjoint elements of multi-matrix C*-algebras.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def pair_cmd(name, handler, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("a", help="JSON file with element a")
        p.add_argument("b", help="JSON file with element b")
        p.set_defaults(handler=handler)
        return p

    pair_cmd("check-majorize", _cmd_check_majorize, "is a in the closed hull of unitary conjugates of b?")
    pair_cmd("check-submajorize", _cmd_check_submajorize, "is a in the closed hull of contraction conjugates of b?")
    pair_cmd("distance", _cmd_distance, "distance from a to the hull of unitary conjugates of b")
    pair_cmd("distance-submaj", _cmd_distance_submaj, "distance from a to the hull of contraction conjugates of b")

    p = sub.add_parser("zero-in-hull", help="is 0 in the closed hull of unitary conjugates of a?")
    p.add_argument("a", help="JSON file with the element")
    p.set_defaults(handler=_cmd_zero_in_hull)

    p = pair_cmd("synthesize", _cmd_synthesize, "explicit convex combination of unitary conjugates")
    p.add_argument("--epsilon", type=float, required=True, help="headroom above the hull distance")

    p = sub.add_parser("pinch", help="Dixmier pinching of mu P + nu Q onto rho (P + Q)")
    p.add_argument("--dims", required=True, help="block dimensions, e.g. 2,3")
    p.add_argument("--ranks", required=True, help="per-block ranks of P and Q as p:q, e.g. 1:1,0:2")
    p.add_argument("--mu", required=True, help="per-block values of mu, e.g. 1.0,0.5")
    p.add_argument("--nu", required=True, help="per-block values of nu, e.g. 0.0,0.5")
    p.set_defaults(handler=_cmd_pinch)

    p = sub.add_parser("probe-uniform", help="empirical dimension-free synthesis probe")
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--dims", required=True, help="e.g. 2..40 or 2,3,5")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write the per-trial CSV here")
    p.set_defaults(handler=_cmd_probe_uniform)

    p = pair_cmd("oracle-distance", _cmd_oracle_distance, "Frank-Wolfe upper bound on the hull distance")
    p.add_argument("--restarts", type=int, default=10)
    p.add_argument("--iterations", type=int, default=400)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("gen", help="generate a deterministic test pair")
    p.add_argument("--kind", required=True, choices=list(oracle_mod.PAIR_KINDS))
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--dims", default="4", help="block dimensions, e.g. 4 or 2,3")
    p.add_argument("--radius", type=float, default=0.3, help="planted hull distance for kind=boundary")
    p.add_argument("--out-a", help="write element a to this file")
    p.add_argument("--out-b", help="write element b to this file")
    p.set_defaults(handler=_cmd_gen)
    return parser


def run(argv) -> int:
    started = time.perf_counter()
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        return args.handler(args, started)
    except InputError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except NumericalError as exc:
        sys.stderr.write(f"numerical failure: {exc}\n")
        return 3
    except OrbitHullError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except (ValueError, KeyError, TypeError) as exc:
        sys.stderr.write(f"malformed input: {exc}\n")
        return 2


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
