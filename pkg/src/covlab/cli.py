"""Command-line front end.

Loads body specs and constants, dispatches experiments and writes
delimited reports with figures rendered alongside.  Seeds are mandatory
on every subcommand so every emitted number is reproducible.  Exit
codes: 0 success, 1 input error, 2 internal certification failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import covering, duality, functionals, plotting, setcover
from .constructions import (CertificationError, CombinerInput, combiner_to_json,
                            dual_combine, dual_combine_inputs, primal_combine)
from .covering import staircase, staircase_to_csv
from .functionals import PaperConstants
from .geometry import Ball, Body, BodyError, Intersect, body_from_json


class InputError(ValueError):
    pass


def _load_body(path: str) -> Body:
    try:
        with open(path) as fh:
            spec = json.load(fh)
    except FileNotFoundError:
        raise InputError(f"body file not found: {path}") from None
    except json.JSONDecodeError as e:
        raise InputError(f"malformed body JSON in {path}: "
                         f"line {e.lineno} column {e.colno}: {e.msg}") from None
    try:
        return body_from_json(spec)
    except BodyError as e:
        raise InputError(f"invalid body in {path}: {e}") from None


def _parse_grid(spec: str) -> list:
    """start:stop:points[:log] -> ascending positive grid."""
    parts = spec.split(":")
    if len(parts) not in (3, 4):
        raise InputError(f"grid spec must be start:stop:points[:log], got {spec!r}")
    try:
        start, stop, points = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise InputError(f"non-numeric grid spec {spec!r}") from None
    log = len(parts) == 4
    if log and parts[3] != "log":
        raise InputError(f"unknown grid suffix {parts[3]!r}")
    if start <= 0 or stop < start or points < 1:
        raise InputError("grid must be positive and ascending")
    if log:
        grid = np.geomspace(start, stop, points)
    else:
        grid = np.linspace(start, stop, points)
    return [float(t) for t in grid]


def _load_constants(args) -> PaperConstants:
    vals = {}
    if getattr(args, "config", None):
        path = args.config
        try:
            if path.endswith(".toml"):
                import tomllib

                with open(path, "rb") as fh:
                    cfg = tomllib.load(fh)
            else:
                with open(path) as fh:
                    cfg = json.load(fh)
        except FileNotFoundError:
            raise InputError(f"config file not found: {path}") from None
        except (json.JSONDecodeError, Exception) as e:
            if isinstance(e, json.JSONDecodeError):
                raise InputError(f"malformed config JSON: {e}") from None
            raise
        vals.update(cfg.get("constants", {}))
    for name in ("C0", "C2", "eps", "R0", "c2"):
        v = getattr(args, name, None)
        if v is not None:
            vals[name] = v
    try:
        return PaperConstants(**vals)
    except (TypeError, ValueError) as e:
        raise InputError(f"bad constants: {e}") from None


def _add_common(p, grid=False, constants=False):
    p.add_argument("--seed", type=int, required=True,
                   help="RNG seed (mandatory: no wall-clock defaults)")
    p.add_argument("--budget", type=int, default=None,
                   help="candidate budget (default: dimension-dependent)")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--no-plot", action="store_true",
                   help="skip figure rendering")
    p.add_argument("--workers", type=int, default=os.cpu_count(),
                   help="worker count (reports are assembled deterministically)")
    if grid:
        p.add_argument("--grid", required=True,
                       help="resolution grid start:stop:points[:log]")
    if constants:
        p.add_argument("--config", help="TOML/JSON file with a [constants] section")
        for name in ("C0", "C2", "eps", "R0", "c2"):
            p.add_argument(f"--{name}", type=float, default=None)


def _build_parser():
    ap = argparse.ArgumentParser(prog="covlab",
                                 description="covering-number laboratory")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cover", help="two-sided covering bounds at one t")
    p.add_argument("--body", required=True)
    p.add_argument("--target", help="gauge body JSON (default: unit ball)")
    p.add_argument("--t", type=float, required=True)
    _add_common(p)

    p = sub.add_parser("staircase", help="staircase over a resolution grid")
    p.add_argument("--body", required=True)
    p.add_argument("--target", help="gauge body JSON (default: unit ball)")
    _add_common(p, grid=True)

    p = sub.add_parser("duality", help="paired staircases and beta ratios")
    p.add_argument("--body", required=True)
    p.add_argument("--alpha", default="1,2,4,8",
                   help="comma-separated alpha grid")
    _add_common(p, grid=True, constants=True)

    p = sub.add_parser("gamma", help="gamma / gamma' of a body")
    p.add_argument("--body", required=True)
    p.add_argument("--prime", action="store_true")
    _add_common(p, constants=True)

    p = sub.add_parser("combine", help="separated-set product combiners")
    p.add_argument("--body", required=True, help="container body K")
    p.add_argument("--kind", choices=["primal", "dual"], required=True)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--A", type=float, required=True)
    p.add_argument("--B", type=float, required=True)
    _add_common(p)

    p = sub.add_parser("iterate", help="iteration inequality shadows")
    p.add_argument("--body", required=True)
    p.add_argument("--kind", choices=["primal", "dual"], required=True)
    _add_common(p, constants=True)

    p = sub.add_parser("probe", help="conjecture statistics over a family")
    p.add_argument("--family", required=True,
                   choices=["sphere_hull", "ellipsoid", "zonotope", "hexagon"])
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--R", type=float, default=8.0)
    p.add_argument("--m", type=int, default=16)
    p.add_argument("--count", type=int, default=20)
    _add_common(p, constants=True)
    return ap


def _cmd_cover(args):
    K = _load_body(args.body)
    T = _load_body(args.target) if args.target else Ball(1.0, K.dim)
    est = covering.covering_bounds(K, T, args.t, args.budget, args.seed)
    print(f"{est.lower} {est.upper}")
    return 0


def _cmd_staircase(args):
    K = _load_body(args.body)
    T = _load_body(args.target) if args.target else Ball(1.0, K.dim)
    grid = _parse_grid(args.grid)
    st = staircase(K, T, grid, args.budget, args.seed)
    os.makedirs(args.out, exist_ok=True)
    base = os.path.join(args.out, f"staircase_seed{args.seed}")
    staircase_to_csv(st, base + ".csv")
    print(base + ".csv")
    if not args.no_plot:
        plotting.plot_staircase(st, base + ".png")
        print(base + ".png")
    return 0


def _cmd_duality(args):
    K = _load_body(args.body)
    grid = _parse_grid(args.grid)
    try:
        alphas = [float(a) for a in args.alpha.split(",") if a]
    except ValueError:
        raise InputError(f"bad alpha grid {args.alpha!r}") from None
    consts = _load_constants(args)
    rep = duality.duality_report(K, grid, alphas, consts, args.budget, args.seed)
    os.makedirs(args.out, exist_ok=True)
    base = os.path.join(args.out, f"duality_seed{args.seed}_{consts.key()}")
    with open(base + ".json", "w") as fh:
        json.dump(rep.to_json(), fh, indent=2)
    import csv

    with open(base + "_ratios.csv", "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=["t", "alpha", "beta_primal_vs_dual",
                                           "beta_dual_vs_primal"])
        w.writeheader()
        w.writerows(rep.ratio_table)
    print(base + ".json")
    print(base + "_ratios.csv")
    if not args.no_plot:
        plotting.plot_duality(rep, base + ".png")
        print(base + ".png")
    return 0


def _cmd_gamma(args):
    K = _load_body(args.body)
    consts = _load_constants(args)
    fn = functionals.gamma_prime if args.prime else functionals.gamma
    g = fn(K, consts, args.budget, args.seed)
    print(json.dumps(vars(g), indent=2))
    return 0


def _cmd_combine(args):
    K = _load_body(args.body)
    n = K.dim
    D = Ball(1.0, n)
    if args.kind == "primal":
        from .geometry import intersect_with_ball

        KA = intersect_with_ball(K, args.A)
        KB = intersect_with_ball(K, args.B)
        xset = covering.greedy_separated(KA, D, args.a, args.budget, args.seed)
        yset = covering.greedy_separated(KB, D, args.b, args.budget, args.seed + 1)
        inp = CombinerInput(xset=xset, yset=yset, a=args.a, b=args.b,
                            A=args.A, B=args.B)
        out = primal_combine(inp)
    else:
        inp = dual_combine_inputs(K, args.a, args.b, args.A, args.B,
                                  args.budget, args.seed)
        out = dual_combine(inp, K)
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, f"combine_{args.kind}_seed{args.seed}.json")
    with open(path, "w") as fh:
        json.dump(combiner_to_json(out), fh, indent=2)
    print(path)
    print(f"points={len(out.points)} separation>{out.separation:g}")
    return 0


def _cmd_iterate(args):
    K = _load_body(args.body)
    consts = _load_constants(args)
    try:
        rec = duality.check_iteration(K, args.kind, consts, args.budget, args.seed)
    except functionals.SequenceError as e:
        raise InputError(f"sequence generation failed: {e}") from None
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out,
                        f"iterate_{args.kind}_seed{args.seed}_{consts.key()}.json")
    with open(path, "w") as fh:
        json.dump(rec, fh, indent=2)
    print(path)
    print("consistent" if rec["consistent"] else "violated-at-brackets")
    return 0


def _cmd_probe(args):
    consts = _load_constants(args)
    fam = duality.FamilySpec(kind=args.family, dim=args.dim, R=args.R, m=args.m)
    probe = duality.geometric_lemma_probe(fam, args.count, consts,
                                          args.budget, args.seed)
    os.makedirs(args.out, exist_ok=True)
    base = os.path.join(args.out,
                        f"probe_{args.family}_seed{args.seed}_{consts.key()}")
    with open(base + ".json", "w") as fh:
        json.dump(probe.to_json(), fh, indent=2)
    print(base + ".json")
    if not args.no_plot:
        plotting.plot_probe(probe, base + ".png")
        print(base + ".png")
    return 0


_DISPATCH = {
    "cover": _cmd_cover,
    "staircase": _cmd_staircase,
    "duality": _cmd_duality,
    "gamma": _cmd_gamma,
    "combine": _cmd_combine,
    "iterate": _cmd_iterate,
    "probe": _cmd_probe,
}


def run(argv=None) -> int:
    ap = _build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return 1 if e.code not in (0, None) else 0
    try:
        return _DISPATCH[args.command](args)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except (BodyError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except CertificationError as e:
        print(f"certification failure: {e}", file=sys.stderr)
        return 2


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
