"""Command line front end.

Every subcommand prints one JSON object.  Exit codes: 0 success, 1 input or
I/O error, 2 domain error (``{"error_kind", "message"}``), 64 usage error.
JSON-valued options take inline JSON, ``-`` for standard input, or a path.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import degeneration, jacobian, measure, reduction, universal
from .errors import Inconclusive, SiegelError
from .jsonio import (
    InputError,
    any_point_from_json,
    clean,
    descriptor_to_json,
    element_to_json,
    point_to_json,
    universal_to_json,
)
from .siegel import siegel_distance

EXIT_OK = 0
EXIT_IO = 1
EXIT_DOMAIN = 2
EXIT_USAGE = 64

# config file keys -> option destinations
CONFIG_ALIASES = {
    "alpha": "alpha",
    "G": "gmax",
    "gmax": "gmax",
    "truncation_genus": "gmax",
    "N": "N",
    "target_dimension": "N",
    "seed": "seed",
    "n": "n",
    "n_samples": "n",
    "workers": "workers",
    "integrand": "integrand",
    "include_genus_zero": "include_genus_zero",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _load_json(value: str):
    text = value.strip()
    if text == "-":
        text = sys.stdin.read()
    elif not text.startswith(("{", "[")):
        text = Path(value).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON: {exc}") from exc


def _positive_int(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _seed(s: str) -> int:
    v = int(s)
    if not 0 <= v < 1 << 64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return v


def _bool(s) -> bool:
    if isinstance(s, bool):
        return s
    low = str(s).strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"not a boolean: {s!r}")


def _read_config(path: str) -> dict[str, str]:
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, val = (s.strip() for s in line.split("=", 1))
        norm = key if len(key) == 1 else key.lower().replace("-", "_")
        dest = CONFIG_ALIASES.get(norm)
        if dest is None:
            raise UsageError(f"{path}:{lineno}: unknown config key {key!r}")
        out[dest] = val
    return out


# ---------------------------------------------------------------------------
# Subcommands


def cmd_reduce(args) -> dict:
    Z = any_point_from_json(_load_json(args.point))
    res = reduction.siegel_reduce(Z)
    return {
        "reduced": point_to_json(res.reduced),
        "transform": element_to_json(res.transform),
        "word_length": res.word_length,
        "approximate": res.approximate,
    }


def cmd_distance(args) -> dict:
    a = any_point_from_json(_load_json(args.a))
    b = any_point_from_json(_load_json(args.b))
    g = max(a.genus, b.genus)
    a, b = universal.embed_point(a, g), universal.embed_point(b, g)
    out = {"genus": g, "distance": siegel_distance(a, b)}
    if args.quotient:
        out["quotient_distance"] = reduction.quotient_distance(a, b)
    return out


def cmd_embed(args) -> dict:
    Z = any_point_from_json(_load_json(args.point))
    out = {"universal": universal_to_json(universal.stabilize(Z))}
    if args.genus is not None:
        out["embedded"] = point_to_json(universal.embed_point(Z, args.genus))
    return out


def cmd_strata(args) -> dict:
    strata = degeneration.enumerate_boundary_strata(args.genus, args.include_interior)
    return {"genus": args.genus, "count": len(strata), "strata": [descriptor_to_json(d) for d in strata]}


def _branch_point(v):
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return float(v)
    if isinstance(v, list) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    raise InputError(f"branch point must be a number or [re, im], got {v!r}")


def cmd_period(args) -> dict:
    if args.curve is not None:
        data = _load_json(args.curve)
        if not isinstance(data, dict) or "branch_points" not in data:
            raise InputError("curve JSON needs 'branch_points'")
        pts = data["branch_points"]
        normalize = _bool(data.get("normalize", True))
    elif args.branch_points is not None:
        pts = _load_json(args.branch_points)
        normalize = not args.no_normalize
    else:
        raise UsageError("period: give --curve or --branch-points")
    if not isinstance(pts, list):
        raise InputError("branch_points must be a list")
    curve = jacobian.HyperellipticCurve(tuple(_branch_point(v) for v in pts))
    Z = jacobian.period_matrix(curve)
    out = {"genus": curve.genus, "period": point_to_json(Z)}
    if normalize:
        res = reduction.siegel_reduce(Z)
        out["reduced"] = point_to_json(res.reduced)
        out["transform"] = element_to_json(res.transform)
    return out


def _report_json(rep: degeneration.DegenerationReport) -> dict:
    return {
        "epsilons": list(rep.epsilons),
        "reduced_points": [point_to_json(p) for p in rep.reduced_points],
        "offdiag_norms": rep.offdiag_norms,
        "im_diag_max": rep.im_diag_max,
        "distance_to_first": rep.distance_to_first,
        "classification": rep.classification,
        "trend": rep.trend,
    }


def cmd_degenerate(args) -> dict:
    if args.family is not None:
        data = _load_json(args.family)
        if not isinstance(data, dict) or "kind" not in data or "epsilons" not in data:
            raise InputError("family JSON needs 'kind' and 'epsilons'")
        kind, eps = data["kind"], data["epsilons"]
    else:
        if args.kind is None or args.epsilons is None:
            raise UsageError("degenerate: give --family or both --kind and --epsilons")
        kind, eps = args.kind, _load_json(args.epsilons)
    fam = degeneration.make_family(kind, eps)
    return _report_json(degeneration.neck_limit_probe(fam, workers=args.workers))


def _mc_json(r: measure.MCResult) -> dict:
    return {"estimate": r.estimate, "stderr": r.stderr, "n": r.n_samples, "seed": r.seed}


def cmd_volume(args) -> dict:
    r = measure.stratum_volume(args.genus, args.n, quadrature=args.quadrature, seed=args.seed, workers=args.workers)
    out = _mc_json(r)
    out["genus"] = args.genus
    out["method"] = "quadrature" if args.quadrature else "monte_carlo"
    return out


def cmd_integrate(args) -> dict:
    if args.weights is not None:
        w = _load_json(args.weights)
        if not isinstance(w, dict):
            raise InputError("weights must be an object mapping genus to weight")
        try:
            weights = {int(k): float(v) for k, v in w.items()}
        except (TypeError, ValueError) as exc:
            raise InputError(f"bad weights: {exc}") from exc
        cfg = measure.StratifiedMeasureConfig.explicit(
            weights, seed=args.seed, include_genus_zero=args.include_genus_zero
        )
    else:
        cfg = measure.StratifiedMeasureConfig.string(
            args.alpha, args.gmax, seed=args.seed, include_genus_zero=args.include_genus_zero
        )
    r = measure.integrate_stratified(args.integrand, cfg, args.n, workers=args.workers)
    out = _mc_json(r)
    out["weights"] = {str(g): v for g, v in cfg.lambdas().items()}
    out["components"] = {str(g): _mc_json(c) for g, c in r.components.items()}
    return out


def cmd_partition(args) -> dict:
    r = measure.partition_function(
        args.alpha,
        args.gmax,
        args.integrand,
        n=args.n,
        seed=args.seed,
        workers=args.workers,
        include_genus_zero=args.include_genus_zero,
    )
    return {
        "estimate": r.value,
        "stderr": r.stderr,
        "n": r.n_samples,
        "seed": r.seed,
        "tail_bound": r.tail_bound,
        "terms": {str(g): v for g, v in r.terms.items()},
        "alpha": args.alpha,
        "gmax": args.gmax,
        "N": args.N,
    }


# ---------------------------------------------------------------------------
# Parser


def _add_sampling(p, n_default: int):
    p.add_argument("--n", type=_positive_int, default=n_default, help="number of Monte Carlo proposals per stratum")
    p.add_argument("--seed", type=_seed, default=measure.DEFAULT_SEED)
    p.add_argument("--workers", type=_positive_int, default=1)


def build_parser() -> tuple[_Parser, dict[str, _Parser]]:
    parser = _Parser(prog="siegel-moduli", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="file of 'key = value' lines; explicit flags win")
    parser.add_argument("--out", help="write the JSON result to this path instead of standard output")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    subs = {}

    p = sub.add_parser("reduce", help="reduce a point to the fundamental domain")
    p.add_argument("--point", required=True)
    p.set_defaults(func=cmd_reduce)
    subs["reduce"] = p

    p = sub.add_parser("distance", help="invariant distance between two points")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--quotient", action="store_true", help="also report the distance between orbits")
    p.set_defaults(func=cmd_distance)
    subs["distance"] = p

    p = sub.add_parser("embed", help="stabilise or embed a point into higher genus")
    p.add_argument("--point", required=True)
    p.add_argument("--genus", type=_positive_int)
    p.set_defaults(func=cmd_embed)
    subs["embed"] = p

    p = sub.add_parser("strata", help="enumerate boundary strata")
    p.add_argument("--genus", type=_positive_int, required=True)
    p.add_argument("--include-interior", action="store_true")
    p.set_defaults(func=cmd_strata)
    subs["strata"] = p

    p = sub.add_parser("period", help="period matrix of a hyperelliptic curve")
    p.add_argument("--curve", help='{"branch_points": [...], "normalize": bool}')
    p.add_argument("--branch-points", help="JSON list of branch points")
    p.add_argument("--no-normalize", action="store_true")
    p.set_defaults(func=cmd_period)
    subs["period"] = p

    p = sub.add_parser("degenerate", help="probe a degenerating family")
    p.add_argument("--family", help='{"kind": "sep"|"nonsep", "epsilons": [...]}')
    p.add_argument("--kind", choices=["sep", "nonsep"])
    p.add_argument("--epsilons", help="JSON list of decreasing epsilons")
    p.add_argument("--workers", type=_positive_int, default=1)
    p.set_defaults(func=cmd_degenerate)
    subs["degenerate"] = p

    p = sub.add_parser("volume", help="volume of A_g")
    p.add_argument("--genus", type=int, required=True)
    p.add_argument("--quadrature", action="store_true")
    _add_sampling(p, 1_000_000)
    p.set_defaults(func=cmd_volume)
    subs["volume"] = p

    for name, func, helptext in (
        ("integrate", cmd_integrate, "integrate against the stratified measure"),
        ("partition", cmd_partition, "truncated genus-weighted partition function"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--alpha", type=float, default=1.0)
        p.add_argument("--gmax", type=int, default=2)
        p.add_argument("--integrand", choices=sorted(measure.NAMED_INTEGRANDS), default="one")
        p.add_argument("--include-genus-zero", type=_bool, nargs="?", const=True, default=False)
        if name == "integrate":
            p.add_argument("--weights", help='explicit weights, e.g. {"1": 1.0}')
        else:
            p.add_argument("--N", type=_positive_int, default=26, help="target dimension (recorded only)")
        _add_sampling(p, 200_000)
        p.set_defaults(func=func)
        subs[name] = p
    return parser, subs


def _apply_config(argv, parser, subs) -> argparse.Namespace:
    args = parser.parse_args(argv)
    if not args.config:
        return args
    try:
        conf = _read_config(args.config)
    except OSError as exc:
        raise InputError(f"cannot read config: {exc}") from exc
    sp = subs[args.command]
    actions = {a.dest: a for a in sp._actions}
    defaults = {}
    for dest, raw in conf.items():
        action = actions.get(dest)
        if action is None:
            continue  # meaningful for another subcommand
        try:
            if action.type is not None:
                defaults[dest] = action.type(raw)
            elif isinstance(action, argparse._StoreTrueAction):
                defaults[dest] = _bool(raw)
            else:
                defaults[dest] = raw
        except (ValueError, argparse.ArgumentTypeError) as exc:
            raise UsageError(f"config value for {dest!r}: {exc}") from exc
    sp.set_defaults(**defaults)
    return parser.parse_args(argv)


def _emit(obj: dict, out: str | None) -> None:
    text = json.dumps(clean(obj), indent=2, allow_nan=True) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _error(kind: str, message: str) -> dict:
    return {"error_kind": kind, "message": message}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, subs = build_parser()
    out = None
    try:
        args = _apply_config(argv, parser, subs)
        out = args.out
        result = args.func(args)
        _emit(result, out)
        return EXIT_OK
    except UsageError as exc:
        sys.stderr.write(f"{exc}\n")
        return EXIT_USAGE
    except Inconclusive as exc:
        err = _error(exc.kind, str(exc))
        report = getattr(exc, "report", None)
        if report is not None:
            err["report"] = _report_json(report)
        _emit(err, None)
        return EXIT_DOMAIN
    except SiegelError as exc:
        _emit(_error(exc.kind, str(exc)), None)
        return EXIT_DOMAIN
    except InputError as exc:
        _emit(_error("input_error", str(exc)), None)
        return EXIT_IO
    except OSError as exc:
        _emit(_error("io_error", str(exc)), None)
        return EXIT_IO
    except ValueError as exc:
        # invalid values rejected by constructors outside the error hierarchy
        _emit(_error("invalid_value", str(exc)), None)
        return EXIT_DOMAIN


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
