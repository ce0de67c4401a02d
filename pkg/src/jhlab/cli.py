"""Batch command-line front end.

Subcommands wire the library into reproducible file-based experiments:

* ``jh-norm``        exact tree-space norm of a vector JSON file;
* ``sigma``          the l-infinity -> l-1 matrix norm of a CSV matrix,
                     optional sign transforms, permutation identity check;
* ``growth``         normalized extremal sweep: CSV (plus a PNG figure)
                     of sigma(E(M_n)) against n;
* ``counterexample`` the full pairing/divergence report: JSON, CSV
                     mirror, and a PNG figure;
* ``wuc``            the wuC-constant estimate of a series file.

Exit codes: 0 success, 1 self-check failure (an exact identity the
pipeline guarantees failed to hold), 2 input error.  Outputs are written
atomically, carry their full configuration in headers, and are
byte-identical across runs with the same inputs and seed.
"""

import argparse
import os
import sys
from typing import Optional, Sequence

from . import counterexample as cx
from . import serialize
from .errors import InputError, JhlabError, SelfCheckError
from .extremal import CANDIDATE_FAMILIES, fit_growth_slope, growth_sweep
from .matrices import (alternating_sign_transform, main_triangle_projection,
                       odd_even_identity_holds, sigma_exact, sigma_heuristic)
from .space import jh_norm
from .tree import Branch


def _int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip() != ""]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _scalar_mode(args) -> str:
    return serialize.FLOAT if getattr(args, "float", False) else serialize.EXACT


def _sibling(path: str, extension: str) -> str:
    return os.path.splitext(path)[0] + extension


# ---------------------------------------------------------------------------
# jh-norm

def cmd_jh_norm(args) -> int:
    mode = _scalar_mode(args)
    vector = serialize.read_tree_vector(args.input, mode)
    print(serialize.format_scalar(jh_norm(vector), mode))
    return 0


# ---------------------------------------------------------------------------
# sigma

def cmd_sigma(args) -> int:
    if args.check_identity is not None:
        if args.check_identity < 1:
            raise InputError("--check-identity needs a positive size")
        for n in range(1, args.check_identity + 1):
            if not odd_even_identity_holds(n):
                raise SelfCheckError(f"permutation sign identity fails at n={n}")
        print("OK")
        return 0
    if args.input is None:
        raise InputError("a matrix CSV path is required unless --check-identity is used")
    mode = _scalar_mode(args)
    matrix = serialize.read_matrix_csv(args.input, mode)
    if args.transform == "alternating":
        matrix = alternating_sign_transform(matrix)
    elif args.transform == "triangle":
        matrix = main_triangle_projection(matrix)
    if args.heuristic:
        value = sigma_heuristic(matrix, restarts=args.restarts, seed=args.seed)
    else:
        value = sigma_exact(matrix)
    print(serialize.format_scalar(value, mode))
    return 0


# ---------------------------------------------------------------------------
# growth

def cmd_growth(args) -> int:
    mode = "heuristic" if args.heuristic else "exact"
    records = growth_sweep(args.family, args.sizes, mode=mode,
                           restarts=args.restarts, seed=args.seed)
    header = [
        "command: growth",
        f"family: {args.family}",
        f"sizes: {','.join(str(n) for n in args.sizes)}",
        f"mode: {mode}",
        f"restarts: {args.restarts}",
        f"seed: {args.seed}",
    ]
    try:
        slope, intercept = fit_growth_slope([r for r in records if r.n > 1])
        header.append(f"fit: sigma_EM ~ {slope!r} * ln(n) + {intercept!r}")
    except InputError:
        header.append("fit: n/a")
    text = serialize.growth_records_to_csv_text(records, header)
    if args.out:
        serialize.atomic_write_text(args.out, text)
        print(f"wrote {args.out}")
        if not args.no_figure:
            from .figures import render_growth_figure
            figure_path = _sibling(args.out, ".png")
            render_growth_figure(records, figure_path)
            print(f"wrote {figure_path}")
    else:
        sys.stdout.write(text)
    return 0


# ---------------------------------------------------------------------------
# counterexample

_CONFIG_KEYS = {"k_max", "n_rule", "weights", "cut_points", "schedule",
                "K_hypothesis", "r_list", "seed", "family"}


def _load_config(path: Optional[str]) -> dict:
    if path is None:
        return {}
    obj = serialize.read_json(path)
    if not isinstance(obj, dict):
        raise InputError("config JSON must be an object")
    unknown = set(obj) - _CONFIG_KEYS
    if unknown:
        raise InputError(f"unknown config keys: {sorted(unknown)}")
    return obj


def _resolve_counterexample_setup(args):
    """Merge CLI flags over config-file values over defaults."""
    config = _load_config(args.config)

    def pick(flag, key, default):
        if flag is not None:
            return flag
        return config.get(key, default) if config.get(key) is not None else default

    seed = pick(args.seed, "seed", 0)
    weights_rule = pick(args.weights, "weights", "uniform")
    family = pick(args.family, "family", "hilbert")
    schedule_spec = pick(args.schedule, "schedule", "random")
    if isinstance(schedule_spec, dict):
        schedule_kind = schedule_spec.get("kind")
        seed = schedule_spec.get("seed", seed)
        family = schedule_spec.get("family", family)
    else:
        schedule_kind = schedule_spec
    if schedule_kind not in ("random", "growth"):
        raise InputError(f"unknown schedule {schedule_kind!r}")

    K_raw = pick(args.K_hypothesis, "K_hypothesis", None)
    K_hypothesis = None if K_raw is None else serialize.parse_scalar(str(K_raw))

    n_rule = config.get("n_rule")
    if n_rule in (None, "2k"):
        n_rule = None
    elif not isinstance(n_rule, list):
        raise InputError('config n_rule must be "2k" or an explicit level list')

    r_list = pick(args.r_list, "r_list", None)
    k_max = pick(args.k_max, "k_max", None)

    config_cuts = config.get("cut_points")
    if args.cut_step is not None:
        step, points = args.cut_step, None
    elif isinstance(config_cuts, list):
        step, points = None, [int(c) for c in config_cuts]
    elif isinstance(config_cuts, int):
        step, points = config_cuts, None
    elif isinstance(config_cuts, dict) and set(config_cuts) == {"step"}:
        step, points = int(config_cuts["step"]), None
    elif config_cuts is None:
        step, points = 1, None
    else:
        raise InputError("config cut_points must be a list, an int step, or {\"step\": n}")

    if points is None:
        if step < 1:
            raise InputError("cut step must be >= 1")
        if k_max is None:
            base = r_list if r_list else [1, 2, 3, 4, 5, 6]
            k_max = step * (2 * max(base) + 1)
        points = [step * i for i in range(1, k_max // step + 1)]
    elif k_max is None:
        k_max = points[-1]
    if not points or points[-1] > k_max:
        raise InputError(f"cut points {points} exceed k_max={k_max}")

    feasible_max = (len(points) - 1) // 2
    if feasible_max < 1:
        raise InputError(f"k_max={k_max} leaves no block r with 2r+1 cut points")
    if r_list is None:
        r_list = list(range(1, feasible_max + 1))
    if any(r < 1 or r > feasible_max for r in r_list):
        raise InputError(f"r_list {r_list} outside the feasible range 1..{feasible_max}")

    scaffold = cx.build_scaffold(k_max, n_rule)
    if schedule_kind == "growth":
        schedule = cx.MatrixSchedule.growth(r_list, k_max=k_max, family=family)
    else:
        schedule = cx.MatrixSchedule.random(k_max, seed=seed)
    if weights_rule == "uniform":
        blocking = cx.ConvexBlocking.uniform(points)
    elif weights_rule == "vertex":
        blocking = cx.ConvexBlocking.vertex(points)
    else:
        raise InputError(f"unknown weights rule {weights_rule!r}")

    echo = {
        "command": "counterexample",
        "k_max": k_max,
        "n_rule": "2k" if n_rule is None else n_rule,
        "cut_points": points,
        "weights": weights_rule,
        "schedule": schedule_kind,
        "family": family if schedule_kind == "growth" else None,
        "seed": seed if schedule_kind == "random" else None,
        "r_list": r_list,
        "K_hypothesis": (None if K_hypothesis is None
                         else serialize.format_scalar(K_hypothesis)),
        "corrupt_xi": bool(args.corrupt_xi),
    }
    return scaffold, schedule, blocking, r_list, K_hypothesis, echo


def _corrupted_xi_builder(sc: cx.Scaffold, blocking: cx.ConvexBlocking,
                          r: int) -> list[Branch]:
    """Negative-control hook: branches that never leave gamma_i, breaking
    the divergence the pairing identity depends on."""
    return [Branch(sc.gamma[i - 1].bits) for i in sc.block_indices(r)]


def cmd_counterexample(args) -> int:
    sc, sched, blocking, r_list, K_hypothesis, echo = \
        _resolve_counterexample_setup(args)
    xi_builder = _corrupted_xi_builder if args.corrupt_xi else None
    report = cx.divergence_report(sc, sched, blocking, r_list,
                                  K_hypothesis=K_hypothesis, strict=False,
                                  xi_builder=xi_builder)
    if args.out:
        serialize.write_report_json(args.out, report, config_echo=echo)
        print(f"wrote {args.out}")
        csv_path = _sibling(args.out, ".csv")
        header = [f"{key}: {value}" for key, value in echo.items() if value is not None]
        serialize.write_report_csv(csv_path, report, header)
        print(f"wrote {csv_path}")
        if not args.no_figure:
            from .figures import render_divergence_figure
            figure_path = _sibling(args.out, ".png")
            render_divergence_figure(report, figure_path)
            print(f"wrote {figure_path}")
    else:
        sys.stdout.write(serialize.report_to_csv_text(
            report, [f"{k}: {v}" for k, v in echo.items() if v is not None]))
    print(f"max lower bound: {serialize.format_scalar(report.max_lower_bound)}")
    if report.any_flagged:
        flagged = [row.r for row in report.rows if row.flagged]
        print(f"K hypothesis exceeded at r = {flagged}")
    if not report.all_match:
        failed = [row.r for row in report.rows if not row.match]
        print(f"self-check failure: pairing identity mismatch at r = {failed}",
              file=sys.stderr)
        return 1
    return 0


# ---------------------------------------------------------------------------
# wuc

def cmd_wuc(args) -> int:
    obj = serialize.read_json(args.input)
    if not isinstance(obj, dict) or not isinstance(obj.get("series"), list):
        raise InputError('series JSON must be {"kind": ..., "series": [...]}')
    kind = obj.get("kind", "vectors")
    if kind == "vectors":
        series = [serialize.tree_vector_from_dict(item) for item in obj["series"]]
    elif kind == "tensors":
        series = [serialize.tensor_from_dict(item) for item in obj["series"]]
    else:
        raise InputError(f'series kind must be "vectors" or "tensors", got {kind!r}')
    mode = "exact-signs" if args.mode == "exact" else "sampled"
    estimate = cx.wuc_constant(series, mode=mode, samples=args.samples,
                               seed=args.seed)
    if estimate.lo == estimate.hi:
        print(f"K = {serialize.format_scalar(estimate.lo)}")
    else:
        print(f"K_lo = {serialize.format_scalar(estimate.lo)}")
        print(f"K_hi = {serialize.format_scalar(estimate.hi)}")
    return 0


# ---------------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jhlab",
        description="Tree-space norms, matrix sign transforms, and the "
                    "property-(u) refutation pipeline at desk scale.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("jh-norm", help="exact norm of a tree-vector JSON file")
    p.add_argument("input", help="TreeVector JSON path")
    p.add_argument("--float", action="store_true", help="float scalar mode")
    p.set_defaults(handler=cmd_jh_norm)

    p = sub.add_parser("sigma", help="matrix norm of a CSV matrix")
    p.add_argument("input", nargs="?", help="matrix CSV path")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--exact", action="store_true",
                       help="exact enumeration (default)")
    group.add_argument("--heuristic", action="store_true",
                       help="alternating-maximization lower bound")
    p.add_argument("--restarts", type=int, default=64)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--transform", choices=("alternating", "triangle"),
                   help="apply a sign transform before the norm")
    p.add_argument("--check-identity", type=int, metavar="N",
                   help="verify the odd/even permutation sign identity for all sizes up to N")
    p.add_argument("--float", action="store_true", help="float scalar mode")
    p.set_defaults(handler=cmd_sigma)

    p = sub.add_parser("growth", help="normalized extremal-family growth sweep")
    p.add_argument("--sizes", type=_int_list, required=True, metavar="a,b,c")
    p.add_argument("--family", choices=sorted(CANDIDATE_FAMILIES), default="hilbert")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--exact", action="store_true",
                       help="exact enumeration (default)")
    group.add_argument("--heuristic", action="store_true",
                       help="alternating-maximization lower bounds")
    p.add_argument("--restarts", type=int, default=64)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="CSV output path (figure lands beside it)")
    p.add_argument("--no-figure", action="store_true",
                   help="skip the PNG figure")
    p.set_defaults(handler=cmd_growth)

    p = sub.add_parser("counterexample",
                       help="pairing identities and the divergence report")
    p.add_argument("--k-max", type=int, default=None)
    p.add_argument("--r-list", type=_int_list, default=None, metavar="a,b,c")
    p.add_argument("--weights", choices=("uniform", "vertex"), default=None)
    p.add_argument("--cut-step", type=int, default=None,
                   help="cut points l_r = r * step (default step 1)")
    p.add_argument("--K-hypothesis", dest="K_hypothesis", default=None,
                   metavar="x", help="hypothesized wuC constant to flag against")
    p.add_argument("--schedule", choices=("random", "growth"), default=None)
    p.add_argument("--family", choices=sorted(CANDIDATE_FAMILIES), default=None,
                   help="extremal family for the growth schedule")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--config", help="config JSON path (flags override it)")
    p.add_argument("--out", help="report JSON path (CSV + figure land beside it)")
    p.add_argument("--no-figure", action="store_true",
                   help="skip the PNG figure")
    p.add_argument("--corrupt-xi", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(handler=cmd_counterexample)

    p = sub.add_parser("wuc", help="wuC-constant estimate of a series file")
    p.add_argument("input", help='series JSON path ({"kind": "vectors"|"tensors", "series": [...]})')
    p.add_argument("--mode", choices=("exact", "sampled"), default="exact")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(handler=cmd_wuc)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except SelfCheckError as exc:
        print(f"self-check failure: {exc}", file=sys.stderr)
        return 1
    except JhlabError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
