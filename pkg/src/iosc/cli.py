"""Command-line front end.

Every invocation produces a single machine-readable report (JSON by
default, CSV on request) carrying the fully resolved configuration:
re-running the echoed argv reproduces the numerical payload byte for
byte, given the same seed.  Rationals serialize as "num/den" strings and
counts as decimal strings, so arbitrary precision survives the pipe.

Exit codes: 0 success, 2 invalid input, 3 evaluation budget exceeded,
4 internal inconsistency (independent computation routes disagreed - this
is reachable only through a bug, and its handler is exercised in tests by
fault injection via IOSC_FAULT_INJECT).  The point budget defaults to
10^8, can be set by IOSC_BUDGET or --budget, and --force bypasses it with
a warning.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from fractions import Fraction
from typing import Any, Sequence

from . import bounds as bounds_mod
from . import circle as circle_mod
from . import expsum as expsum_mod
from . import sseries as sseries_mod
from . import zeta as zeta_mod
from .bounds import ExtRational
from .errors import DEFAULT_BUDGET, BudgetExceeded, OracleDisagreement
from .poly import IdealSpec, Poly, PolyParseError, Weight, jet_expand, parse_poly
from .ringcount import (
    Full,
    PrimitiveBlock,
    Region,
    UnitModP,
    ZeroModP,
    count_zpm,
)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_BUDGET = 3
EXIT_INCONSISTENT = 4


# -- serialization -------------------------------------------------------------


def _ser(x: Any) -> Any:
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, ExtRational):
        return "oo" if x.is_infinite else _ser(x.value)
    if isinstance(x, bool):
        return x
    if isinstance(x, int):
        # counts can exceed any fixed-width integer: decimal strings
        return str(x) if abs(x) > (1 << 53) else x
    if isinstance(x, float):
        return x
    if isinstance(x, complex):
        return {"re": x.real, "im": x.imag}
    if isinstance(x, Poly):
        return repr(x)
    if isinstance(x, (list, tuple)):
        return [_ser(v) for v in x]
    if isinstance(x, dict):
        return {str(k): _ser(v) for k, v in x.items()}
    if dataclasses.is_dataclass(x) and not isinstance(x, type):
        return {
            f.name: _ser(getattr(x, f.name)) for f in dataclasses.fields(x)
        }
    return x


def _flatten(prefix: str, x: Any, rows: list[tuple[str, str]]) -> None:
    if isinstance(x, dict):
        for k, v in x.items():
            _flatten(f"{prefix}.{k}" if prefix else str(k), v, rows)
    elif isinstance(x, list):
        for i, v in enumerate(x):
            _flatten(f"{prefix}[{i}]", v, rows)
    else:
        rows.append((prefix, json.dumps(x)))


def _emit(report: dict, args) -> None:
    if args.output == "csv":
        rows: list[tuple[str, str]] = []
        _flatten("", report, rows)
        text = "key,value\n" + "\n".join(f"{k},{v}" for k, v in rows) + "\n"
    else:
        text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- input parsing ----------------------------------------------------------------


def _load_ideal(args) -> IdealSpec:
    if args.ideal:
        with open(args.ideal) as fh:
            data = json.load(fh)
        n = data["n"]
        weight = Weight(tuple(data["weights"])) if data.get("weights") else None
        if "groups" in data:
            groups = [
                (g["degree"], [parse_poly(s, n) for s in g["gens"]])
                for g in data["groups"]
            ]
            return IdealSpec(n, groups, weight)
        return IdealSpec.from_gens(
            [parse_poly(s, n) for s in data["gens"]], weight
        )
    if not args.gens:
        raise ValueError("provide --ideal FILE or --gens")
    if args.nvars is None:
        raise ValueError("--gens needs -n/--nvars")
    weight = (
        Weight(tuple(int(v) for v in args.weights.split(",")))
        if getattr(args, "weights", None)
        else None
    )
    return IdealSpec.from_gens(
        [parse_poly(g, args.nvars) for g in args.gens], weight
    )


def _parse_region(text: str | None, k: int) -> Region | None:
    """Region grammar: comma-separated MODE:START-STOP blocks covering 0..k,
    modes full/zero/unit/primitive; or the single word full."""
    if text is None or text == "full":
        return None
    modes = {
        "full": Full,
        "zero": ZeroModP,
        "unit": UnitModP,
        "primitive": PrimitiveBlock,
    }
    blocks = []
    for part in text.split(","):
        mode, _, span = part.partition(":")
        if mode not in modes:
            raise ValueError(f"unknown region mode {mode!r}")
        start, _, stop = span.partition("-")
        blocks.append(((int(start), int(stop)), modes[mode]()))
    return Region(k, tuple(blocks))


def _parse_box(text: str | None, n: int) -> circle_mod.BoxSpec:
    if text is None:
        return circle_mod.BoxSpec.cube(n)
    sides = []
    for part in text.split(";"):
        lo, _, hi = part.partition(",")
        sides.append((Fraction(lo), Fraction(hi)))
    return circle_mod.BoxSpec(tuple(sides))


def _resolve_budget(args) -> int:
    if args.force:
        sys.stderr.write("warning: --force bypasses the evaluation budget\n")
        return 1 << 62
    if args.budget is not None:
        return args.budget
    env = os.environ.get("IOSC_BUDGET")
    if env:
        return int(env)
    return DEFAULT_BUDGET


def _config_echo(args, command: list[str], extra: dict | None = None) -> dict:
    cfg = {
        "argv": command,
        "budget": args._resolved_budget,
        "threads": args.threads,
        "output": args.output,
    }
    if extra:
        cfg.update(extra)
    return cfg


def _rebuild_argv(args, sub: list[str]) -> list[str]:
    out = list(sub)
    if args.ideal:
        out += ["--ideal", args.ideal]
    else:
        for g in args.gens or []:
            out += ["--gens", g]
        if args.nvars is not None:
            out += ["-n", str(args.nvars)]
        if getattr(args, "weights", None):
            out += ["--weights", args.weights]
    out += ["--budget", str(args._resolved_budget), "--threads", str(args.threads)]
    return out


# -- subcommand implementations ------------------------------------------------------


def cmd_expsum(args) -> dict:
    spec = _load_ideal(args)
    r = args.r if args.r is not None else spec.r
    budget, threads = args._resolved_budget, args.threads
    ec = expsum_mod.E_counts(spec, r, args.p, args.m, budget=budget, threads=threads)
    result: dict[str, Any] = {"E_counts": ec}
    if args.verify:
        if spec.r != r:
            raise ValueError("--verify needs a presentation with exactly r generators")
        cv = expsum_mod.E_charsum(spec, r, args.p, args.m, budget=budget, threads=threads)
        ok = expsum_mod.equals_rational(cv, ec)
        if not ok:
            raise OracleDisagreement(
                "character-sum and counting forms of E disagree"
            )
        result["E_charsum_residue"] = list(cv.vec)
        result["verify_moidef"] = ok
    sub = ["expsum", "-p", str(args.p), "-m", str(args.m), "-r", str(r)]
    if args.verify:
        sub.append("--verify")
    return {"config": _config_echo(args, _rebuild_argv(args, sub)), "result": result}


def cmd_count(args) -> dict:
    spec = _load_ideal(args)
    budget, threads = args._resolved_budget, args.threads
    region = _parse_region(args.region, spec.nvars)
    if os.environ.get("IOSC_FAULT_INJECT") == "count-oracle" and args.method == "both":
        a = count_zpm(spec, args.p, args.m, region, "lift", budget, threads)
        b = count_zpm(spec, args.p, args.m, region, "naive", budget, threads) + 1
        if a != b:
            raise OracleDisagreement(f"lift count {a} != naive count {b}")
    n = count_zpm(spec, args.p, args.m, region, args.method, budget, threads)
    sub = [
        "count",
        "-p",
        str(args.p),
        "-m",
        str(args.m),
        "--method",
        args.method,
    ]
    if args.region:
        sub += ["--region", args.region]
    return {
        "config": _config_echo(args, _rebuild_argv(args, sub)),
        "result": {"count": str(n), "method": args.method},
    }


def cmd_zeta(args) -> dict:
    spec = _load_ideal(args)
    budget, threads = args._resolved_budget, args.threads
    r = args.r if args.r is not None else spec.r
    result: dict[str, Any] = {}
    if args.theta:
        rep = zeta_mod.theta_probe(spec, r, args.p, args.max_order, budget, threads)
        result["theta"] = rep
    else:
        dist = zeta_mod.ord_distribution(spec, args.p, args.max_order, None, budget, threads)
        result["ord_distribution"] = {
            "coefficients": list(dist.coeffs),
            "tail_index": dist.tail_index,
        }
        comp = zeta_mod.compa_check(spec, r, args.p, max(2, args.max_order), None, budget, threads)
        result["series_identity"] = {
            "ok": comp.ok,
            "lhs": list(comp.lhs.coeffs),
            "rhs": list(comp.rhs.coeffs),
        }
        if not comp.ok:
            raise OracleDisagreement("zeta/exponential-sum series identity failed")
        if args.reconstruct:
            z = zeta_mod.zeta_series(spec, args.p, args.max_order, None, budget, threads)
            rec = zeta_mod.rational_reconstruct(z, args.max_order // 2)
            result["reconstruction"] = rec
            pole = zeta_mod.pole_report(spec, r, args.p, args.max_order, None, budget, threads)
            result["pole_report"] = pole
    sub = ["zeta", "-p", str(args.p), "--max-order", str(args.max_order), "-r", str(r)]
    if args.theta:
        sub.append("--theta")
    if args.reconstruct:
        sub.append("--reconstruct")
    return {"config": _config_echo(args, _rebuild_argv(args, sub)), "result": result}


def cmd_sseries(args) -> dict:
    spec = _load_ideal(args)
    budget, threads = args._resolved_budget, args.threads
    r = args.r if args.r is not None else spec.r
    result: dict[str, Any] = {}
    if args.irreducible:
        primes = [int(p) for p in args.primes.split(",")]
        rep = sseries_mod.irreducibility_probe(spec, r, primes, budget, threads)
        result["irreducibility"] = rep
        sub = ["sseries", "-r", str(r), "--irreducible", "--primes", args.primes]
    else:
        rep = sseries_mod.singular_series_partial(
            spec, r, args.qmax, args.sigma, budget, threads
        )
        result["singular_series"] = rep
        sub = ["sseries", "-r", str(r), "--qmax", str(args.qmax)]
        if args.sigma is not None:
            sub += ["--sigma", str(args.sigma)]
    return {"config": _config_echo(args, _rebuild_argv(args, sub)), "result": result}


def _parse_s_map(text: str | None) -> dict[int, int] | None:
    if not text:
        return None
    out = {}
    for part in text.split(","):
        k, _, v = part.partition(":")
        out[int(k)] = int(v)
    return out


def cmd_bounds(args) -> dict:
    result: dict[str, Any]
    sub = ["bounds", args.which]
    if args.which in ("sigma0", "sigmaw"):
        spec = _load_ideal(args)
        fn = bounds_mod.sigma0 if args.which == "sigma0" else bounds_mod.sigma_tilde0w
        res = fn(spec, s=_parse_s_map(args.s), budget=args._resolved_budget)
        result = {"bound": res}
        if args.s:
            sub += ["--s", args.s]
        return {
            "config": _config_echo(args, _rebuild_argv(args, sub)),
            "result": result,
        }
    if args.which == "birch":
        v = bounds_mod.birch_bound(args.nvars, args.s_dim, args.r, args.d)
        sub += ["-n", str(args.nvars), "--s-dim", str(args.s_dim), "-r", str(args.r), "-d", str(args.d)]
        result = {"birch_bound": v}
    elif args.which == "tau0":
        groups = []
        for part in args.groups.split(","):
            i, ri, si = part.split(":")
            groups.append((int(i), int(ri), int(si)))
        v = bounds_mod.bhb_tau0(groups, args.nvars)
        sub += ["--groups", args.groups, "-n", str(args.nvars)]
        result = {"tau0": v}
    elif args.which == "thresholds":
        t = bounds_mod.convolution_thresholds(args.r, args.R, args.d)
        sub += ["-r", str(args.r), "-R", str(args.R), "-d", str(args.d)]
        result = {"thresholds": t}
    elif args.which == "moi-fit":
        data = []
        for part in args.data.split(","):
            p_, m_, e_ = part.split(":")
            data.append((int(p_), int(m_), float(e_)))
        fit = bounds_mod.moi_fit(data, m_min=args.m_min)
        sub += ["--data", args.data, "--m-min", str(args.m_min)]
        result = {"fit": fit}
    else:
        raise ValueError(f"unknown bounds subcommand {args.which!r}")
    cfg = {
        "argv": sub + ["--budget", str(args._resolved_budget), "--threads", str(args.threads)],
        "budget": args._resolved_budget,
        "threads": args.threads,
        "output": args.output,
    }
    return {"config": cfg, "result": result}


def cmd_circle(args) -> dict:
    budget, threads = args._resolved_budget, args.threads
    if args.which == "waring":
        maps = []
        for spec_text in args.map:
            nv, _, comps = spec_text.partition(":")
            maps.append([parse_poly(c, int(nv)) for c in comps.split(";")])
        rep = circle_mod.waring_surjectivity(maps, args.p, args.m, args.ell, budget)
        missing = rep.missing[:50]
        result = {
            "surjective": rep.surjective,
            "missing_count": len(rep.missing),
            "missing_head": missing,
            "image_sizes": rep.image_sizes,
        }
        sub = ["circle", "waring", "-p", str(args.p), "-m", str(args.m), "--ell", str(args.ell)]
        for spec_text in args.map:
            sub += ["--map", spec_text]
        cfg = {
            "argv": sub + ["--budget", str(budget), "--threads", str(threads)],
            "budget": budget,
            "threads": threads,
            "output": args.output,
        }
        return {"config": cfg, "result": result}

    spec = _load_ideal(args)
    box = _parse_box(args.box, spec.nvars)
    eps = [float(e) for e in args.eps.split(",")] if args.eps else [0.2, 0.1]
    if args.which == "count":
        v = circle_mod.count_box_solutions(spec, box, args.B, budget, threads)
        result = {"count": str(v)}
        sub = ["circle", "count", "-B", str(args.B)]
    elif args.which == "jintegral":
        rep = circle_mod.singular_integral(
            spec, box, eps, sampler=args.sampler, seed=args.seed, budget=budget
        )
        result = {"j_integral": rep}
        sub = ["circle", "jintegral", "--sampler", args.sampler, "--seed", str(args.seed), "--eps", args.eps or "0.2,0.1"]
    elif args.which == "predict":
        rep = circle_mod.major_arc_prediction(
            spec, box, args.B, args.qmax, eps, seed=args.seed, budget=budget, threads=threads
        )
        result = {"prediction": rep}
        sub = [
            "circle", "predict", "-B", str(args.B), "--qmax", str(args.qmax),
            "--seed", str(args.seed), "--eps", args.eps or "0.2,0.1",
        ]
    else:
        raise ValueError(f"unknown circle subcommand {args.which!r}")
    if args.box:
        sub += ["--box", args.box]
    return {"config": _config_echo(args, _rebuild_argv(args, sub)), "result": result}


def cmd_jet(args) -> dict:
    budget = args._resolved_budget
    if args.which == "expand":
        if args.poly is None or args.nvars is None:
            raise ValueError("jet expand needs --poly and -n")
        f = parse_poly(args.poly, args.nvars)
        jets = jet_expand(f, args.order, args.start)
        result = {"jets": [repr(j) for j in jets]}
        sub = [
            "jet", "expand", "--poly", args.poly, "-n", str(args.nvars),
            "--order", str(args.order), "--start", str(args.start),
        ]
        cfg = {
            "argv": sub + ["--budget", str(budget), "--threads", str(args.threads)],
            "budget": budget,
            "threads": args.threads,
            "output": args.output,
        }
        return {"config": cfg, "result": result}
    if args.which == "highpart-check":
        from .poly import highpart_check

        spec = _load_ideal(args)
        ok = highpart_check(spec, args.m)
        if not ok:
            raise OracleDisagreement("top weighted part of the jet differs")
        sub = ["jet", "highpart-check", "-m", str(args.m)]
        return {
            "config": _config_echo(args, _rebuild_argv(args, sub)),
            "result": {"highpart_identity": ok},
        }
    raise ValueError(f"unknown jet subcommand {args.which!r}")


# -- parser ----------------------------------------------------------------------------


def _add_common(sp, ideal=True):
    sp.add_argument("--budget", type=int, default=None, help="evaluation point budget")
    sp.add_argument("--force", action="store_true", help="bypass the budget")
    sp.add_argument("--threads", type=int, default=1)
    sp.add_argument("--output", choices=["json", "csv"], default="json")
    sp.add_argument("-o", "--out", default=None, help="write the report to a file")
    if ideal:
        sp.add_argument("--ideal", default=None, help="JSON ideal file")
        sp.add_argument("--gens", action="append", default=None, help="inline generator")
        sp.add_argument("-n", "--nvars", type=int, default=None)
        sp.add_argument("--weights", default=None, help="comma-separated weights")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="iosc",
        description="exact exponential sums, local zeta data and singular series of polynomial ideals",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("expsum", help="exponential sums E^(r)(p, m)")
    _add_common(sp)
    sp.add_argument("-p", type=int, required=True)
    sp.add_argument("-m", type=int, required=True)
    sp.add_argument("-r", type=int, default=None)
    sp.add_argument("--verify", action="store_true", help="cross-check the character-sum form")
    sp.set_defaults(fn=cmd_expsum)

    sp = sub.add_parser("count", help="point counts over Z/p^m")
    _add_common(sp)
    sp.add_argument("-p", type=int, required=True)
    sp.add_argument("-m", type=int, required=True)
    sp.add_argument("--method", choices=["lift", "naive", "both"], default="both")
    sp.add_argument("--region", default=None)
    sp.set_defaults(fn=cmd_count)

    sp = sub.add_parser("zeta", help="truncated zeta series and probes")
    _add_common(sp)
    sp.add_argument("-p", type=int, required=True)
    sp.add_argument("--max-order", type=int, required=True)
    sp.add_argument("-r", type=int, default=None)
    sp.add_argument("--reconstruct", action="store_true")
    sp.add_argument("--theta", action="store_true", help="local factor probe")
    sp.set_defaults(fn=cmd_zeta)

    sp = sub.add_parser("sseries", help="singular series and diagnostics")
    _add_common(sp)
    sp.add_argument("-r", type=int, default=None)
    sp.add_argument("--qmax", type=int, default=20)
    sp.add_argument("--sigma", type=float, default=None)
    sp.add_argument("--irreducible", action="store_true")
    sp.add_argument("--primes", default="5,7,11,13")
    sp.set_defaults(fn=cmd_sseries)

    sp = sub.add_parser("bounds", help="closed-form exponent bounds")
    sp.add_argument("which", choices=["sigma0", "sigmaw", "birch", "tau0", "thresholds", "moi-fit"])
    _add_common(sp)
    sp.add_argument("--s", default=None, help="degree:s pairs, comma separated")
    sp.add_argument("--s-dim", type=int, default=0)
    sp.add_argument("-r", type=int, default=1)
    sp.add_argument("-R", type=int, default=1)
    sp.add_argument("-d", type=int, default=2)
    sp.add_argument("--groups", default=None, help="degree:count:s triples")
    sp.add_argument("--data", default=None, help="p:m:absE triples for moi-fit")
    sp.add_argument("--m-min", type=int, default=2)
    sp.set_defaults(fn=cmd_bounds)

    sp = sub.add_parser("circle", help="major-arc numerics and Waring probes")
    sp.add_argument("which", choices=["count", "jintegral", "predict", "waring"])
    _add_common(sp)
    sp.add_argument("-B", type=int, default=10)
    sp.add_argument("--qmax", type=int, default=20)
    sp.add_argument("--box", default=None, help="lo,hi;lo,hi;... inside [-1,1]")
    sp.add_argument("--eps", default=None, help="epsilon ladder, comma separated")
    sp.add_argument("--sampler", choices=["mc", "grid"], default="mc")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("-p", type=int, default=7)
    sp.add_argument("-m", type=int, default=1)
    sp.add_argument("--ell", type=int, default=2)
    sp.add_argument("--map", action="append", default=None, help="nvars:comp;comp;...")
    sp.set_defaults(fn=cmd_circle)

    sp = sub.add_parser("jet", help="jet expansion and the top-part identity")
    sp.add_argument("which", choices=["expand", "highpart-check"])
    _add_common(sp)
    sp.add_argument("--poly", default=None)
    sp.add_argument("--order", type=int, default=2)
    sp.add_argument("--start", type=int, choices=[0, 1], default=0)
    sp.add_argument("-m", type=int, default=2)
    sp.set_defaults(fn=cmd_jet)

    return ap


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_INVALID if e.code not in (0, None) else EXIT_OK
    try:
        args._resolved_budget = _resolve_budget(args)
        report = args.fn(args)
        _emit(_ser(report), args)
        return EXIT_OK
    except BudgetExceeded as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_BUDGET
    except OracleDisagreement as e:
        sys.stderr.write(f"internal inconsistency: {e}\n")
        return EXIT_INCONSISTENT
    except (ValueError, PolyParseError, KeyError, OSError, json.JSONDecodeError) as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
