"""Command-line front end: ``generate``, ``verify`` and ``plot``.

Exit codes: 0 success or all certificates passed, 1 a certificate failed,
2 usage or configuration error, 3 construction or runtime failure.
Settings come from flags or a ``key = value`` file given by ``--config``;
flags win.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize

from . import dioph, verify
from .lift import LiftedSequence
from .spiral import GOLDEN, FermatSource, LiftedSource, ListSource, SphericalSource, SpiralSet, generate
from .tetra import GreedyConfig, GreedyCutoffError, tetra_source

REPORT_VERSION = 1
EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2, 3
SUITES = ("separation", "covering", "discreteness", "covering-radius", "gaps", "density")


class ConfigError(Exception):
    pass


def liouville_number(terms: int = 4) -> float:
    """sum_{j>=1} 10^(-j!), truncated where further terms vanish in float64."""
    return sum(10.0 ** -math.factorial(j) for j in range(1, terms + 1))


# --- parsing helpers ----------------------------------------------------------


def _floats(text: str) -> List[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _ints(text: str) -> List[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _parse_poly(text: str) -> Tuple[List[int], Tuple[float, float]]:
    """'poly:1,1,-2,-1@1,2' -> coefficients (highest first) and root bracket."""
    try:
        body = text.split(":", 1)[1]
        coeffs, bracket = body.split("@")
        lo, hi = _floats(bracket)
        return _ints(coeffs), (lo, hi)
    except ValueError as exc:
        raise ConfigError(f"bad polynomial {text!r}; expected poly:c0,c1,...@lo,hi") from exc


def _bad_vector(text: Optional[str], d: int) -> dioph.BadVector:
    named = {"golden": 1, "cos2pi7": 2}
    if text in (None, "", "auto"):
        return dioph.make_bad_vector(d)
    if text in named:
        if named[text] != d:
            raise ConfigError(f"alpha {text!r} has dimension {named[text]}, need {d}")
        return dioph.make_bad_vector(d)
    if text.startswith("poly:"):
        coeffs, bracket = _parse_poly(text)
        try:
            vec = dioph.bad_vector_from_polynomial(coeffs, bracket)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if vec.d != d:
            raise ConfigError(f"polynomial gives dimension {vec.d}, need {d}")
        return vec
    raise ConfigError(f"unknown alpha {text!r}")


def _fermat_alpha(text: Optional[str]) -> Tuple[float, str]:
    if text in (None, "", "golden"):
        return GOLDEN, "golden"
    if text == "liouville":
        return liouville_number(), "liouville"
    if text.startswith("poly:"):
        coeffs, bracket = _parse_poly(text)
        try:
            return optimize.brentq(lambda x: np.polyval(coeffs, x), *bracket), text
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    try:
        return float(text), text
    except ValueError as exc:
        raise ConfigError(f"unknown alpha {text!r}") from exc


def build_source(args) -> SphericalSource:
    family = args.family
    if family == "fermat":
        if args.dim not in (None, 2):
            raise ConfigError("the fermat family is planar (dim 2)")
        alpha, label = _fermat_alpha(args.alpha)
        return FermatSource(alpha, args.angle_unit, label)
    if family == "lifted":
        n = args.dim or 3
        if n < 2:
            raise ConfigError("lifted sequences need dim >= 2")
        return LiftedSource(LiftedSequence(_bad_vector(args.alpha, n - 1)))
    if family == "tetra":
        if args.dim not in (None, 3):
            raise ConfigError("the tetra family lives in dim 3")
        if args.gamma <= 0 or args.p_cutoff < 1:
            raise ConfigError("gamma must be positive and p-cutoff >= 1")
        cfg = GreedyConfig(_bad_vector(args.alpha or "cos2pi7", 2), args.gamma, args.count, args.p_cutoff)
        return tetra_source(cfg)
    raise ConfigError(f"unknown family {family!r}")


def read_points(path: str) -> np.ndarray:
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"no such file: {path}")
    lines = p.read_text().splitlines()
    if not lines or not lines[0].startswith("k,x1"):
        raise ConfigError(f"{path}: expected a 'k,x1,...,xn' header")
    rows = [ln for ln in lines[1:] if ln.strip()]
    if not rows:
        raise ConfigError(f"{path}: no points")
    try:
        data = np.loadtxt(io.StringIO("\n".join(rows)), delimiter=",", ndmin=2)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    n_cols = len(lines[0].split(","))
    if data.shape[1] != n_cols:
        raise ConfigError(f"{path}: rows do not match the header")
    if not np.array_equal(data[:, 0], np.arange(1, data.shape[0] + 1)):
        raise ConfigError(f"{path}: indices must run 1, 2, ..., N")
    return data[:, 1:]


def format_points(points: np.ndarray) -> str:
    n = points.shape[1]
    out = io.StringIO()
    out.write("k," + ",".join(f"x{i}" for i in range(1, n + 1)) + "\n")
    for k, row in enumerate(points, start=1):
        out.write(f"{k}," + ",".join(f"{c:.17g}" for c in row) + "\n")
    return out.getvalue()


def _clean(obj):
    """JSON-safe copy: tuples to lists, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else repr(x)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def dump_json(doc) -> str:
    return json.dumps(_clean(doc), sort_keys=True, indent=2) + "\n"


def _emit(text: str, out: Optional[str]):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


# --- subcommands ----------------------------------------------------------------


def cmd_generate(args) -> int:
    if args.count < 1:
        raise ConfigError("count must be >= 1")
    source = build_source(args)
    spiral = generate(source, args.count)
    if args.format == "csv":
        text = format_points(spiral.points)
    elif args.format == "json":
        text = dump_json(
            {
                "report_version": REPORT_VERSION,
                "source": source.describe(),
                "count": args.count,
                "points": spiral.points.tolist(),
            }
        )
    elif spiral.n == 2:
        text = render_svg(spiral.points)
    else:
        raise ConfigError("svg output needs planar (2D) points")
    _emit(text, args.out)
    return EXIT_OK


def _largest_k(N: int, scale: float, n: int) -> int:
    """Largest k whose symmetric window floor(scale k^(1-1/n)) stays within N."""
    k = N
    while k > 1 and k + verify.window_sizes([k], scale, n)[0] > N:
        k -= 1
    return k


def _suite_separation(U, args) -> Dict[str, object]:
    N, n = U.shape
    k_max = args.k_max or _largest_k(N, args.kappa, n)
    rep = verify.separation_statistic(U, args.kappa, args.k_min, k_max)
    return {"passed": rep.passed, **rep.to_dict()}


def _suite_covering(U, args) -> Dict[str, object]:
    N, n = U.shape
    k_top = _largest_k(N, args.c, n)
    samples = args.k_samples or [max(2, k_top // 2), k_top]
    doc: Dict[str, object] = {}
    C = args.C
    if C is None:
        k_cal = args.calibrate_k or max(2, k_top // 10)
        C = verify.calibrate_covering(U, args.c, k_cal, args.directions, args.seed)
        doc["calibration"] = {"k": k_cal, "margin": 1.5, "C": C}
    rep = verify.covering_check(U, args.c, C, samples, args.directions, args.seed)
    doc.update({"passed": rep.passed, **rep.to_dict()})
    return doc


def _suite_discreteness(P, args) -> Dict[str, object]:
    value = verify.min_pairwise_distance(P)
    floor = args.min_distance or 0.0
    return {"passed": value > floor, "min_distance": value, "threshold": floor}


def _suite_covering_radius(P, args) -> Dict[str, object]:
    r_max = float(np.linalg.norm(P, axis=1).max())
    annulus = tuple(args.annulus) if args.annulus else (0.25 * r_max, 0.75 * r_max)
    value = verify.covering_radius_estimate(P, annulus, args.samples, args.seed)
    ok = math.isfinite(value) and (args.max_radius is None or value <= args.max_radius)
    return {
        "passed": ok,
        "covering_radius": value,
        "annulus": list(annulus),
        "samples": args.samples,
        "seed": args.seed,
        "threshold": args.max_radius,
    }


def _suite_gaps(P, args) -> Dict[str, object]:
    if P.shape[1] != 2:
        raise ConfigError("the gaps suite needs planar points")
    x = np.arctan2(P[:, 1], P[:, 0]) / (2.0 * np.pi)
    N = P.shape[0]
    R_values = args.R_values or [r for r in (4, 8, 16, 32, 64, 128, 256) if (r + args.gap_h) ** 2 <= N + 1]
    if not R_values:
        raise ConfigError("too few points for any gap window")
    rep = verify.marklof_gaps(x, args.gap_h, R_values)
    return {"passed": rep.min_stat > 0 and math.isfinite(rep.max_stat), **rep.to_dict()}


def _suite_density(P, args, source) -> Dict[str, object]:
    N, n = P.shape
    top = N ** (1.0 / n)
    R_values = args.R_values or [top / 4, top / 2, math.floor(top * (1 - 1e-12))]
    spiral = SpiralSet(source, P)
    rep = verify.density_scan(spiral, R_values, args.caps, args.seed)
    ok = rep.counts == rep.expected and rep.cap_discrepancy <= args.max_cap_discrepancy
    return {"passed": ok, "threshold": args.max_cap_discrepancy, **rep.to_dict()}


def cmd_verify(args) -> int:
    suites = [s.strip() for s in args.suites.split(",") if s.strip()]
    unknown = set(suites) - set(SUITES)
    if unknown or not suites:
        raise ConfigError(f"unknown suites {sorted(unknown)}; choose from {', '.join(SUITES)}")
    if args.input:
        P = read_points(args.input)
        source: SphericalSource = ListSource(P / np.linalg.norm(P, axis=1)[:, None], kind="file")
        source_doc = {"kind": "file", "path": args.input}
    elif args.family:
        source = build_source(args)
        P = generate(source, args.count).points
        source_doc = source.describe()
    else:
        raise ConfigError("verify needs --input or --family")
    if P.shape[0] < 2:
        raise ConfigError("need at least two points")
    U = P / np.linalg.norm(P, axis=1)[:, None]
    results = {}
    for name in suites:
        try:
            if name == "separation":
                results[name] = _suite_separation(U, args)
            elif name == "covering":
                results[name] = _suite_covering(U, args)
            elif name == "discreteness":
                results[name] = _suite_discreteness(P, args)
            elif name == "covering-radius":
                results[name] = _suite_covering_radius(P, args)
            elif name == "gaps":
                results[name] = _suite_gaps(P, args)
            else:
                results[name] = _suite_density(P, args, source)
        except (verify.InsufficientPrefixError, ValueError) as exc:
            raise ConfigError(f"{name}: {exc}") from exc
    params = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "config_file")}
    passed = all(r["passed"] for r in results.values())
    doc = {
        "report_version": REPORT_VERSION,
        "command": "verify",
        "source": source_doc,
        "parameters": params,
        "suites": results,
        "passed": passed,
    }
    _emit(dump_json(doc), args.out)
    for name, r in results.items():
        if not r["passed"]:
            detail = r.get("failing_buckets") or ""
            print(f"verify: {name} failed {detail}".rstrip(), file=sys.stderr)
    return EXIT_OK if passed else EXIT_FAIL


def render_svg(P: np.ndarray, dot_radius: float = 0.2, size: int = 400) -> str:
    half = float(np.abs(P).max()) * 1.05 + dot_radius
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" height="{size}" '
        f'viewBox="{-half:.6f} {-half:.6f} {2 * half:.6f} {2 * half:.6f}">',
        f'<g stroke="#999999" stroke-width="{half / 400:.6f}">',
        f'<line x1="{-half:.6f}" y1="0" x2="{half:.6f}" y2="0"/>',
        f'<line x1="0" y1="{-half:.6f}" x2="0" y2="{half:.6f}"/>',
        "</g>",
        '<g fill="#000000">',
    ]
    # SVG's y axis points down
    lines += [f'<circle cx="{x:.6f}" cy="{-y:.6f}" r="{dot_radius:.6f}"/>' for x, y in P]
    lines += ["</g>", "</svg>", ""]
    return "\n".join(lines)


def cmd_plot(args) -> int:
    if not args.input:
        raise ConfigError("plot needs --input")
    P = read_points(args.input)
    if P.shape[1] != 2:
        raise ConfigError("plot needs planar (2D) points")
    _emit(render_svg(P, args.dot_radius), args.out)
    return EXIT_OK


# --- argument parsing --------------------------------------------------------------


def _family_args(p: argparse.ArgumentParser):
    p.add_argument("--family", choices=("fermat", "lifted", "tetra"))
    p.add_argument("--alpha", help="golden, cos2pi7, liouville, a number, or poly:c0,...@lo,hi")
    p.add_argument("--dim", type=int, help="ambient dimension n (lifted: n = d + 1)")
    p.add_argument("--count", type=int, default=1000)
    p.add_argument("--angle-unit", choices=("radian", "turn"), default="radian")
    p.add_argument("--gamma", type=float, default=0.1)
    p.add_argument("--p-cutoff", type=int, default=10**6)


def build_parser() -> Tuple[argparse.ArgumentParser, Dict[str, argparse.ArgumentParser]]:
    parser = argparse.ArgumentParser(prog="spiraldelone", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write spiral points")
    _family_args(gen)
    gen.add_argument("--format", choices=("csv", "json", "svg"), default="csv")
    gen.set_defaults(func=cmd_generate)

    ver = sub.add_parser("verify", help="run verification suites, print a JSON report")
    ver.add_argument("--input", help="CSV point file from 'generate'")
    _family_args(ver)
    ver.add_argument("--suites", default="separation,covering,discreteness")
    ver.add_argument("--kappa", type=float, default=0.5)
    ver.add_argument("--k-min", type=int, default=10)
    ver.add_argument("--k-max", type=int)
    ver.add_argument("--c", type=float, default=1.0)
    ver.add_argument("--C", type=float)
    ver.add_argument("--calibrate-k", type=int)
    ver.add_argument("--k-samples", type=_ints)
    ver.add_argument("--directions", type=int, default=500)
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--min-distance", type=float)
    ver.add_argument("--annulus", type=_floats)
    ver.add_argument("--samples", type=int, default=10000)
    ver.add_argument("--max-radius", type=float)
    ver.add_argument("--gap-h", type=float, default=1.0)
    ver.add_argument("--R-values", type=_floats)
    ver.add_argument("--caps", type=int, default=200)
    ver.add_argument("--max-cap-discrepancy", type=float, default=0.05)
    ver.set_defaults(func=cmd_verify)

    plot = sub.add_parser("plot", help="render planar points as SVG")
    plot.add_argument("--input")
    plot.add_argument("--dot-radius", type=float, default=0.2)
    plot.set_defaults(func=cmd_plot)

    for p in (gen, ver, plot):
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--config", dest="config_file", help="key = value settings file")
    return parser, {"generate": gen, "verify": ver, "plot": plot}


def read_config(path: str) -> Dict[str, str]:
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"no such config file: {path}")
    out = {}
    for lineno, raw in enumerate(p.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _apply_config(sub: argparse.ArgumentParser, config: Dict[str, str]):
    dests = {a.dest: a for a in sub._actions}
    unknown = sorted(set(config) - set(dests) - {"config_file"})
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    # string defaults go through each option's type converter on parse
    sub.set_defaults(**config)


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, subs = build_parser()
    try:
        pre = argparse.ArgumentParser(add_help=False)
        pre.add_argument("command", nargs="?")
        pre.add_argument("--config", dest="config_file")
        known, _ = pre.parse_known_args(argv)
        if known.config_file and known.command in subs:
            _apply_config(subs[known.command], read_config(known.config_file))
        args = parser.parse_args(argv)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except GreedyCutoffError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (ValueError, ArithmeticError, MemoryError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
