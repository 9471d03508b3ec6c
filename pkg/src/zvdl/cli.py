"""Command line entry point: ``zvdl {eval,trace,coarsen,render,verify}``.

Exit codes: 0 ok, 2 usage, 3 domain error, 4 trace failure, 5 verdict failure.
Complex numbers are written ``re,im`` (``a+bi`` is accepted too).  Any flag
can also come from an INI file given with ``--config``; keys are the flag
names without dashes, read from ``[zvdl]`` and from a section named after
the command.  Flags on the command line win.
"""

from __future__ import annotations

import argparse
import ast
import configparser
import json
import math
import operator
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .fixpoints import (
    MAX_ZERO_INDEX,
    FixedPointSequence,
    FixpointError,
    NewtonConfig,
    Progression,
    TraceBroken,
    nearest_fixpoint_to_zero,
    riemann_zero,
    trace_ray,
)
from .harness import (
    CONSISTENT,
    RIEMANN_ZERO,
    NotConverged,
    check_corollary,
    check_question1,
    check_theorem1,
    run_conjecture2,
)
from .render import (
    A_PHI,
    COMPLEMENT_A_INFINITY,
    BasinParams,
    PlotRegion,
    basin_plot,
    quadrant_plot,
    spiral_overlay,
    write_ppm,
)
from .spirals import (
    SpiralError,
    coarsen,
    coarsening_sweep,
    eversion_embed,
    polygon_length,
    unwrap_theta,
    write_statistics_csv,
)
from .traceio import TraceCache, fmt17, read_trace_csv, write_trace_csv
from .variants import GenericFunction, RaySpec, v
from .zeta import PoleError, ZetaError, zeta, zeta_array

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_TRACE, EXIT_VERDICT = 0, 2, 3, 4, 5

FIGURE1 = "(s-1)^2*(s-i)*(s+1)^5/(s+i)^3"
SIGMA_GAP_MAX = 1e-5


class UsageError(Exception):
    pass


# --------------------------------------------------------------------------
# parsing helpers


def parse_complex(text: str) -> complex:
    """``re,im`` or a literal such as ``2``, ``-1.5+2i``, ``3j``."""
    t = str(text).strip().replace(" ", "")
    try:
        if "," in t:
            re, im = t.split(",")
            return complex(float(re), float(im))
        return complex(t.replace("i", "j"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from exc


def parse_range(text: str, descending: bool = False) -> list[int]:
    """``a..b``, ``a-b``, a single integer, or a comma list of those.

    ``a..b`` with ``a > b`` is empty unless ``descending`` is set.
    """
    out: list[int] = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        sep = ".." if ".." in part else ("-" if "-" in part[1:] else None)
        if sep:
            a, b = part.split(sep, 1)
            a, b = int(a), int(b)
            if a <= b:
                out.extend(range(a, b + 1))
            elif descending:
                out.extend(range(a, b - 1, -1))
        else:
            out.append(int(part))
    return out


def parse_filters(text: str) -> list[int]:
    """Filter indices: ``512,128,64``, ``512..16`` or ``2^0..2^13`` (descending)."""
    t = str(text).replace(" ", "")
    if t.count("^") == 2 and ".." in t:
        a, b = t.split("..")
        base_a, e_a = a.split("^")
        base_b, e_b = b.split("^")
        if float(base_a) != float(base_b):
            raise argparse.ArgumentTypeError("power ranges need a common base")
        base = float(base_a)
        lo, hi = sorted((int(e_a), int(e_b)))
        vals = [int(math.floor(base ** n)) for n in range(hi, lo - 1, -1)]
        seen: list[int] = []
        for k in vals:
            if k not in seen:
                seen.append(k)
        return seen
    vals = parse_range(t, descending=True)
    if not vals or any(k < 1 for k in vals):
        raise argparse.ArgumentTypeError(f"bad filter indices {text!r}")
    return vals


def parse_ks(text: str) -> list[int]:
    return [int(k) for k in str(text).split(",") if k.strip()]


_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow, ast.BitXor: operator.pow}
_FUNCS = {"exp": np.exp, "log": np.log, "sin": np.sin, "cos": np.cos, "sqrt": np.sqrt,
          "zeta": zeta_array}
_CONSTS = {"i": 1j, "j": 1j, "pi": math.pi, "e": math.e}


def function_from_spec(spec: str) -> GenericFunction:
    """Build ``f(s)`` from an arithmetic expression in ``s``.

    Allowed: numbers, ``s``, ``i``, ``pi``, ``e``, ``+ - * / ^ **`` and the
    functions exp, log, sin, cos, sqrt, zeta.  ``fig1`` names the
    four-junction test function and ``fixres:Z`` means ``V_Z(s) - s``.
    """
    spec = spec.strip()
    if spec == "fig1":
        spec = FIGURE1
    if spec.startswith("fixres:"):
        from .variants import fix_residual_function

        return fix_residual_function(parse_complex(spec.split(":", 1)[1]))
    try:
        tree = ast.parse(spec.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise UsageError(f"cannot parse function {spec!r}: {exc.msg}") from exc

    def ev(node, s):
        if isinstance(node, ast.Expression):
            return ev(node.body, s)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float, complex)):
            return node.value
        if isinstance(node, ast.Name):
            if node.id == "s":
                return s
            if node.id in _CONSTS:
                return _CONSTS[node.id]
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left, s), ev(node.right, s))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            val = ev(node.operand, s)
            return -val if isinstance(node.op, ast.USub) else val
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in _FUNCS \
                and len(node.args) == 1 and not node.keywords:
            return _FUNCS[node.func.id](np.asarray(ev(node.args[0], s), dtype=complex))
        raise UsageError(f"unsupported element in function spec: {ast.dump(node)[:60]}")

    ev(tree, np.array([0.5 + 0.5j]))  # validate once

    def vf(s):
        with np.errstate(all="ignore"):
            return np.asarray(ev(tree, np.asarray(s, dtype=complex)), dtype=complex) * np.ones_like(s)

    def f(s):
        return complex(vf(np.array([complex(s)]))[0])

    return GenericFunction(f, name=spec, vfunc=vf)


def fmt15(z: complex) -> str:
    z = complex(z)
    if z.imag == 0:
        return f"{z.real:.15g}"
    return f"{z.real:.15g}{z.imag:+.15g}i"


# --------------------------------------------------------------------------
# commands


def cmd_eval(args) -> int:
    s, z = args.s, args.z
    try:
        val = zeta(s)
        print(fmt15(val))
        if z != 0:
            print(f"V_z(s) = {fmt15(v(z, s))}")
    except PoleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ZetaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    return EXIT_OK


def _trace_manifest(args) -> dict:
    return {"command": "trace", "zero_index": args.zero, "u": [args.u.real, args.u.imag],
            "dx": args.dx, "count": args.count, "tol": args.tol}


def _get_trace(args, cache: TraceCache | None):
    manifest = _trace_manifest(args)
    if cache is not None:
        seq = cache.get(manifest)
        if seq is not None:
            return seq, manifest, True
    rho = riemann_zero(args.zero)
    cfg = NewtonConfig(tol=args.tol)
    psi = nearest_fixpoint_to_zero(rho, cfg)
    seq = trace_ray(RaySpec(args.u), Progression(args.dx, args.count), psi, cfg, target=rho)
    if cache is not None:
        cache.put(manifest, seq)
    return seq, manifest, False


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n")


def cmd_trace(args) -> int:
    if not 1 <= args.zero <= MAX_ZERO_INDEX:
        raise UsageError(f"--zero must be in 1..{MAX_ZERO_INDEX}")
    try:
        ray = RaySpec(args.u)
        Progression(args.dx, args.count)
        NewtonConfig(tol=args.tol)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    cache = None if args.no_cache else TraceCache(args.cache_dir)
    manifest = _trace_manifest(args)
    manifest["K"] = args.K
    _write_json(out / "manifest.json", manifest)
    try:
        seq, _, hit = _get_trace(args, cache)
    except TraceBroken as exc:
        if exc.partial is not None:
            write_trace_csv(out / "trace.csv", exc.partial, partial=True)
        print(f"trace failed: {exc}", file=sys.stderr)
        return EXIT_TRACE
    except (FixpointError, ValueError) as exc:
        print(f"trace failed: {exc}", file=sys.stderr)
        return EXIT_TRACE
    write_trace_csv(out / "trace.csv", seq)
    K = max(args.K) if args.K else 50
    write_statistics_csv(out / "stats.csv", unwrap_theta(seq), K if len(seq) >= 3 else 2)
    rep = run_conjecture2(args.zero, ray, seq.prog, NewtonConfig(tol=args.tol), args.K, trace=seq)
    _write_json(out / "report.json", rep.to_dict())
    print(rep.to_json(sort_keys=True))
    return EXIT_OK if rep.error is None else EXIT_TRACE


def _load_trace(name) -> FixedPointSequence:
    # a trace output directory stands for the trace.csv inside it
    path = Path(name)
    if path.is_dir():
        path = path / "trace.csv"
    if not path.is_file():
        raise UsageError(f"no such trace file {path}")
    try:
        return read_trace_csv(path)
    except (OSError, ValueError, KeyError) as exc:
        raise UsageError(f"cannot read trace {path}: {exc}") from exc


def cmd_coarsen(args) -> int:
    seq = _load_trace(args.trace)
    if args.start_x:
        seq = seq.subsequence(args.start_x)
    try:
        sweep = coarsening_sweep(seq, None, args.filters)
    except SpiralError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    lines = ["filter_index,points,slope,intercept,r_squared,slope_diff,intercept_diff,polygon_length"]
    for i, (k, m) in enumerate(sweep.models):
        sd = fmt17(sweep.slope_diffs[i - 1]) if i else ""
        bd = fmt17(sweep.intercept_diffs[i - 1]) if i else ""
        length = polygon_length(eversion_embed(coarsen(seq, k)))
        lines.append(f"{k},{m.window[1] + 1},{fmt17(m.m)},{fmt17(m.b)},{fmt17(m.r_squared)},{sd},{bd},{fmt17(length)}")
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _region(args) -> PlotRegion:
    try:
        return PlotRegion(args.center, args.width, args.height, args.px_width, args.px_height)
    except ValueError as exc:
        raise UsageError(f"bad region: {exc}") from exc


def cmd_render(args) -> int:
    if args.kind == "quadrant":
        img = quadrant_plot(function_from_spec(args.function), _region(args), args.disk_radius, args.axis_tol)
        write_ppm(img, args.out)
        print(json.dumps(img.report, sort_keys=True))
    elif args.kind == "basin":
        mode = {"a-phi": A_PHI, "complement-a-infinity": COMPLEMENT_A_INFINITY}[args.mode]
        try:
            params = BasinParams(mode, args.max_iter, args.escape_radius, args.attract_tol)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        img = basin_plot(params, _region(args))
        write_ppm(img, args.out)
        print(json.dumps({"marked": int(img.marked.sum()), "unresolved": int(img.unresolved.sum())}))
    else:
        if not args.trace:
            raise UsageError("render spiral needs --trace")
        seq = _load_trace(args.trace)
        if args.start_x:
            seq = seq.subsequence(args.start_x)
        if args.filter > 1:
            seq = coarsen(seq, args.filter)
        img = spiral_overlay(seq, None, None, evert=not args.no_evert, px=args.px_width)
        write_ppm(img, args.out)
        print(json.dumps({"markers": img.markers, "chords": img.chords}))
    return EXIT_OK


def _verify_one(suite: str, n: int, args) -> tuple[dict, bool]:
    prog = Progression(args.dx, args.count)
    rep = run_conjecture2(n, RaySpec(args.u), prog, NewtonConfig(tol=args.tol), args.K)
    out = {"zero_index": n, "suite": suite}
    if rep.trace is None or rep.error and suite != "conjecture2":
        out["error"] = rep.error
        return out, False
    try:
        if suite == "conjecture2":
            out.update(rep.to_dict())
            ok = rep.error is None and rep.converged and bool(rep.nearly_log_verdicts) \
                and all(rep.nearly_log_verdicts.values()) and rep.nearly_uniform
        elif suite == "theorem1":
            t = check_theorem1(rep.trace)
            out.update({"verdict": t.verdict, "hypothesis_value": t.hypothesis_value,
                        "g_at_limit": t.g_at_limit, "identity_max_rel_err": t.identity_max_rel_err})
            ok = t.verdict == CONSISTENT
        elif suite == "corollary":
            c = check_corollary(rep.trace)
            out["verdict"] = c
            ok = c == RIEMANN_ZERO
        else:
            q = check_question1(rep.trace)
            out.update({"sigma": q.sigma_estimate, "sigma_gap": q.gap_to_half})
            ok = q.gap_to_half < SIGMA_GAP_MAX
    except NotConverged as exc:
        out["error"] = f"not converged: {exc}"
        ok = False
    return out, ok


def cmd_verify(args) -> int:
    zeros = parse_range(args.zeros)
    if not zeros:
        raise UsageError("empty zero range")
    if any(not 1 <= n <= MAX_ZERO_INDEX for n in zeros):
        raise UsageError(f"zero indices must be in 1..{MAX_ZERO_INDEX}")
    results = []
    all_ok = True
    for n in zeros:
        res, ok = _verify_one(args.suite, n, args)
        res["ok"] = ok
        all_ok &= ok
        results.append(res)
        print(json.dumps(res, sort_keys=True))
    summary = {"suite": args.suite, "zeros": zeros, "passed": sum(r["ok"] for r in results),
               "total": len(results), "all_ok": all_ok}
    print(json.dumps(summary, sort_keys=True))
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        for r in results:
            _write_json(out / f"{args.suite}-{r['zero_index']}.json", r)
        _write_json(out / "summary.json", summary)
    return EXIT_OK if all_ok else EXIT_VERDICT


# --------------------------------------------------------------------------
# parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="zvdl", description="Numerical lab for the zeta variants zeta(s) exp(z s).")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--config", help="INI file with default flag values")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    e = sub.add_parser("eval", help="evaluate zeta(s) and V_z(s)")
    e.add_argument("--s", type=parse_complex, required=True)
    e.add_argument("--z", type=parse_complex, default=0j)
    e.set_defaults(func=cmd_eval)

    def trace_opts(q):
        q.add_argument("--u", type=parse_complex, default=1 + 0j, help="ray direction re,im")
        q.add_argument("--dx", type=float, default=1.0)
        q.add_argument("--count", type=int, default=301, help="number of progression points")
        q.add_argument("--tol", type=float, default=1e-12)
        q.add_argument("--K", type=parse_ks, default=[25, 50, 100], help="window lengths, comma list")

    t = sub.add_parser("trace", help="trace fixed points toward a Riemann zero")
    t.add_argument("--zero", type=int, required=True)
    trace_opts(t)
    t.add_argument("--out", default="out")
    t.add_argument("--cache-dir", default=None)
    t.add_argument("--no-cache", action="store_true")
    t.set_defaults(func=cmd_trace)

    c = sub.add_parser("coarsen", help="coarsening sweep of a trace file")
    c.add_argument("--trace", required=True)
    c.add_argument("--filters", type=parse_filters, default=parse_filters("512,256,128,64,32,16"))
    c.add_argument("--start-x", type=float, default=0.0)
    c.add_argument("--out", default=None)
    c.set_defaults(func=cmd_coarsen)

    r = sub.add_parser("render", help="write a PPM image")
    r.add_argument("kind", choices=["quadrant", "basin", "spiral"])
    r.add_argument("--function", default="fig1")
    r.add_argument("--center", type=parse_complex, default=0j)
    r.add_argument("--width", type=float, default=4.0)
    r.add_argument("--height", type=float, default=4.0)
    r.add_argument("--px-width", type=int, default=400)
    r.add_argument("--px-height", type=int, default=400)
    r.add_argument("--disk-radius", type=float, default=10.0)
    r.add_argument("--axis-tol", type=float, default=0.0)
    r.add_argument("--mode", choices=["a-phi", "complement-a-infinity"], default="a-phi")
    r.add_argument("--max-iter", type=int, default=400)
    r.add_argument("--escape-radius", type=float, default=1e6)
    r.add_argument("--attract-tol", type=float, default=1e-6)
    r.add_argument("--trace", default=None)
    r.add_argument("--start-x", type=float, default=0.0)
    r.add_argument("--filter", type=int, default=1)
    r.add_argument("--no-evert", action="store_true")
    r.add_argument("--out", required=True)
    r.set_defaults(func=cmd_render)

    vv = sub.add_parser("verify", help="run a harness suite over a range of zeros")
    vv.add_argument("suite", choices=["theorem1", "corollary", "conjecture2", "question1"])
    vv.add_argument("--zeros", required=True, help="e.g. 1..10")
    trace_opts(vv)
    vv.add_argument("--out", default=None)
    vv.set_defaults(func=cmd_verify)
    return p


def _config_argv(path: str, command: str, parser: argparse.ArgumentParser) -> list[str]:
    cp = configparser.ConfigParser()
    if not cp.read(path):
        raise UsageError(f"cannot read config file {path}")
    items: dict[str, str] = {}
    for section in ("zvdl", command):
        if cp.has_section(section):
            items.update(cp.items(section))
    sub = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction)).choices[command]
    flags = {}
    for act in sub._actions:
        for opt in act.option_strings:
            if opt.startswith("--"):
                flags[opt[2:].replace("-", "_")] = (opt, act)
    argv: list[str] = []
    for key, val in items.items():
        key = key.replace("-", "_")
        if key not in flags:
            raise UsageError(f"unknown config key {key!r} for {command}")
        opt, act = flags[key]
        if isinstance(act, argparse._StoreTrueAction):
            if val.strip().lower() in ("1", "true", "yes", "on"):
                argv.append(opt)
        else:
            argv.append(f"{opt}={val}")
    return argv


_COMPLEX_FLAGS = {"--s", "--z", "--u", "--center"}


def _glue_negative_values(argv: list[str]) -> list[str]:
    # argparse takes "-1,0" for an option; "--center=-1,0" is unambiguous
    out: list[str] = []
    i = 0
    while i < len(argv):
        a = argv[i]
        if a in _COMPLEX_FLAGS and i + 1 < len(argv) and argv[i + 1][:1] == "-" \
                and argv[i + 1][1:2] in set("0123456789."):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
            continue
        out.append(a)
        i += 1
    return out


def main(argv=None) -> int:
    argv = _glue_negative_values(list(sys.argv[1:] if argv is None else argv))
    parser = build_parser()
    try:
        pre = argparse.ArgumentParser(add_help=False)
        pre.add_argument("--config")
        known, _ = pre.parse_known_args(argv)
        if known.config:
            commands = {"eval", "trace", "coarsen", "render", "verify"}
            i = next((k for k, a in enumerate(argv) if a in commands), None)
            if i is None:
                raise UsageError("no command given")
            # config values go right after the command so explicit flags override them
            argv = argv[:i + 1] + _config_argv(known.config, argv[i], parser) + argv[i + 1:]
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except argparse.ArgumentTypeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
