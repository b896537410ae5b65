"""Command line: theorem drivers, experiment runners, JSON and SVG output.

Exit codes: 0 verified / success, 1 falsified or a residual over tolerance,
2 usage error.  PCL_SEED, when set, overrides --seed.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from fractions import Fraction

from . import __version__, dsl, lie, markedbox, pentagram, poncelet, skewer, steiner, svg
from .report import FALSIFIED, VERIFIED, encode
from .scalars import fmt_scalar

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- JSON ----------------------------------------------------------------------


def _num(x) -> str:
    if isinstance(x, (int, Fraction)):
        return fmt_scalar(x)
    return repr(float(x))


def residual_stats(values) -> dict:
    if not values:
        return {"max": None, "mean": None}
    if all(isinstance(v, (int, Fraction)) for v in values):
        vals = [abs(Fraction(v)) for v in values]
        return {"max": _num(max(vals)), "mean": _num(sum(vals, Fraction(0)) / len(vals))}
    vals = [abs(float(v)) for v in values]
    return {"max": _num(max(vals)), "mean": _num(sum(vals) / len(vals))}


def make_report(subcommand, config, verdict, requested, completed, residuals, witnesses=(), details=None,
                runtime_ms=None) -> dict:
    return {
        "tool_version": __version__,
        "subcommand": subcommand,
        "config": config,
        "verdict": verdict,
        "trials": {"requested": requested, "completed": completed},
        "residual_stats": residual_stats(list(residuals)),
        "witnesses": [] if verdict == VERIFIED else [encode(w) for w in witnesses if w is not None],
        "details": encode(details or {}),
        "runtime_ms": runtime_ms,
    }


def emit_json(report: dict, path):
    text = json.dumps(report, indent=2, ensure_ascii=False) + "\n"
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def from_verification(subcommand, config, rep, runtime_ms=None) -> dict:
    return make_report(subcommand, config, rep.verdict, rep.trials_requested, rep.trials_completed,
                       rep.max_residuals, [rep.witness], {"theorem_id": rep.theorem_id, **rep.details},
                       runtime_ms)


# -- theorem registry ------------------------------------------------------------


def theorem_registry() -> dict:
    """id -> family, in a fixed order."""
    reg = {}
    for name in dsl.builtin_names():
        reg[name] = "dsl"
    for name in pentagram.THEOREMS:
        reg[name] = "pentagram"
    for name in steiner.STEINER_THEOREMS:
        reg[name] = "steiner"
    for name in skewer.SKEWER_THEOREMS:
        reg[name] = "skewer"
    reg["hesse-sylvester"] = "hesse"
    for name in lie.LIE_THEOREMS:
        reg[name] = "lie"
    return reg


# -- subcommands -----------------------------------------------------------------


def _dsl_svg(script, seed, path, witness=None):
    inst = dsl.instance_from_dict(witness["instance"]) if witness else dsl.sample_instance(script, seed, 0)
    vals = dsl.evaluate_objects(script, inst)
    svg.dsl_scene(script, vals, title=script.name).write(path)


def _run_script(script, args):
    rep = dsl.verify(script, trials=args.trials or 20, seed=args.seed)
    if args.svg:
        _dsl_svg(script, args.seed, args.svg, rep.witness)
    return rep


def cmd_verify(args, config):
    try:
        script = dsl.load_script(args.script)
    except FileNotFoundError:
        raise UsageError(f"no such script or builtin: {args.script}") from None
    except dsl.ScriptError as e:
        raise UsageError(f"{args.script}: {e}") from None
    rep = _run_script(script, args)
    return from_verification("verify", config, rep), rep.verdict


def cmd_theorem(args, config):
    reg = theorem_registry()
    tid = args.id
    if tid not in reg:
        raise UsageError(f"unknown theorem id {tid!r}; valid ids: {', '.join(reg)}")
    fam = reg[tid]
    if fam == "dsl":
        rep = _run_script(dsl.load_builtin(tid), args)
    elif fam == "pentagram":
        rep = pentagram.run_pentagram_theorem(tid, trials=args.trials or 10, seed=args.seed, n=args.n)
        if args.svg:
            _pentagram_svg(tid, rep, args)
    elif fam == "steiner":
        rep = steiner.run_steiner_theorem(tid, trials=args.trials or 20, seed=args.seed)
    elif fam == "skewer":
        rep = skewer.run_skewer_theorem(tid, trials=args.trials or 20, seed=args.seed)
    elif fam == "lie":
        rep = lie.run_lie_identity(tid, trials=args.trials or 100, seed=args.seed)
    else:
        res = skewer.hesse_sylvester_check()
        verdict = VERIFIED if res["ok"] else FALSIFIED
        return make_report("theorem", config, verdict, 1, 1, [0 if res["ok"] else 1], [res], res), verdict
    return from_verification("theorem", config, rep), rep.verdict


def _pentagram_svg(tid, rep, args):
    spec = pentagram.THEOREMS[tid]
    word, size = rep.details["word"], rep.details["n"]
    rng = dsl.trial_rng(args.seed, 0)
    for _ in range(100):
        P = pentagram._generate(spec, size, rng)
        try:
            Q = pentagram.t_word(P, word)
            break
        except (pentagram.DegenerateDiagonal, ValueError):
            continue
    else:
        return
    svg.polygon_scene(P, Q, title=f"{tid}: T_{word}").write(args.svg)


def _coord(s: str) -> Fraction:
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a number: {s!r}") from None


def _dimension(fn, *a):
    try:
        return fn(*a)
    except (markedbox.TooFewPoints, markedbox.DegenerateScaleRange) as e:
        raise UsageError(f"{e} (raise --depth)") from None


def cmd_pappus_curve(args, config):
    x, y = _coord(args.x), _coord(args.y)
    try:
        box = markedbox.box_from_coords(x, y)
    except markedbox.NotConvex as e:
        raise UsageError(str(e)) from None
    if args.depth > markedbox.MAX_DEPTH:
        raise UsageError(f"depth must be <= {markedbox.MAX_DEPTH}")
    details = {"x": x, "y": y, "depth": args.depth, "chart": args.chart}
    residuals = []
    if args.svg:
        h = markedbox.arc_array(box, min(args.depth, 14), 0)
        pts = h[:, :2] / h[:, 2:3]
        sc = svg.curve_scene(pts, title=f"Pappus curve [{x}, {y}]")
        for p, q in ((0, 1), (1, 2), (2, 3), (3, 0)):
            sc.segment(markedbox.UNIT_FRAME[p].affine(), markedbox.UNIT_FRAME[q].affine(), color="#aaaaaa")
        sc.write(args.svg)
    if args.dimension or args.csv:
        est = _dimension(markedbox.pappus_dimension, x, y, args.depth, args.chart)
        details["dimension"] = est.to_dict()
        if args.csv:
            with open(args.csv, "w", newline="", encoding="utf-8") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(["scale", "count"])
                for s, c in zip(est.scales, est.counts):
                    w.writerow([repr(s), c])
    if args.sweep:
        rows = _dimension(markedbox.dimension_sweep, args.sweep, args.depth, args.chart)
        details["sweep"] = rows
        details["sweep_max"] = max(r["estimate"] for r in rows)
    return make_report("pappus-curve", config, VERIFIED, 1, 1, residuals, details=details), VERIFIED


def cmd_poncelet(args, config):
    gamma = (args.a1, args.a2)
    if not args.a1 >= args.a2 > 0:
        raise UsageError("need a1 >= a2 > 0")
    if args.n < 3 or args.n % 2 == 0:
        raise UsageError("n must be odd and >= 3")
    lam = poncelet.find_caustic_for_n(gamma, args.n)
    rho = poncelet.rotation_number(lam, gamma)
    closure = poncelet.closure_error(lam, gamma, args.n)
    grid = poncelet.poncelet_grid(gamma, args.n, phi0=args.phi0, lam=lam)
    rep = poncelet.grid_report(grid)
    tol = args.tol
    checks = {"rotation_number": abs(rho - 1 / args.n), "closure": abs(closure),
              "conic_residual": rep["max_conic_residual"], "equivalence_residual": rep["max_equivalence_residual"]}
    limits = {"rotation_number": 1e-12, "closure": 1e-8, "conic_residual": tol, "equivalence_residual": 1e-6}
    ok = all(checks[k] < limits[k] for k in checks) and rep["all_equivalent"]
    verdict = VERIFIED if ok else FALSIFIED
    if args.svg:
        svg.poncelet_scene(grid, title=f"Poncelet grid n={args.n}").write(args.svg)
    details = {"lambda": lam, "rotation_number": rho, "checks": checks, "limits": limits, "grid": rep}
    return make_report("poncelet", config, verdict, 1, 1, list(checks.values()), [details] if not ok else (),
                       details), verdict


def cmd_steiner(args, config):
    sq = steiner.square_law_samples(args.samples, args.seed)
    db = steiner.doubling_samples(args.samples, args.seed)
    res = [float(abs(s["residual"])) for s in sq] + [float(d["residual"]) for d in db]
    bad = [s for s in sq if abs(s["residual"]) > args.tol or not s["secant_preserved"]]
    bad += [d for d in db if d["residual"] > args.tol]
    verdict = FALSIFIED if bad else VERIFIED
    details = {"square_law": [{"x_in": complex(s["x_in"]), "x_out": complex(s["x_out"]),
                               "residual": float(abs(s["residual"])), "secant_preserved": s["secant_preserved"]}
                              for s in sq],
               "doubling": db}
    return make_report("steiner", config, verdict, 2 * args.samples, len(sq) + len(db), res, bad, details), verdict


def cmd_skewer_pentagram(args, config):
    if args.n < 5:
        raise UsageError("n must be >= 5")
    rng = dsl.trial_rng(args.seed, 0)
    if args.coaxial:
        lines, axis = skewer.random_coaxial_lines(args.n, rng)
    else:
        lines, axis = [skewer.random_euc_line(rng) for _ in range(args.n)], None
    orb = skewer.skewer_pentagram_orbit(lines, args.iters, axis=axis)
    done = orb["iterations_completed"] == args.iters
    axis_max = max(orb["axis_residuals"], default=0.0)
    ok = done and (axis is None or axis_max <= args.tol)
    verdict = VERIFIED if ok else FALSIFIED
    details = {k: orb[k] for k in ("n", "iterations_requested", "iterations_completed", "index_convention", "dps",
                                   "truncated", "scales", "invariants")}
    details["coaxial"] = bool(args.coaxial)
    details["axis_residual_max"] = axis_max if axis is not None else None
    if orb["distance_matrices"]:
        details["final_distance_matrix"] = orb["distance_matrices"][-1]
        details["final_gram_matrix"] = orb["gram_matrices"][-1]
    details["final_lines"] = orb["final_lines"]
    residuals = orb["axis_residuals"] or [0.0]
    return make_report("skewer-pentagram", config, verdict, args.iters, orb["iterations_completed"], residuals,
                       [{"truncated": orb["truncated"], "axis_residual_max": axis_max}] if not ok else (),
                       details), verdict


# -- argument parsing ------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--json", metavar="PATH", help="write the report here ('-' for stdout)")
    common.add_argument("--svg", metavar="PATH")
    common.add_argument("--timing", action="store_true", help="record runtime_ms (otherwise null)")

    p = _Parser(prog="pcl", description="Projective configuration theorems and their dynamics.")
    p.add_argument("--version", action="version", version=f"pcl {__version__}")
    sub = p.add_subparsers(dest="subcommand", parser_class=_Parser)

    v = sub.add_parser("verify", parents=[common], help="verify a configuration script")
    v.add_argument("script", help="path to a .pcf script or a builtin name")
    v.add_argument("--trials", type=int, default=None)

    t = sub.add_parser("theorem", parents=[common], help="run a named theorem driver")
    t.add_argument("id")
    t.add_argument("--trials", type=int, default=None)
    t.add_argument("--n", type=int, default=None, help="size parameter (degen-4n multiplier)")

    c = sub.add_parser("pappus-curve", parents=[common], help="Pappus curve of a marked box [x, y]")
    c.add_argument("--x", default="1/2")
    c.add_argument("--y", default="1/2")
    c.add_argument("--depth", type=int, default=12)
    c.add_argument("--chart", choices=("affine", "elliptic"), default="affine")
    c.add_argument("--dimension", action="store_true", help="estimate the box dimension")
    c.add_argument("--csv", metavar="PATH", help="(scale, count) pairs of the estimate")
    c.add_argument("--sweep", type=int, default=0, metavar="N", help="dimension sweep over an N x N grid")

    q = sub.add_parser("poncelet", parents=[common], help="Poncelet grid in a confocal family")
    q.add_argument("--a1", type=float, default=2.0)
    q.add_argument("--a2", type=float, default=1.0)
    q.add_argument("--n", type=int, default=9)
    q.add_argument("--phi0", type=float, default=0.3)
    q.add_argument("--tol", type=float, default=1e-7)

    s = sub.add_parser("steiner", parents=[common], help="Steiner map square law and doubling samples")
    s.add_argument("--samples", type=int, default=50)
    s.add_argument("--tol", type=float, default=1e-9)

    k = sub.add_parser("skewer-pentagram", parents=[common], help="orbit of the skewer pentagram map")
    k.add_argument("--n", type=int, default=7)
    k.add_argument("--iters", type=int, default=1000)
    k.add_argument("--coaxial", action="store_true", help="start from lines meeting one axis at right angles")
    k.add_argument("--tol", type=float, default=1e-9)
    return p


COMMANDS = {
    "verify": cmd_verify,
    "theorem": cmd_theorem,
    "pappus-curve": cmd_pappus_curve,
    "poncelet": cmd_poncelet,
    "steiner": cmd_steiner,
    "skewer-pentagram": cmd_skewer_pentagram,
}

_NOT_CONFIG = ("json", "svg", "timing", "subcommand", "csv")


def run(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
        if args.subcommand is None:
            raise UsageError(f"missing subcommand; one of: {', '.join(COMMANDS)}")
        env = os.environ.get("PCL_SEED")
        if env is not None and env != "":
            try:
                args.seed = int(env)
            except ValueError:
                raise UsageError(f"PCL_SEED must be an integer, got {env!r}") from None
        if getattr(args, "trials", None) is not None and args.trials < 1:
            raise UsageError("--trials must be >= 1")
        config = {k: (fmt_scalar(v) if isinstance(v, float) else v) for k, v in vars(args).items()
                  if k not in _NOT_CONFIG}
        t0 = time.perf_counter()
        report, verdict = COMMANDS[args.subcommand](args, config)
    except UsageError as e:
        print(f"pcl: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as e:  # --help / --version
        return int(e.code or 0)
    if args.timing:
        report["runtime_ms"] = round((time.perf_counter() - t0) * 1000, 3)
    if args.json:
        try:
            emit_json(report, args.json)
        except OSError as e:
            print(f"pcl: error: {e}", file=sys.stderr)
            return EXIT_USAGE
    stats = report["residual_stats"]
    label = config.get("id") or config.get("script") or args.subcommand
    print(f"{label}: {verdict} ({report['trials']['completed']}/{report['trials']['requested']}, "
          f"max residual {stats['max']})", file=sys.stderr if args.json == "-" else sys.stdout)
    return EXIT_OK if verdict == VERIFIED else EXIT_FAIL


def main():
    sys.exit(run())

