"""Command-line front end: generate / solve / check / bench / evolve."""
from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import approx, bench
from .core import EpsKind, Game, normalize, read_game, write_game
from .evolve import (FitnessSpec, GAParams, TARGET_NAMES, evolve,
                     write_history)
from .exact import lemke_howson, support_enumeration
from .gen import CLASS_TAGS, GenSpec, make_game
from .verify import RationalProfile, exact_epsilon

EXACT_ALGOS = ("se", "lh")
APPROX_ALGOS = ("pure", "dmp", "bbm1", "bbm2", "ts", "ks", "ksplus")


def _fmt_vec(v) -> str:
    return " ".join(f"{float(e):.6f}" for e in v)


def _fmt_frac_vec(v) -> str:
    return " ".join(str(e) for e in v)


def cmd_generate(args: argparse.Namespace) -> int:
    size = args.size
    if args.cls == "blotto" and args.soldiers is not None:
        size = args.soldiers
    if size is None:
        print("generate: --size (or --soldiers for blotto) is required",
              file=sys.stderr)
        return 2
    spec = GenSpec(tag=args.cls, size=size, rho=args.rho, hills=args.hills,
                   subset=args.subset, seed=args.seed)
    g = make_game(spec)
    write_game(g, args.out)
    print(f"wrote {args.cls} game {g.m}x{g.n} (seed {args.seed}) to {args.out}")
    return 0


def _load_game(path: str, do_normalize: bool) -> Game:
    g = read_game(path, name=Path(path).stem)
    return normalize(g) if do_normalize else g


def _solve_exact(g: Game, args: argparse.Namespace) -> int:
    start = time.perf_counter()
    if args.algorithm == "se":
        res = support_enumeration(g, budget=args.timeout)
        counts = f"support pairs checked: {res.pairs_checked}"
        failed = res.profile is None
        status = "timeout" if res.timed_out else "ok"
    else:
        res = lemke_howson(g, initial_label=args.label, budget=args.timeout)
        counts = f"pivots: {res.pivots}"
        failed = res.profile is None
        status = res.status
    elapsed = time.perf_counter() - start
    if failed:
        print(f"status: {status}")
        print(counts)
        print(f"time: {elapsed:.3f}s")
        return 2
    p = res.profile
    print(f"x: {_fmt_frac_vec(p.x)}")
    print(f"y: {_fmt_frac_vec(p.y)}")
    print(f"supports: {p.support[0]} {p.support[1]}")
    print(f"exact eps: {exact_epsilon(g, p)}")
    print(counts)
    print(f"time: {elapsed:.3f}s")
    return 0


def _solve_approx(g: Game, args: argparse.Namespace) -> int:
    name = args.algorithm
    start = time.perf_counter()
    try:
        if name == "ts":
            res = approx.ts(g, delta=args.delta, budget=args.timeout,
                            init=args.ts_init, init_seed=args.init_seed)
        elif name == "ksplus":
            res = approx.ks_plus(g, budget=args.timeout)
        else:
            fn = {"pure": approx.best_pure}.get(name, getattr(approx, name, None))
            res = fn(g)
    except approx.ApproxTimeout as exc:
        print(f"status: timeout ({exc})")
        return 2
    elapsed = time.perf_counter() - start
    exact = exact_epsilon(g, res.profile, res.kind)
    print(f"x: {_fmt_vec(res.profile.x)}")
    print(f"y: {_fmt_vec(res.profile.y)}")
    print(f"eps ({res.kind.value}): {res.eps:.9f}")
    print(f"exact eps: {float(exact):.9f}")
    print(f"time: {elapsed:.3f}s")
    if name == "ts" and args.trace:
        t = res.trace
        print(json.dumps({"delta": t.delta, "iterations": t.iterations,
                          "f_log": t.f_log, "lp_rows": t.lp_rows}))
    return 0


def cmd_solve(args: argparse.Namespace) -> int:
    g = _load_game(args.game, not args.no_normalize)
    if args.algorithm in EXACT_ALGOS:
        return _solve_exact(g, args)
    return _solve_approx(g, args)


def _read_profile(path: str, m: int, n: int) -> RationalProfile:
    lines = [ln for ln in Path(path).read_text().splitlines() if ln.strip()]
    if len(lines) != 2:
        raise ValueError("profile file needs two nonempty lines: x then y")
    x = tuple(Fraction(tok) for tok in lines[0].split())
    y = tuple(Fraction(tok) for tok in lines[1].split())
    if len(x) != m or len(y) != n:
        raise ValueError(f"profile shape {len(x)}/{len(y)} does not match "
                         f"game {m}x{n}")
    return RationalProfile(x, y)


def cmd_check(args: argparse.Namespace) -> int:
    g = _load_game(args.game, args.normalize)
    p = _read_profile(args.profile, g.m, g.n)
    kind = EpsKind.WELL_SUPPORTED if args.kind == "ws" else EpsKind.APPROX_NE
    eps = exact_epsilon(g, p, kind)
    print(f"eps ({args.kind}) = {eps} = {float(eps):.12g}")
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    cfg = bench.load_config(args.config)
    if args.out is not None:
        cfg.out = args.out
    if args.workers is not None:
        cfg.workers = args.workers
    n = 0
    for rec in bench.run_bench(cfg):
        n += 1
        eps = "-" if rec.eps is None else f"{rec.eps:.6f}"
        flag = " timeout" if rec.timed_out else ""
        print(f"{rec.cls}/{rec.size} seed {rec.seed} {rec.algorithm}"
              f"{':' + rec.flags if rec.flags else ''}: eps {eps} "
              f"({rec.time_s:.2f}s){flag}")
    print(f"{n} new cells -> {cfg.out}")
    if args.summary:
        print(bench.summary_text(bench.summarize(bench.read_records(cfg.out))))
    return 0


def cmd_evolve(args: argparse.Namespace) -> int:
    targets = tuple(t.strip() for t in args.targets.split(",") if t.strip())
    mode = args.mode or ("single" if len(targets) == 1 else "min")
    spec = FitnessSpec(targets=targets, mode=mode,
                       penalize_domination=args.penalize_domination,
                       penalty_weight=args.penalty_weight,
                       mixed_domination=args.mixed_domination)
    params = GAParams(population=args.pop, generations=args.generations,
                      tournament=args.tournament, crossover=args.crossover,
                      mutation=args.mutation, elitism=args.elitism)
    result = evolve(spec, params, shape=(args.size, args.size),
                    seed=args.seed)
    write_game(result.genome.raw_game(), args.out)
    history_path = args.history or str(Path(args.out).with_suffix(".jsonl"))
    write_history(result.history, history_path)
    print(f"best fitness: {result.fitness:.6f}")
    print(f"wrote game to {args.out}, history to {history_path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="bimatrix",
        description="Bimatrix game generators, solvers, and benchmarks.")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="emit a benchmark game to a file")
    g.add_argument("--class", dest="cls", required=True, choices=CLASS_TAGS)
    g.add_argument("--size", type=int, default=None)
    g.add_argument("--rho", type=float, default=0.0)
    g.add_argument("--hills", type=int, default=3)
    g.add_argument("--soldiers", type=int, default=None,
                   help="blotto soldier count (alias for --size)")
    g.add_argument("--subset", type=int, default=2)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(fn=cmd_generate)

    s = sub.add_parser("solve", help="run one solver on a game file")
    s.add_argument("game")
    s.add_argument("--algorithm", required=True,
                   choices=EXACT_ALGOS + APPROX_ALGOS)
    s.add_argument("--delta", type=float, default=0.001)
    s.add_argument("--ts-init", default="uniform",
                   choices=("uniform", "bbm", "random"))
    s.add_argument("--init-seed", type=int, default=0)
    s.add_argument("--trace", action="store_true",
                   help="print the TS trace as a final JSON line")
    s.add_argument("--label", type=int, default=1,
                   help="initial label dropped by lh")
    s.add_argument("--timeout", type=float, default=None)
    s.add_argument("--no-normalize", action="store_true",
                   help="skip the min-max rescale applied on load")
    s.set_defaults(fn=cmd_solve)

    c = sub.add_parser("check", help="exact epsilon of a profile file")
    c.add_argument("game")
    c.add_argument("profile", help="two lines: x then y; entries like 1/3")
    c.add_argument("--kind", choices=("ne", "ws"), default="ne")
    c.add_argument("--normalize", action="store_true")
    c.set_defaults(fn=cmd_check)

    b = sub.add_parser("bench", help="run a benchmark matrix from a config")
    b.add_argument("--config", required=True)
    b.add_argument("--out", default=None)
    b.add_argument("--workers", type=int, default=None)
    b.add_argument("--summary", action="store_true")
    b.set_defaults(fn=cmd_bench)

    e = sub.add_parser("evolve", help="search for hard instances with a GA")
    e.add_argument("--targets", required=True,
                   help="comma-separated subset of " + ",".join(TARGET_NAMES))
    e.add_argument("--mode", choices=("single", "min"), default=None)
    e.add_argument("--generations", type=int, default=200)
    e.add_argument("--pop", type=int, default=100)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--size", type=int, default=5)
    e.add_argument("--tournament", type=int, default=3)
    e.add_argument("--crossover", type=float, default=0.9)
    e.add_argument("--mutation", type=float, default=0.02)
    e.add_argument("--elitism", type=int, default=2)
    e.add_argument("--penalize-domination", action="store_true")
    e.add_argument("--penalty-weight", type=float, default=0.1)
    e.add_argument("--mixed-domination", action="store_true")
    e.add_argument("--out", required=True)
    e.add_argument("--history", default=None,
                   help="JSON-lines history path (default: out with .jsonl)")
    e.set_defaults(fn=cmd_evolve)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
