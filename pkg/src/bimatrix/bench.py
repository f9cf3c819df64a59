"""Benchmark harness: experiment matrices over (game, algorithm) cells.

Timing covers the solver call only; game construction, CSV writing, and the
exact-rational epsilon recomputation are untimed. Every recorded epsilon
comes from the verify module, never from the algorithm's own report.

Timeouts are cooperative where the algorithm supports a budget (ts, ksplus,
se, lh); a SIGALRM watchdog at timeout * 1.1 catches the rest. The watchdog
only arms on the main thread, so with workers > 1 cells rely on cooperative
budgets and post-hoc elapsed checks alone.
"""
from __future__ import annotations

import csv
import signal
import sys
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:          # 3.10
    import tomli as tomllib

from . import approx
from .approx import ApproxTimeout
from .core import EpsKind, Game, read_game
from .exact import lemke_howson, support_enumeration
from .gen import GenSpec, make_game
from .verify import exact_epsilon

ALGO_NAMES = ("pure", "dmp", "bbm1", "bbm2", "ts", "ks", "ksplus", "lh", "se")

CSV_HEADER = ["class", "size", "seed", "algorithm", "flags", "time_s", "eps",
              "kind", "timed_out", "iterations"]


@dataclass(frozen=True)
class AlgoSpec:
    """One algorithm column of the experiment matrix."""
    name: str
    delta: float | None = None
    label: int = 1

    def __post_init__(self):
        if self.name not in ALGO_NAMES:
            raise ValueError(f"unknown algorithm {self.name!r}")
        if self.name == "ts" and (self.delta is None or self.delta <= 0):
            raise ValueError("ts needs a positive delta")

    @property
    def flags(self) -> str:
        if self.name == "ts":
            return f"delta={self.delta:g}"
        if self.name == "lh":
            return f"label={self.label}"
        return ""

    @classmethod
    def parse(cls, text: str) -> "AlgoSpec":
        """'ts:delta=0.001' or 'lh:label=3' or plain 'bbm1'."""
        name, _, rest = text.partition(":")
        kwargs = {}
        if rest:
            for part in rest.split(","):
                key, _, val = part.partition("=")
                if key == "delta":
                    kwargs["delta"] = float(val)
                elif key == "label":
                    kwargs["label"] = int(val)
                else:
                    raise ValueError(f"unknown flag {key!r} in {text!r}")
        return cls(name, **kwargs)


@dataclass
class BenchConfig:
    games: list                      # GenSpec entries or game file paths
    algorithms: list
    timeout: float = 900.0
    seeds: int = 1
    workers: int = 1
    out: str | None = None

    def __post_init__(self):
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")
        if not self.games or not self.algorithms:
            raise ValueError("need at least one game and one algorithm")
        if self.seeds < 1 or self.workers < 1:
            raise ValueError("seeds and workers must be >= 1")


@dataclass
class BenchRecord:
    cls: str
    size: str
    seed: int
    algorithm: str
    flags: str
    time_s: float
    eps: float | None
    kind: str
    timed_out: bool
    iterations: int | None

    def __post_init__(self):
        if self.timed_out and self.eps is not None:
            raise ValueError("timed-out record cannot carry an epsilon")

    @property
    def key(self) -> tuple:
        return (self.cls, self.size, self.seed, self.algorithm, self.flags)

    def csv_row(self) -> list:
        return [self.cls, self.size, self.seed, self.algorithm, self.flags,
                f"{self.time_s:.6f}",
                "" if self.eps is None else f"{self.eps:.9f}",
                self.kind, int(self.timed_out),
                "" if self.iterations is None else self.iterations]

    @classmethod
    def from_csv_row(cls, row: list) -> "BenchRecord":
        return cls(row[0], row[1], int(row[2]), row[3], row[4],
                   float(row[5]), float(row[6]) if row[6] else None,
                   row[7], bool(int(row[8])),
                   int(row[9]) if row[9] else None)


class _WatchdogTimeout(Exception):
    pass


@contextmanager
def _watchdog(seconds: float | None):
    """SIGALRM guard for solvers without a cooperative budget hook."""
    if seconds is None or threading.current_thread() is not threading.main_thread():
        yield
        return

    def handler(signum, frame):
        raise _WatchdogTimeout()

    old = signal.signal(signal.SIGALRM, handler)
    signal.setitimer(signal.ITIMER_REAL, seconds)
    try:
        yield
    finally:
        signal.setitimer(signal.ITIMER_REAL, 0.0)
        signal.signal(signal.SIGALRM, old)


def _dispatch(algo: AlgoSpec, game: Game, timeout: float):
    """Run one algorithm; returns (profile, kind, iterations, timed_out)."""
    if algo.name == "se":
        res = support_enumeration(game, budget=timeout)
        if res.profile is None:
            return None, EpsKind.APPROX_NE, res.pairs_checked, True
        return res.profile, EpsKind.APPROX_NE, res.pairs_checked, False
    if algo.name == "lh":
        res = lemke_howson(game, initial_label=algo.label, budget=timeout)
        if res.status in ("timeout", "pivot_limit"):
            return None, EpsKind.APPROX_NE, res.pivots, True
        if res.profile is None:
            raise RuntimeError(f"lh failed with status {res.status}")
        return res.profile, EpsKind.APPROX_NE, res.pivots, False
    if algo.name == "ts":
        r = approx.ts(game, algo.delta, budget=timeout)
    elif algo.name == "ksplus":
        r = approx.ks_plus(game, budget=timeout)
    else:
        r = getattr(approx, {"pure": "best_pure"}.get(algo.name, algo.name))(game)
    iters = r.iterations if r.iterations else None
    return r.profile, r.kind, iters, False


def run_cell(game: Game, cls: str, size: str, seed: int, algo: AlgoSpec,
             timeout: float) -> BenchRecord:
    """One (game, algorithm) cell: timed solver run plus untimed checking."""
    kind = EpsKind.WELL_SUPPORTED if algo.name in ("ks", "ksplus") \
        else EpsKind.APPROX_NE
    start = time.perf_counter()
    try:
        with _watchdog(timeout * 1.1):
            profile, kind, iters, timed_out = _dispatch(algo, game, timeout)
        elapsed = time.perf_counter() - start
    except (ApproxTimeout, _WatchdogTimeout):
        elapsed = time.perf_counter() - start
        return BenchRecord(cls, size, seed, algo.name, algo.flags, elapsed,
                           None, kind.value, True, None)
    except Exception as exc:
        elapsed = time.perf_counter() - start
        print(f"bench: {algo.name} failed on {cls}/{size}/{seed}: {exc}",
              file=sys.stderr)
        return BenchRecord(cls, size, seed, algo.name, algo.flags, elapsed,
                           None, kind.value, False, None)
    if timed_out or elapsed > timeout:
        return BenchRecord(cls, size, seed, algo.name, algo.flags, elapsed,
                           None, kind.value, True, iters)
    eps = float(exact_epsilon(game, profile, kind))
    return BenchRecord(cls, size, seed, algo.name, algo.flags, elapsed,
                       eps, kind.value, False, iters)


def _game_cells(cfg: BenchConfig):
    """Yield (build, cls, size, seed) with construction deferred."""
    for entry in cfg.games:
        if isinstance(entry, GenSpec):
            for i in range(cfg.seeds):
                seed = entry.seed + i
                yield (lambda e=entry, s=seed: make_game(e, seed=s),
                       entry.tag, _size_label_spec(entry), seed)
        else:
            path = Path(entry)
            yield (lambda p=path: read_game(p), path.stem, "", 0)


def _size_label_spec(spec: GenSpec) -> str:
    return str(spec.size)


def _size_label(game: Game) -> str:
    return str(game.m) if game.m == game.n else f"{game.m}x{game.n}"


def read_records(path) -> list[BenchRecord]:
    out = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is not None and header != CSV_HEADER:
            raise ValueError(f"unexpected CSV header in {path}")
        for row in reader:
            out.append(BenchRecord.from_csv_row(row))
    return out


def run_bench(cfg: BenchConfig):
    """Generator over fresh BenchRecords, appending to cfg.out as it goes.

    Cells already present in the output file are skipped, so rerunning the
    same config continues an interrupted matrix instead of redoing it.
    """
    done = set()
    writer = None
    fh = None
    if cfg.out:
        path = Path(cfg.out)
        if path.exists():
            done = {r.key for r in read_records(path)}
        fh = open(path, "a", newline="")
        writer = csv.writer(fh)
        if not done and path.stat().st_size == 0:
            writer.writerow(CSV_HEADER)
            fh.flush()

    def emit(record):
        if writer is not None:
            writer.writerow(record.csv_row())
            fh.flush()
        return record

    try:
        pending = []
        for build, cls, size_hint, seed in _game_cells(cfg):
            game = None
            for algo in cfg.algorithms:
                if size_hint and (cls, size_hint, seed, algo.name,
                                  algo.flags) in done:
                    continue
                if game is None:
                    game = build()                      # untimed
                size = size_hint or _size_label(game)
                if (cls, size, seed, algo.name, algo.flags) in done:
                    continue
                pending.append((game, cls, size, seed, algo))

            if cfg.workers == 1:
                while pending:
                    args = pending.pop(0)
                    yield emit(run_cell(*args, timeout=cfg.timeout))
        if pending:
            with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
                futures = [pool.submit(run_cell, *args, timeout=cfg.timeout)
                           for args in pending]
                for fut in futures:
                    yield emit(fut.result())
    finally:
        if fh is not None:
            fh.close()


@dataclass
class SummaryRow:
    cls: str
    size: str
    algorithm: str
    flags: str
    cells: int
    completion: float                # percent
    mean_time: float | None
    mean_eps: float | None


def summarize(records) -> list[SummaryRow]:
    groups: dict[tuple, list[BenchRecord]] = {}
    for r in records:
        groups.setdefault((r.cls, r.size, r.algorithm, r.flags), []).append(r)
    out = []
    for (cls, size, alg, flags), rs in sorted(groups.items()):
        finished = [r for r in rs if not r.timed_out and r.eps is not None]
        comp = 100.0 * len(finished) / len(rs)
        mt = sum(r.time_s for r in finished) / len(finished) if finished else None
        me = sum(r.eps for r in finished) / len(finished) if finished else None
        out.append(SummaryRow(cls, size, alg, flags, len(rs), comp, mt, me))
    return out


def summary_text(rows: list[SummaryRow]) -> str:
    header = f"{'class':<12}{'size':>8}{'algorithm':>11}{'flags':>14}" \
             f"{'cells':>7}{'done%':>8}{'time_s':>10}{'eps':>10}"
    lines = [header]
    for r in rows:
        mt = f"{r.mean_time:.3f}" if r.mean_time is not None else "-"
        me = f"{r.mean_eps:.4f}" if r.mean_eps is not None else "-"
        lines.append(f"{r.cls:<12}{r.size:>8}{r.algorithm:>11}{r.flags:>14}"
                     f"{r.cells:>7}{r.completion:>8.1f}{mt:>10}{me:>10}")
    return "\n".join(lines)


def summary_csv(rows: list[SummaryRow]) -> str:
    out = ["class,size,algorithm,flags,cells,completion,mean_time_s,mean_eps"]
    for r in rows:
        mt = "" if r.mean_time is None else f"{r.mean_time:.6f}"
        me = "" if r.mean_eps is None else f"{r.mean_eps:.9f}"
        out.append(f"{r.cls},{r.size},{r.algorithm},{r.flags},{r.cells},"
                   f"{r.completion:.1f},{mt},{me}")
    return "\n".join(out)


def frontier_data(records, cls: str, size: str) -> dict[str, list[tuple[float, float]]]:
    """(time, eps) scatter series per algorithm for one table cell."""
    series: dict[str, list[tuple[float, float]]] = {}
    for r in records:
        if r.cls != cls or r.size != size or r.timed_out or r.eps is None:
            continue
        label = f"{r.algorithm}:{r.flags}" if r.flags else r.algorithm
        series.setdefault(label, []).append((r.time_s, r.eps))
    if not series:
        raise ValueError(f"no completed records for {cls}/{size}")
    return series


@dataclass
class SweepRow:
    delta: float
    mean_time: float
    mean_eps: float
    mean_iterations: float
    mean_lp_rows: float


def ts_delta_sweep(games, deltas) -> list[SweepRow]:
    """ts across a delta grid; means over the game set per delta value."""
    if any(d <= 0 for d in deltas):
        raise ValueError("delta values must be positive")
    rows = []
    for d in deltas:
        times, epss, iters, lp_rows = [], [], [], []
        for g in games:
            t0 = time.perf_counter()
            r = approx.ts(g, d)
            times.append(time.perf_counter() - t0)
            epss.append(float(exact_epsilon(g, r.profile, r.kind)))
            iters.append(r.iterations)
            lp_rows.append(sum(r.trace.lp_rows) / len(r.trace.lp_rows))
        k = len(times)
        rows.append(SweepRow(d, sum(times) / k, sum(epss) / k,
                             sum(iters) / k, sum(lp_rows) / k))
    return rows


def load_config(path) -> BenchConfig:
    """TOML schema: scalar keys timeout/seeds/workers/out, plus [[games]]
    tables (either class/size/... generator fields or file = path) and
    [[algorithms]] tables (name plus optional delta/label)."""
    with open(path, "rb") as fh:
        raw = tomllib.load(fh)
    games = []
    for entry in raw.get("games", []):
        if "file" in entry:
            games.append(entry["file"])
        else:
            games.append(GenSpec(
                tag=entry["class"], size=int(entry["size"]),
                rho=float(entry.get("rho", 0.0)),
                hills=int(entry.get("hills", 3)),
                subset=int(entry.get("subset", 2)),
                seed=int(entry.get("seed", 0))))
    algos = [AlgoSpec(a["name"],
                      delta=a.get("delta"),
                      label=int(a.get("label", 1)))
             for a in raw.get("algorithms", [])]
    return BenchConfig(
        games=games, algorithms=algos,
        timeout=float(raw.get("timeout", 900.0)),
        seeds=int(raw.get("seeds", 1)),
        workers=int(raw.get("workers", 1)),
        out=raw.get("out"))
