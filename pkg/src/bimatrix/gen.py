"""Game instance generators.

Seven classes: uniform random, covariant, Colonel Blotto, ranking,
SGC (unique large-support equilibrium), tournament, and unit vector.
All draws go through numpy's default_rng (PCG64), so every generator is a
deterministic function of its parameters and a 64-bit seed, reproducible
across platforms.

Correlated pairs are sampled as r = z1, c = rho*z1 + sqrt(1-rho^2)*z2 with
z1, z2 independent standard normals.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .core import Game, normalize

CLASS_TAGS = ("random", "covariant", "blotto", "ranking", "sgc",
              "tournament", "unit")


@dataclass
class GenSpec:
    """Benchmark-facing description of one game family member.

    size is strategies per player; for blotto it is the soldier count T
    (hills picks the dimension), for sgc and tournament it is k.
    """

    tag: str
    size: int
    rho: float = 0.0
    hills: int = 3
    subset: int = 2
    seed: int = 0

    def __post_init__(self):
        if self.tag not in CLASS_TAGS:
            raise ValueError(f"unknown game class {self.tag!r}")
        if self.tag == "blotto":
            if not self.rho > 0:
                raise ValueError("blotto requires rho > 0")
            if self.size < 1:
                raise ValueError("blotto requires at least one soldier")
            if self.hills < 2:
                raise ValueError("blotto requires at least two hills")
        elif self.tag == "covariant":
            if not -1.0 <= self.rho <= 1.0:
                raise ValueError("covariant rho must lie in [-1, 1]")
            if self.size < 2:
                raise ValueError("size must be at least 2")
        elif self.tag == "tournament":
            if self.size < 3:
                raise ValueError("tournament needs at least 3 nodes")
            if not 1 <= self.subset < self.size:
                raise ValueError("subset size must satisfy 1 <= s < k")
        elif self.size < 2:
            raise ValueError("size must be at least 2")


def make_game(spec: GenSpec, seed: int | None = None) -> Game:
    s = spec.seed if seed is None else seed
    if spec.tag == "random":
        return gen_random(spec.size, spec.size, s)
    if spec.tag == "covariant":
        return gen_covariant(spec.size, spec.rho, s)
    if spec.tag == "blotto":
        return gen_blotto(spec.hills, spec.size, spec.rho, s)
    if spec.tag == "ranking":
        return gen_ranking(spec.size, s)
    if spec.tag == "sgc":
        return gen_sgc(spec.size, s)
    if spec.tag == "tournament":
        return gen_tournament(spec.size, spec.subset, s)
    return gen_unit_vector(spec.size, s)


def has_pure_ne(g: Game) -> bool:
    """True iff some cell is simultaneously a column max of R and row max of C."""
    row_best = g.R >= g.R.max(axis=0, keepdims=True)
    col_best = g.C >= g.C.max(axis=1, keepdims=True)
    return bool(np.any(row_best & col_best))


def gen_random(m: int, n: int, seed: int) -> Game:
    if m < 1 or n < 1:
        raise ValueError("need at least one strategy per player")
    rng = np.random.default_rng(seed)
    R = rng.uniform(0.0, 1.0, size=(m, n))
    C = rng.uniform(0.0, 1.0, size=(m, n))
    return Game(R, C, name=f"random-{m}x{n}-s{seed}")


def _correlated_normals(rng, rho: float, shape) -> tuple[np.ndarray, np.ndarray]:
    z1 = rng.standard_normal(shape)
    z2 = rng.standard_normal(shape)
    return z1, rho * z1 + math.sqrt(max(0.0, 1.0 - rho * rho)) * z2


def gen_covariant(n: int, rho: float, seed: int,
                  normalize_payoffs: bool = True) -> Game:
    if not -1.0 <= rho <= 1.0:
        raise ValueError("rho must lie in [-1, 1]")
    rng = np.random.default_rng(seed)
    r, c = _correlated_normals(rng, rho, (n, n))
    g = Game(r, c, name=f"covariant-{n}-rho{rho}-s{seed}")
    return normalize(g) if normalize_payoffs else g


def compositions(total: int, parts: int):
    """All ways to split `total` into `parts` nonnegative ints, lex order."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


def blotto_action_count(n_hills: int, T: int) -> int:
    return math.comb(T + n_hills - 1, n_hills - 1)


def gen_blotto(n_hills: int, T: int, rho: float, seed: int) -> Game:
    if rho <= 0:
        raise ValueError("blotto requires rho > 0")
    rng = np.random.default_rng(seed)
    z1, z2 = _correlated_normals(rng, rho, n_hills)
    # Hill values: mean 1, sd 0.5, floored at 0.05 to stay positive.
    v1 = np.maximum(1.0 + 0.5 * z1, 0.05)
    v2 = np.maximum(1.0 + 0.5 * z2, 0.05)
    acts = np.array(list(compositions(T, n_hills)), dtype=np.int64)
    a = acts[:, None, :]
    b = acts[None, :, :]
    win1 = (a > b).astype(float) + 0.5 * (a == b)
    R = win1 @ v1
    C = (1.0 - win1) @ v2
    g = Game(R, C, name=f"blotto-{n_hills}-{rho}-T{T}-s{seed}")
    return normalize(g)


def gen_ranking(n_efforts: int, seed: int) -> Game:
    if n_efforts < 2:
        raise ValueError("need at least two effort levels")
    rng = np.random.default_rng(seed)
    # Strictly increasing score and cost step functions; cost stays below the
    # unit prize at every effort, so no effort level is hopeless by price alone.
    score = np.cumsum(rng.uniform(np.nextafter(0.0, 1.0), 1.0, size=n_efforts))
    cost = np.cumsum(rng.uniform(np.nextafter(0.0, 1.0), 1.0, size=n_efforts))
    cost *= rng.uniform(0.5, 0.95) / cost[-1]
    win = (score[:, None] > score[None, :]).astype(float)
    win += 0.5 * (score[:, None] == score[None, :])
    R = win - cost[:, None]
    C = win.T - cost[None, :]
    g = Game(R, C, name=f"ranking-{n_efforts}-s{seed}")
    return normalize(g)


def gen_sgc(k: int, seed: int = 0, jitter: float = 0.0) -> Game:
    """Hard instance for support enumeration: size (2k-1)x(2k-1), no pure
    equilibrium, and a unique equilibrium mixing uniformly over the first k
    actions of each player.

    The first k actions form a cyclic block: the row player wants to match
    the column (diagonal bonus), the column player wants to be one step
    ahead (shifted diagonal bonus). Matching forces supports S and T with
    S ⊆ T ⊆ S+1 (indices mod k), which is only possible when both equal all
    of {0..k-1}; indifference then pins both mixtures to uniform. The
    remaining k-1 actions are strictly dominated padding (payoff 0.25
    against everything, against 0.5 or better for any first-k action), so
    they can never enter a support.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    nn = 2 * k - 1
    R = np.full((nn, nn), 0.25)
    C = np.full((nn, nn), 0.25)
    R[:k, :] = 0.5
    C[:, :k] = 0.5
    main = np.arange(k)
    R[main, main] = 1.0
    C[main, (main + 1) % k] = 1.0
    if jitter > 0.0:
        rng = np.random.default_rng(seed)
        R = np.clip(R + rng.uniform(-jitter, jitter, R.shape), 0.0, 1.0)
        C = np.clip(C + rng.uniform(-jitter, jitter, C.shape), 0.0, 1.0)
    return Game(R, C, name=f"sgc-{k}" + (f"-s{seed}" if jitter > 0 else ""))


def _tournament_all_subsets_dominated(beats: np.ndarray, s: int) -> bool:
    """True iff every s-subset of nodes has some node beating all of it."""
    if s == 2:
        common = beats.T.astype(np.int64) @ beats.astype(np.int64)
        iu = np.triu_indices(beats.shape[0], k=1)
        return bool(np.all(common[iu] > 0))
    for sub in itertools.combinations(range(beats.shape[0]), s):
        if not np.any(np.all(beats[:, sub], axis=1)):
            return False
    return True


def gen_tournament(k: int, s: int, seed: int) -> Game:
    """Win-lose game from a random tournament: rows are nodes, columns are
    s-subsets of nodes, the row player wins a cell iff the node beats every
    node of the subset. Tournaments admitting a pure equilibrium (some
    subset with no common dominator) are redrawn.
    """
    if k < 3:
        raise ValueError("need at least 3 nodes")
    if not 1 <= s < k:
        raise ValueError("subset size must satisfy 1 <= s < k")
    rng = np.random.default_rng(seed)
    for _ in range(100):
        upper = rng.integers(0, 2, size=(k, k), dtype=np.int64)
        beats = np.triu(upper, 1) + np.tril(1 - upper.T, -1)
        beats = beats.astype(bool)
        if _tournament_all_subsets_dominated(beats, s):
            break
    else:
        raise RuntimeError("no pure-equilibrium-free tournament in 100 draws")
    subsets = list(itertools.combinations(range(k), s))
    R = np.empty((k, len(subsets)))
    for j, sub in enumerate(subsets):
        R[:, j] = np.all(beats[:, sub], axis=1)
    return Game(R, 1.0 - R, name=f"tournament-{k}-{s}-s{seed}")


def gen_unit_vector(n: int, seed: int) -> Game:
    """Column payoffs iid uniform; each row-payoff column holds a single 1,
    placed uniformly among rows whose best column (under C) is elsewhere,
    which rules out pure equilibria outright.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    rng = np.random.default_rng(seed)
    for _ in range(100):
        C = rng.uniform(0.0, 1.0, size=(n, n))
        row_arg = C.argmax(axis=1)
        ok = True
        R = np.zeros((n, n))
        for j in range(n):
            allowed = np.flatnonzero(row_arg != j)
            if allowed.size == 0:
                ok = False
                break
            R[rng.choice(allowed), j] = 1.0
        if ok:
            return Game(R, C, name=f"unit-{n}-s{seed}")
    raise RuntimeError("no admissible row layout in 100 draws")
