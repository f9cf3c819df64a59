"""Polynomial-time approximation algorithms for bimatrix games.

Seven algorithms: best pure profile, DMP (two best-response queries),
BBM1/BBM2 (zero-sum relaxation plus deviation repair), TS (descent on the
maximum regret, parameterized by delta), KS and KS+ (well-supported
notions). Every algorithm returns an ApproxResult whose epsilon is
recomputed from the returned profile, and every run is checked against the
algorithm's guarantee ceiling; a breach raises GuaranteeViolation rather
than returning a silently wrong answer.

Time limits are cooperative: the two algorithms that can run long (TS and
KS+) take a `budget` in seconds and raise ApproxTimeout when they exceed it.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .core import EpsKind, Game, MixedProfile, epsilon, make_profile, pure_profile
from .lp import LinearProgram, solve_lp, solve_zero_sum

BBM1_CEILING = 0.3820          # (3 - sqrt(5)) / 2 = 0.381966...
BBM2_THRESHOLD = 0.3639
BBM2_CEILING = 0.3640
TS_BASE = 0.3393
KS_CEILING = 2.0 / 3.0
KSPLUS_CEILING = 0.6608        # 2/3 - 0.00591
_TOL = 1e-9


class GuaranteeViolation(AssertionError):
    """An algorithm produced a worse profile than its proven ceiling.

    Carries the offending value so adversarial search can still score the
    game that triggered it instead of crashing mid-run.
    """

    def __init__(self, message: str, eps: float = float("nan")):
        super().__init__(message)
        self.eps = eps


class ApproxTimeout(Exception):
    """Cooperative time budget exceeded (TS iteration cap counts too)."""


@dataclass
class TsState:
    delta: float
    f: float
    iterations: int = 0
    lp_rows: list = field(default_factory=list)
    f_log: list = field(default_factory=list)


@dataclass
class ApproxResult:
    name: str
    profile: MixedProfile
    eps: float
    kind: EpsKind
    iterations: int = 0
    trace: TsState | None = None


def _finish(name: str, g: Game, x: np.ndarray, y: np.ndarray,
            kind: EpsKind, ceiling: float, iterations: int = 0,
            trace: TsState | None = None) -> ApproxResult:
    prof = make_profile(x, y)
    eps = epsilon(g, prof, kind)
    if eps > ceiling + _TOL:
        raise GuaranteeViolation(
            f"{name} returned eps={eps:.6f} above its ceiling {ceiling}",
            eps=eps)
    return ApproxResult(name, prof, eps, kind, iterations, trace)


def pure_eps_matrix(g: Game) -> np.ndarray:
    """eps of every pure profile; identical under both approximation notions."""
    col_gap = g.R.max(axis=0, keepdims=True) - g.R
    row_gap = g.C.max(axis=1, keepdims=True) - g.C
    return np.maximum(col_gap, row_gap)


def best_pure(g: Game) -> ApproxResult:
    eps = pure_eps_matrix(g)
    flat = int(eps.argmin())          # lexicographic in (i, j) on ties
    i, j = divmod(flat, g.n)
    p = pure_profile(g.m, g.n, i, j)
    return _finish("pure", g, p.x, p.y, EpsKind.APPROX_NE, ceiling=1.0)


def dmp(g: Game, initial_row: int = 0) -> ApproxResult:
    """Two best-response queries from a starting row; 0.5 guarantee."""
    if not 0 <= initial_row < g.m:
        raise ValueError("initial row out of range")
    i = initial_row
    j = int(np.argmax(g.C[i]))
    k = int(np.argmax(g.R[:, j]))
    x = np.zeros(g.m)
    if i == k:
        x[i] = 1.0
    else:
        x[i] = x[k] = 0.5
    y = np.zeros(g.n)
    y[j] = 1.0
    return _finish("dmp", g, x, y, EpsKind.APPROX_NE, ceiling=0.5)


def _regret_pair(g: Game, x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    Ry = g.R @ y
    xC = x @ g.C
    return (float(Ry.max() - x @ Ry), float(xC.max() - xC @ y))


def _bbm_core(g: Game):
    """Zero-sum seed shared by BBM1/BBM2, oriented so the row player is the
    larger-regret side (swap=True means players were exchanged)."""
    sol = solve_zero_sum(g.R - g.C)
    x, y = sol.x, sol.y
    g1, g2 = _regret_pair(g, x, y)
    if g1 >= g2:
        return g, x, y, g1, False
    swapped = Game(g.C.T, g.R.T)
    return swapped, y, x, g2, True


def _bbm1_profile(go: Game, x: np.ndarray, y: np.ndarray, g1: float):
    """High-regime repair: jump to the pure best response, opponent leans
    toward their counter-response."""
    r = int(np.argmax(go.R @ y))
    b = int(np.argmax(go.C[r]))
    d2 = (1.0 - g1) / (2.0 - g1)
    xx = np.zeros(go.m)
    xx[r] = 1.0
    yy = (1.0 - d2) * y
    yy[b] += d2
    return xx, yy


def bbm1(g: Game) -> ApproxResult:
    go, x, y, g1, swap = _bbm_core(g)
    alpha = (3.0 - math.sqrt(5.0)) / 2.0
    if g1 > alpha:
        x, y = _bbm1_profile(go, x, y, g1)
    if swap:
        x, y = y, x
    return _finish("bbm1", g, x, y, EpsKind.APPROX_NE, ceiling=BBM1_CEILING)


def _eps_oriented(go: Game, x: np.ndarray, y: np.ndarray) -> float:
    a, b = _regret_pair(go, x, y)
    return max(a, b)


def _best_shift_toward(go: Game, x: np.ndarray, y: np.ndarray,
                       t_grid: np.ndarray) -> tuple[float, np.ndarray, np.ndarray]:
    """Candidates x_t = (1-t) x + t e_r with the column player answering
    x_t's best response; the answer weight is optimized exactly (the
    epsilon is convex piecewise-linear in it)."""
    r = int(np.argmax(go.R @ y))
    er = np.zeros(go.m)
    er[r] = 1.0
    best = (math.inf, x, y)
    for t in t_grid:
        xt = (1.0 - t) * x + t * er
        bj = int(np.argmax(xt @ go.C))
        eb = np.zeros(go.n)
        eb[bj] = 1.0

        def eps_of(d: float) -> float:
            return _eps_oriented(go, xt, (1.0 - d) * y + d * eb)

        lo, hi = 0.0, 1.0
        for _ in range(60):
            m1 = lo + (hi - lo) / 3.0
            m2 = hi - (hi - lo) / 3.0
            if eps_of(m1) <= eps_of(m2):
                hi = m2
            else:
                lo = m1
        d = 0.5 * (lo + hi)
        val = eps_of(d)
        if val < best[0]:
            best = (val, xt, (1.0 - d) * y + d * eb)
    return best


def bbm2(g: Game) -> ApproxResult:
    """BBM1 with extra repair steps in the regime where the zero-sum seed
    leaves a regret above the BBM2 threshold. The repair searches mixtures
    between the seed strategy and the pure deviation on both sides and keeps
    the best profile found; BBM1's own output is always among the
    candidates, so this never does worse than bbm1.
    """
    go, x, y, g1, swap = _bbm_core(g)
    if g1 <= BBM2_THRESHOLD:
        if swap:
            x, y = y, x
        return _finish("bbm2", g, x, y, EpsKind.APPROX_NE,
                       ceiling=BBM2_CEILING)

    t_grid = np.linspace(0.0, 1.0, 41)
    cands: list[tuple[float, np.ndarray, np.ndarray]] = []
    cands.append((_eps_oriented(go, x, y), x, y))
    bx, by = _bbm1_profile(go, x, y, g1)
    cands.append((_eps_oriented(go, bx, by), bx, by))
    cands.append(_best_shift_toward(go, x, y, t_grid))
    # Mirror family: the smaller-regret side deviates instead.
    flipped = Game(go.C.T, go.R.T)
    v, fy, fx = _best_shift_toward(flipped, y, x, t_grid)
    cands.append((v, fx, fy))

    val, cx, cy = min(cands, key=lambda c: c[0])
    if swap:
        cx, cy = cy, cx
    return _finish("bbm2", g, cx, cy, EpsKind.APPROX_NE, ceiling=BBM2_CEILING)


# ---------------------------------------------------------------------------
# TS: descent on f(x, y) = max of the two regrets.

def _f_components(g: Game, x, y):
    Ry = g.R @ y
    xC = x @ g.C
    p1 = float(x @ Ry)
    p2 = float(xC @ y)
    fr = float(Ry.max()) - p1
    fc = float(xC.max()) - p2
    return Ry, xC, p1, p2, fr, fc


def _ts_direction(g, x, y, Ry, xC, p1, p2, fr, fc, delta):
    """Steepest-descent LP over the delta-relaxed argmax sets.

    Returns (theta, x', y', rows). theta approximates the best achievable
    instantaneous rate of decrease of f; the LP is always feasible with
    value <= 0 because staying put scores zero.
    """
    m, n = g.shape
    f = max(fr, fc)
    a = Ry
    c = x @ g.R
    b = g.C @ y
    d = xC
    rows = []
    rhs = []
    if fr >= f - delta:
        er = np.flatnonzero(Ry >= Ry.max() - delta)
        for i in er:
            row = np.concatenate([-a, g.R[i] - c, [-1.0]])
            rows.append(row)
            rhs.append(Ry[i] - 2.0 * p1)
    if fc >= f - delta:
        ec = np.flatnonzero(xC >= xC.max() - delta)
        for j in ec:
            row = np.concatenate([g.C[:, j] - b, -d, [-1.0]])
            rows.append(row)
            rhs.append(xC[j] - 2.0 * p2)
    k = len(rows)
    eq1 = np.concatenate([np.ones(m), np.zeros(n), [0.0]])
    eq2 = np.concatenate([np.zeros(m), np.ones(n), [0.0]])
    A = np.vstack(rows + [eq1, eq2])
    bvec = np.array(rhs + [1.0, 1.0])
    senses = ["<="] * k + ["=", "="]
    cvec = np.zeros(m + n + 1)
    cvec[-1] = 1.0
    bounds = [(0.0, np.inf)] * (m + n) + [(-np.inf, np.inf)]
    res = solve_lp(LinearProgram(cvec, A, senses, bvec, bounds,
                                 maximize=False))
    if res.status != "optimal":
        return 0.0, x, y, k
    xp = np.maximum(res.x[:m], 0.0)
    yp = np.maximum(res.x[m:m + n], 0.0)
    xp /= xp.sum()
    yp /= yp.sum()
    return float(res.value), xp, yp, k


def _segment_f(g: Game, x, y, xp, yp):
    """f along (1-t)(x,y) + t(x',y') as a cheap callable, from 8 matvecs."""
    Ry, Ryp = g.R @ y, g.R @ yp
    Cx, Cxp = x @ g.C, xp @ g.C
    xRy = float(x @ Ry)
    xRyp = float(x @ Ryp)
    xpRy = float(xp @ Ry)
    xpRyp = float(xp @ Ryp)
    xCy = float(Cx @ y)
    xCyp = float(Cx @ yp)
    xpCy = float(Cxp @ y)
    xpCyp = float(Cxp @ yp)

    def f_at(t: float) -> float:
        u = 1.0 - t
        ry = u * Ry + t * Ryp
        cx = u * Cx + t * Cxp
        q1 = u * u * xRy + u * t * (xRyp + xpRy) + t * t * xpRyp
        q2 = u * u * xCy + u * t * (xCyp + xpCy) + t * t * xpCyp
        return max(float(ry.max()) - q1, float(cx.max()) - q2)

    return f_at


def _line_search(f_at, samples: int = 33, tol: float = 1e-6) -> tuple[float, float]:
    ts = np.linspace(0.0, 1.0, samples)
    vals = [f_at(t) for t in ts]
    k = int(np.argmin(vals))
    lo = ts[max(0, k - 1)]
    hi = ts[min(samples - 1, k + 1)]
    phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, bnd = lo, hi
    c1 = bnd - phi * (bnd - a)
    c2 = a + phi * (bnd - a)
    f1, f2 = f_at(c1), f_at(c2)
    while bnd - a > tol:
        if f1 <= f2:
            bnd, c2, f2 = c2, c1, f1
            c1 = bnd - phi * (bnd - a)
            f1 = f_at(c1)
        else:
            a, c1, f1 = c1, c2, f2
            c2 = a + phi * (bnd - a)
            f2 = f_at(c2)
    t = c1 if f1 <= f2 else c2
    return float(t), float(min(f1, f2, vals[k]))


def ts(g: Game, delta: float, max_iters: int = 10 ** 4,
       budget: float | None = None,
       init: str = "uniform", init_seed: int = 0) -> ApproxResult:
    """Descent on the maximum regret with delta-relaxed support sets.

    Stops at stationarity (no direction improves the instantaneous rate
    beyond tolerance) or when an iteration fails to decrease f by delta/100.
    Returns the best profile visited, also considering the final direction
    target and its one-sided crossovers.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    start = time.perf_counter()
    m, n = g.shape
    if init == "uniform":
        x = np.full(m, 1.0 / m)
        y = np.full(n, 1.0 / n)
    elif init == "bbm":
        seed = bbm1(g).profile
        x, y = seed.x.copy(), seed.y.copy()
    elif init == "random":
        rng = np.random.default_rng(init_seed)
        x = rng.dirichlet(np.ones(m))
        y = rng.dirichlet(np.ones(n))
    else:
        raise ValueError(f"unknown init {init!r}")

    Ry, xC, p1, p2, fr, fc = _f_components(g, x, y)
    f = max(fr, fc)
    state = TsState(delta=delta, f=f)
    best = (f, x.copy(), y.copy())
    finals = []
    while state.iterations < max_iters:
        if budget is not None and time.perf_counter() - start > budget:
            raise ApproxTimeout(f"ts exceeded {budget:.3f}s budget")
        theta, xp, yp, k = _ts_direction(g, x, y, Ry, xC, p1, p2, fr, fc,
                                         delta)
        state.iterations += 1
        state.lp_rows.append(k)
        if theta >= -delta:
            finals = [(xp, yp)]
            break
        f_at = _segment_f(g, x, y, xp, yp)
        t, ft = _line_search(f_at)
        if ft >= f - delta / 100.0:
            finals = [(xp, yp)]
            break
        stepped = make_profile((1 - t) * x + t * xp, (1 - t) * y + t * yp)
        x, y = stepped.x.copy(), stepped.y.copy()
        Ry, xC, p1, p2, fr, fc = _f_components(g, x, y)
        f = max(fr, fc)
        state.f_log.append(f)
        if f < best[0]:
            best = (f, x.copy(), y.copy())
    else:
        raise ApproxTimeout(f"ts hit the {max_iters} iteration cap")

    # Stationary-point fallback: examine the direction target and the two
    # crossover profiles before settling for the best visited point.
    fbest, xb, yb = best
    for xf, yf in finals:
        for cx, cy in ((xf, yf), (xf, y), (x, yf)):
            fv = max(*_regret_pair(g, cx, cy))
            if fv < fbest:
                fbest, xb, yb = fv, cx.copy(), cy.copy()
    state.f = fbest
    return _finish(f"ts{delta:g}", g, xb, yb, EpsKind.APPROX_NE,
                   ceiling=TS_BASE + delta, iterations=state.iterations,
                   trace=state)


# ---------------------------------------------------------------------------
# Well-supported algorithms.

def _pure_ws_best(g: Game) -> tuple[float, int, int]:
    eps = pure_eps_matrix(g)
    flat = int(eps.argmin())
    i, j = divmod(flat, g.n)
    return float(eps[i, j]), i, j


def ks(g: Game) -> ApproxResult:
    """Pure scan first; only when no pure 2/3-WSNE exists, fall back to the
    zero-sum relaxation, whose profile is then guaranteed well within 2/3.
    """
    val, i, j = _pure_ws_best(g)
    pp = pure_profile(g.m, g.n, i, j)
    if val <= KS_CEILING + _TOL:
        return _finish("ks", g, pp.x, pp.y,
                       EpsKind.WELL_SUPPORTED, ceiling=KS_CEILING)
    sol = solve_zero_sum(g.R - g.C)
    cands = [(val, pp.x, pp.y),
             (epsilon(g, make_profile(sol.x, sol.y), EpsKind.WELL_SUPPORTED),
              sol.x, sol.y)]
    v, x, y = min(cands, key=lambda c: c[0])
    return _finish("ks", g, x, y, EpsKind.WELL_SUPPORTED, ceiling=KS_CEILING)


def _ws_eps(g: Game, x, y) -> float:
    return epsilon(g, make_profile(x, y), EpsKind.WELL_SUPPORTED)


def _best_2x2_side(M: np.ndarray, grid: np.ndarray,
                   deadline: float | None):
    """For every column pair (j1 < j2) of M, the smallest achievable gap
    max_k (My)_k - min over a row pair of (My)_k, optimized over the mixing
    weight grid; returns the gap table flattened over pairs. M rows are the
    side whose support the gap protects.
    """
    m, n = M.shape
    iu = np.triu_indices(m, k=1)
    ju = np.triu_indices(n, k=1)
    n_ipairs = iu[0].size
    n_jpairs = ju[0].size
    gap = np.empty((n_ipairs, n_jpairs), dtype=np.float32)
    for jp in range(n_jpairs):
        if deadline is not None and jp % 64 == 0:
            if time.perf_counter() > deadline:
                raise ApproxTimeout("ks+ exceeded its budget")
        j1, j2 = ju[0][jp], ju[1][jp]
        V = np.outer(1.0 - grid, M[:, j1]) + np.outer(grid, M[:, j2])
        top = V.max(axis=1)                       # (G,)
        pair_min = np.minimum(V[:, iu[0]], V[:, iu[1]])   # (G, n_ipairs)
        gap[:, jp] = (top[:, None] - pair_min).min(axis=0)
    return gap, iu, ju


def _refine_2x2(M: np.ndarray, rows: tuple[int, int],
                cols: tuple[int, int]) -> tuple[float, float]:
    """Exact 1-D minimization of the support gap for one 2x2 choice; the gap
    is convex piecewise-linear in the mixing weight."""
    j1, j2 = cols
    i1, i2 = rows

    def gap(q: float) -> float:
        v = (1.0 - q) * M[:, j1] + q * M[:, j2]
        return float(v.max() - min(v[i1], v[i2]))

    lo, hi = 0.0, 1.0
    for _ in range(80):
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        if gap(m1) <= gap(m2):
            hi = m2
        else:
            lo = m1
    q = 0.5 * (lo + hi)
    return gap(q), q


def _best_2x2_wsne(g: Game, deadline: float | None):
    """Minimum-gap profile over all 2x2 supports. The two sides decouple:
    the row-support gap depends only on the column mixture and vice versa,
    so each side is tabulated independently and combined by max."""
    grid = np.linspace(0.0, 1.0, 13)
    row_gap, iu, ju = _best_2x2_side(g.R, grid, deadline)
    col_gap, jv, iv = _best_2x2_side(g.C.T, grid, deadline)
    total = np.maximum(row_gap, col_gap.T)
    ip, jp = np.unravel_index(int(total.argmin()), total.shape)
    rows = (int(iu[0][ip]), int(iu[1][ip]))
    cols = (int(ju[0][jp]), int(ju[1][jp]))
    _, q = _refine_2x2(g.R, rows, cols)
    _, p = _refine_2x2(g.C.T, cols, rows)
    x = np.zeros(g.m)
    y = np.zeros(g.n)
    x[rows[0]], x[rows[1]] = 1.0 - p, p
    y[cols[0]], y[cols[1]] = 1.0 - q, q
    return x, y


def _ws_on_supports(g: Game, S: np.ndarray, T: np.ndarray):
    """Best well-supported profile constrained to given supports, one small
    LP per side (the sides decouple)."""

    def solve_side(payoff: np.ndarray, mix_sup: np.ndarray,
                   keep_sup: np.ndarray):
        # payoff rows are scored against a mixture living on `mix_sup`
        # columns; rows in `keep_sup` must stay within u of the row maximum.
        # Variables: weights (|mix_sup|), top M, gap u. Minimize u.
        rows_all, _ = payoff.shape
        k = mix_sup.size
        A = []
        senses = []
        b = []
        for r in range(rows_all):
            A.append(np.concatenate([payoff[r, mix_sup], [-1.0, 0.0]]))
            senses.append("<=")
            b.append(0.0)
        for r in keep_sup:
            A.append(np.concatenate([-payoff[r, mix_sup], [1.0, -1.0]]))
            senses.append("<=")
            b.append(0.0)
        A.append(np.concatenate([np.ones(k), [0.0, 0.0]]))
        senses.append("=")
        b.append(1.0)
        c = np.zeros(k + 2)
        c[-1] = 1.0
        bounds = [(0.0, np.inf)] * k + [(-np.inf, np.inf), (0.0, np.inf)]
        res = solve_lp(LinearProgram(c, np.array(A), senses, np.array(b),
                                     bounds, maximize=False))
        if res.status != "optimal":
            return None
        return np.maximum(res.x[:k], 0.0)

    wy = solve_side(g.R, T, S)
    wx = solve_side(g.C.T, S, T)
    if wy is None or wx is None:
        return None
    x = np.zeros(g.m)
    y = np.zeros(g.n)
    x[S] = wx / wx.sum()
    y[T] = wy / wy.sum()
    return x, y


def ks_plus(g: Game, budget: float | None = None) -> ApproxResult:
    """ks plus two refinement candidates: best 2x2-support profile and best
    profile on the zero-sum equilibrium supports. Quadratic-squared work in
    the game size; the only well-supported algorithm that can time out.
    """
    deadline = None if budget is None else time.perf_counter() + budget
    base = ks(g)
    sol = solve_zero_sum(g.R - g.C)
    cands: list[tuple[float, np.ndarray, np.ndarray]] = [
        (base.eps, base.profile.x, base.profile.y)]
    x22, y22 = _best_2x2_wsne(g, deadline)
    cands.append((_ws_eps(g, x22, y22), x22, y22))
    S = np.flatnonzero(sol.x > 1e-9)
    T = np.flatnonzero(sol.y > 1e-9)
    on_sup = _ws_on_supports(g, S, T)
    if on_sup is not None:
        cands.append((_ws_eps(g, *on_sup), *on_sup))
    v, x, y = min(cands, key=lambda c: c[0])
    return _finish("ksplus", g, x, y, EpsKind.WELL_SUPPORTED,
                   ceiling=KSPLUS_CEILING)
