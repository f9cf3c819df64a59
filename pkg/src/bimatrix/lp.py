"""Self-contained dense linear programming and zero-sum game solving.

The solver is a two-phase tableau simplex. Pricing is by most-negative
reduced cost; after a run of degenerate pivots it switches to Bland's rule,
which guarantees termination on degenerate instances. Everything is dense
numpy: the games this package benchmarks are dense payoff matrices, and the
LPs built from them inherit that structure.

Zero-sum games are solved through the classic reciprocal transformation:
shift the matrix positive, then `max 1.w  s.t.  M w <= 1, w >= 0` yields the
minimizing column mix, and the same transformation on the negated transpose
yields the maximizing row mix. The two optimal values must agree (strong
duality); `solve_zero_sum` checks this to its stated tolerance.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

FEAS_TOL = 1e-9
OPT_TOL = 1e-7

Status = Literal["optimal", "infeasible", "unbounded", "iteration_limit"]


class LPError(Exception):
    """Raised when an LP that must solve cleanly does not."""


@dataclass
class LPResult:
    status: Status
    x: np.ndarray | None = None
    value: float | None = None


@dataclass
class LinearProgram:
    """max c.x subject to row senses and per-variable bounds.

    bounds entries are (lo, hi) pairs; use -inf/+inf for unbounded sides.
    Default bounds are (0, +inf). senses entries are '<=', '=' or '>='.
    """

    c: np.ndarray
    A: np.ndarray
    senses: Sequence[str]
    b: np.ndarray
    bounds: Sequence[tuple[float, float]] | None = None
    maximize: bool = True

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float)
        self.A = np.asarray(self.A, dtype=float)
        self.b = np.asarray(self.b, dtype=float)
        if self.A.ndim != 2 or self.A.shape != (len(self.b), len(self.c)):
            raise ValueError("inconsistent LP dimensions")
        if len(self.senses) != len(self.b):
            raise ValueError("one sense per constraint row required")
        if any(s not in ("<=", "=", ">=") for s in self.senses):
            raise ValueError("senses must be one of <=, =, >=")
        if self.bounds is None:
            self.bounds = [(0.0, np.inf)] * len(self.c)
        if len(self.bounds) != len(self.c):
            raise ValueError("one bound pair per variable required")


# ---------------------------------------------------------------------------
# Tableau core. Minimization form: rows are equalities with b >= 0, all
# variables nonnegative. The last tableau row holds reduced costs and (in its
# last entry) minus the current objective value.

def _pivot(T: np.ndarray, basis: np.ndarray, row: int, col: int) -> None:
    T[row] /= T[row, col]
    colvec = T[:, col].copy()
    colvec[row] = 0.0
    mask = colvec != 0.0
    if mask.any():
        T[mask] -= np.outer(colvec[mask], T[row])
    T[:, col] = 0.0
    T[row, col] = 1.0
    basis[row] = col


def _run(T: np.ndarray, basis: np.ndarray, allowed: int,
         max_iter: int) -> Status:
    """Drive the tableau to optimality over columns [0, allowed)."""
    m = T.shape[0] - 1
    bland = False
    stall = 0
    stall_limit = 50 + 2 * m
    for _ in range(max_iter):
        obj = T[-1, :allowed]
        if bland:
            negs = np.flatnonzero(obj < -OPT_TOL)
            if negs.size == 0:
                return "optimal"
            col = int(negs[0])
        else:
            col = int(np.argmin(obj))
            if obj[col] >= -OPT_TOL:
                return "optimal"
        colvec = T[:m, col]
        pos = colvec > FEAS_TOL
        if not pos.any():
            return "unbounded"
        ratios = np.full(m, np.inf)
        ratios[pos] = T[:m, -1][pos] / colvec[pos]
        best = ratios.min()
        ties = np.flatnonzero(ratios <= best + 1e-12)
        row = int(ties[np.argmin(basis[ties])]) if ties.size > 1 else int(ties[0])
        before = T[-1, -1]
        _pivot(T, basis, row, col)
        if abs(T[-1, -1] - before) <= 1e-14:
            stall += 1
            if stall >= stall_limit:
                bland = True
        else:
            stall = 0
            bland = False
    return "iteration_limit"


def _solve_standard(c: np.ndarray, A: np.ndarray, b: np.ndarray,
                    max_iter: int | None = None) -> LPResult:
    """min c.x s.t. A x = b, x >= 0."""
    m, n = A.shape
    if max_iter is None:
        max_iter = 200 * (m + n + 10)
    sign = np.where(b < 0, -1.0, 1.0)
    A = A * sign[:, None]
    b = b * sign

    # Identity columns can start in the basis; artificials cover the rest.
    basis = np.full(m, -1, dtype=int)
    is_unit = (np.abs(A) > FEAS_TOL).sum(axis=0) == 1
    for j in np.flatnonzero(is_unit):
        i = int(np.argmax(np.abs(A[:, j])))
        if basis[i] == -1 and abs(A[i, j] - 1.0) <= 1e-12:
            basis[i] = j
    need_art = np.flatnonzero(basis == -1)
    n_art = len(need_art)
    total = n + n_art
    T = np.zeros((m + 1, total + 1))
    T[:m, :n] = A
    T[:m, -1] = b
    for k, i in enumerate(need_art):
        T[i, n + k] = 1.0
        basis[i] = n + k

    if n_art:
        # Phase 1: minimize the artificial sum.
        T[-1, n:total] = 1.0
        for i in range(m):
            if basis[i] >= n:
                T[-1] -= T[i]
        st = _run(T, basis, total, max_iter)
        if st != "optimal":
            return LPResult("iteration_limit" if st == "iteration_limit"
                            else "infeasible")
        if -T[-1, -1] > 1e-7:
            return LPResult("infeasible")
        for i in range(m):
            if basis[i] >= n:
                pivots = np.flatnonzero(np.abs(T[i, :n]) > 1e-9)
                if pivots.size:
                    _pivot(T, basis, i, int(pivots[0]))
        keep = [i for i in range(m) if basis[i] < n]
        if len(keep) < m:
            T = np.vstack([T[keep], T[-1:]])
            basis = basis[keep]
            m = len(keep)
        T = np.hstack([T[:, :n], T[:, -1:]])

    T[-1, :] = 0.0
    T[-1, :n] = c
    for i in range(m):
        if c[basis[i]] != 0.0:
            T[-1] -= c[basis[i]] * T[i]
    st = _run(T, basis, n, max_iter)
    if st != "optimal":
        return LPResult(st)
    x = np.zeros(n)
    x[basis] = T[:m, -1]
    return LPResult("optimal", x, float(-T[-1, -1]))


def solve_lp(lp: LinearProgram, max_iter: int | None = None) -> LPResult:
    """Solve a general-form LP; infeasible/unbounded are outcomes, not errors."""
    n = len(lp.c)
    shift = np.zeros(n)
    col_sign = np.ones(n)
    cols: list[int | tuple[int, int]] = []
    extra_rows: list[tuple[np.ndarray, str, float]] = []
    std_cols: list[np.ndarray] = []
    A = lp.A
    for k, (lo, hi) in enumerate(lp.bounds):
        if lo > hi:
            return LPResult("infeasible")
        if np.isfinite(lo):
            shift[k] = lo
            cols.append(len(std_cols))
            std_cols.append(A[:, k].copy())
            if np.isfinite(hi):
                sel = np.zeros(n)
                sel[k] = 1.0
                extra_rows.append((sel, "<=", hi - lo))
        elif np.isfinite(hi):
            shift[k] = hi
            col_sign[k] = -1.0
            cols.append(len(std_cols))
            std_cols.append(-A[:, k])
        else:
            cols.append((len(std_cols), len(std_cols) + 1))
            std_cols.append(A[:, k].copy())
            std_cols.append(-A[:, k])

    def expand_row(row: np.ndarray) -> np.ndarray:
        out = np.zeros(len(std_cols))
        for k in range(n):
            ck = cols[k]
            if isinstance(ck, tuple):
                out[ck[0]] = row[k]
                out[ck[1]] = -row[k]
            else:
                out[ck] = row[k] * col_sign[k]
        return out

    # Bound rows for doubly-finite variables are stated directly in the
    # shifted variable u_k = x_k - lo, so their rhs needs no shift correction.
    senses = list(lp.senses) + [s for _, s, _ in extra_rows]
    base_rows = [A[i] for i in range(A.shape[0])] + [r for r, _, _ in extra_rows]
    base_rhs = list(lp.b - A @ shift) + [v for _, _, v in extra_rows]

    nn = len(std_cols)
    slack_count = sum(1 for s in senses if s != "=")
    total = nn + slack_count
    Astd = np.zeros((len(base_rows), total))
    bstd = np.zeros(len(base_rows))
    si = 0
    for i, (row, sense, bv) in enumerate(zip(base_rows, senses, base_rhs)):
        Astd[i, :nn] = expand_row(np.asarray(row, dtype=float))
        bstd[i] = bv
        if sense == "<=":
            Astd[i, nn + si] = 1.0
            si += 1
        elif sense == ">=":
            Astd[i, nn + si] = -1.0
            si += 1

    cstd = np.zeros(total)
    for k in range(n):
        ck = cols[k]
        coef = lp.c[k]
        if isinstance(ck, tuple):
            cstd[ck[0]] = coef
            cstd[ck[1]] = -coef
        else:
            cstd[ck] = coef * col_sign[k]
    if lp.maximize:
        cstd = -cstd

    res = _solve_standard(cstd, Astd, bstd, max_iter)
    if res.status != "optimal":
        return res
    u = res.x
    x = np.empty(n)
    for k in range(n):
        ck = cols[k]
        if isinstance(ck, tuple):
            x[k] = u[ck[0]] - u[ck[1]]
        else:
            x[k] = shift[k] + col_sign[k] * u[ck]
    value = float(lp.c @ x)
    return LPResult("optimal", x, value)


# ---------------------------------------------------------------------------
# Zero-sum games.

@dataclass
class ZeroSumSolution:
    x: np.ndarray
    y: np.ndarray
    value: float


def _best_counter_mix(M: np.ndarray) -> tuple[np.ndarray, float]:
    """Column mix y minimizing max_i (M y)_i, plus that minimax value."""
    M = np.asarray(M, dtype=float)
    m, n = M.shape
    shift = 1.0 - M.min()
    Mp = M + shift
    c = np.full(n, -1.0)                    # min -sum(w)  ==  max sum(w)
    A = np.hstack([Mp, np.eye(m)])
    res = _solve_standard(np.concatenate([c, np.zeros(m)]), A, np.ones(m))
    if res.status != "optimal":
        raise LPError(f"zero-sum LP ended with status {res.status}")
    w = np.maximum(res.x[:n], 0.0)
    total = w.sum()
    if total <= 0:
        raise LPError("zero-sum LP returned a null mix")
    return w / total, 1.0 / total - shift


def solve_zero_sum(M) -> ZeroSumSolution:
    """Maximin/minimax pair for the zero-sum game with row payoff matrix M."""
    M = np.asarray(M, dtype=float)
    y, minimax = _best_counter_mix(M)
    x, neg_maximin = _best_counter_mix(-M.T)
    maximin = -neg_maximin
    if abs(maximin - minimax) > OPT_TOL * max(1.0, abs(maximin)):
        raise LPError(f"duality gap {maximin - minimax:.3e} exceeds tolerance")
    return ZeroSumSolution(x=x, y=y, value=maximin)
