"""Exact equilibrium computation: support enumeration and Lemke-Howson.

Support enumeration walks support pairs by total cardinality (equal sizes
first within a total) and hands each pair to the rational certifier, so any
profile it returns is an exact equilibrium, not a numerical one.

Lemke-Howson pivots in floating point on the two best-response polytopes,
with the lexicographic minimum-ratio rule for degeneracy; the announced
support is then refit exactly in rational arithmetic and certified. Only a
certified profile is reported as an equilibrium.
"""
from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass

import numpy as np

from .core import Game
from .verify import ExactView, RationalProfile, SupportPair


@dataclass
class SEResult:
    profile: RationalProfile | None
    support: SupportPair | None
    pairs_checked: int
    pairs_skipped: int
    timed_out: bool
    elapsed: float


@dataclass
class LHResult:
    profile: RationalProfile | None
    raw_x: np.ndarray | None
    raw_y: np.ndarray | None
    support: SupportPair | None
    pivots: int
    status: str            # ok | timeout | pivot_limit | refit_failed
    elapsed: float
    bases: list | None = None


def support_pairs(m: int, n: int):
    """Yield (rows, cols) index tuples ordered by total support size,
    with equal-cardinality splits ahead of unequal ones at the same total.
    """
    for total in range(2, m + n + 1):
        lo = max(1, total - n)
        hi = min(m, total - 1)
        splits = sorted(range(lo, hi + 1),
                        key=lambda a: (abs(2 * a - total), a))
        for a in splits:
            b = total - a
            for S in itertools.combinations(range(m), a):
                for T in itertools.combinations(range(n), b):
                    yield S, T


def support_enumeration(g: Game, budget: float | None = None) -> SEResult:
    """First exact equilibrium in support-size order, or absent on timeout."""
    start = time.perf_counter()
    view = ExactView(g)
    checked = 0
    skipped = 0
    check_every = 1024 if g.m * g.n <= 2500 else 64
    for S, T in support_pairs(g.m, g.n):
        if budget is not None and checked % check_every == 0:
            if time.perf_counter() - start > budget:
                return SEResult(None, None, checked, skipped, True,
                                time.perf_counter() - start)
        checked += 1
        sp = SupportPair(S, T)
        try:
            prof = view.check_support(sp)
        except RuntimeError:
            # Feasibility search blew its case budget on a degenerate pair;
            # skip it and keep enumerating.
            skipped += 1
            continue
        if prof is not None:
            return SEResult(prof, sp, checked, skipped, False,
                            time.perf_counter() - start)
    return SEResult(None, None, checked, skipped, False,
                    time.perf_counter() - start)


# ---------------------------------------------------------------------------
# Lemke-Howson. One tableau per polytope; in each, every variable carries a
# distinct label from 0..m+n-1 (row labels then column labels), which makes
# the complementary step "enter, in the other tableau, whatever label just
# left". Slack columns double as the lexicographic perturbation: they hold
# the running basis inverse.

_PIV_TOL = 1e-9


class _Tableau:
    def __init__(self, body: np.ndarray, var_labels: np.ndarray,
                 basis: np.ndarray, perturb_cols: np.ndarray):
        k = body.shape[0]
        self.M = np.hstack([body, np.ones((k, 1))])
        self.labels = var_labels
        self.basis = basis.copy()
        self.perturb = perturb_cols

    def enter(self, label: int) -> int:
        """Pivot the variable with this label in; return the label pivoted out."""
        col = int(np.flatnonzero(self.labels == label)[0])
        colvec = self.M[:, col]
        rows = np.flatnonzero(colvec > _PIV_TOL)
        if rows.size == 0:
            raise ArithmeticError("unbounded ray in LH pivoting")
        keys = self.M[np.ix_(rows, np.concatenate(([self.M.shape[1] - 1],
                                                   self.perturb)))]
        keys = keys / colvec[rows, None]
        order = np.lexsort(keys.T[::-1])
        r = int(rows[order[0]])
        out = int(self.basis[r])
        self.M[r] /= self.M[r, col]
        other = np.arange(self.M.shape[0]) != r
        self.M[other] -= np.outer(self.M[other, col], self.M[r])
        self.basis[r] = label
        return out

    def solution(self, labels_wanted: np.ndarray) -> np.ndarray:
        out = np.zeros(labels_wanted.size)
        pos = {int(l): i for i, l in enumerate(labels_wanted)}
        rhs = self.M[:, -1]
        for r, lab in enumerate(self.basis):
            if int(lab) in pos:
                out[pos[int(lab)]] = rhs[r]
        return out


def default_pivot_bound(m: int, n: int) -> int:
    return min(2 * math.comb(m + n, min(m, n)) + 64, 10 ** 7)


def lemke_howson(g: Game, initial_label: int = 1,
                 budget: float | None = None,
                 max_pivots: int | None = None,
                 track_bases: bool = False) -> LHResult:
    """Complementary pivoting from the artificial equilibrium, dropping the
    given 1-based label (row labels 1..m, then column labels m+1..m+n).
    """
    m, n = g.shape
    if not 1 <= initial_label <= m + n:
        raise ValueError("label must lie in 1..m+n")
    if max_pivots is None:
        max_pivots = default_pivot_bound(m, n)
    start = time.perf_counter()

    Rp = g.R + 1.0
    Cp = g.C + 1.0
    # Polytope P: C'^T x <= 1, x >= 0. Variables x_i (labels 0..m-1) then
    # slacks (labels m..m+n-1); slacks start basic.
    A = _Tableau(np.hstack([Cp.T, np.eye(n)]),
                 np.arange(m + n), np.arange(m, m + n),
                 perturb_cols=np.arange(m, m + n))
    # Polytope Q: R' y <= 1, y >= 0. Variables r_i (labels 0..m-1, basic)
    # then y_j (labels m..m+n-1).
    B = _Tableau(np.hstack([np.eye(m), Rp]),
                 np.arange(m + n), np.arange(m),
                 perturb_cols=np.arange(m))

    dropped = initial_label - 1
    side = A if dropped < m else B
    label = dropped
    pivots = 0
    bases = [] if track_bases else None
    status = "ok"
    while True:
        if pivots >= max_pivots:
            status = "pivot_limit"
            break
        if budget is not None and time.perf_counter() - start > budget:
            status = "timeout"
            break
        out = side.enter(label)
        pivots += 1
        if track_bases:
            bases.append((tuple(sorted(map(int, A.basis))),
                          tuple(sorted(map(int, B.basis)))))
        if out == dropped:
            break
        label = out
        side = B if side is A else A

    elapsed = time.perf_counter() - start
    if status != "ok":
        return LHResult(None, None, None, None, pivots, status, elapsed, bases)

    xr = A.solution(np.arange(m))
    yr = B.solution(np.arange(m, m + n))
    xs, ys = xr.sum(), yr.sum()
    if xs <= 0 or ys <= 0:
        return LHResult(None, None, None, None, pivots, "refit_failed",
                        elapsed, bases)
    x = xr / xs
    y = yr / ys
    tol = 1e-9
    candidates = [(tuple(np.flatnonzero(x > tol)),
                   tuple(np.flatnonzero(y > tol)))]
    basis_S = tuple(sorted(int(l) for l in A.basis if l < m))
    basis_T = tuple(sorted(int(l) - m for l in B.basis if l >= m))
    if (basis_S, basis_T) != candidates[0] and basis_S and basis_T:
        candidates.append((basis_S, basis_T))
    profile = None
    support = None
    view = ExactView(g)
    for S, T in candidates:
        if not S or not T:
            continue
        sp = SupportPair(S, T)
        try:
            profile = view.check_support(sp)
        except RuntimeError:
            profile = None
        if profile is not None:
            support = sp
            break
    status = "ok" if profile is not None else "refit_failed"
    return LHResult(profile, x, y, support, pivots, status,
                    time.perf_counter() - start, bases)
