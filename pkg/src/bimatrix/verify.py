"""Exact rational certification of profiles and support equilibria.

Solvers in this package run in floating point; certification runs here, in
exact arithmetic, after the fact. Float payoffs convert to `Fraction`
losslessly (every float is a dyadic rational), so "exact epsilon of the
returned profile" means exactly that: no rounding anywhere.

The support checker solves the indifference system over the opponent's
support by exact Gaussian elimination. Square nondegenerate systems are
decided completely; singular systems with a solution manifold are searched
for a feasible point by exact Fourier-Motzkin elimination over the manifold
parameters, which covers the degenerate cases that arise in practice but is
documented as complete only for nondegenerate games.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .core import EpsKind, Game, MixedProfile

# Safety cap on intermediate Fourier-Motzkin constraint counts; unreachable
# for the support-system sizes this package enumerates.
_FM_LIMIT = 20000


@dataclass(frozen=True)
class RationalProfile:
    """Mixed-strategy pair with arbitrary-precision rational entries."""

    x: tuple[Fraction, ...]
    y: tuple[Fraction, ...]

    def __post_init__(self):
        for v, side in ((self.x, "x"), (self.y, "y")):
            if any(e < 0 for e in v):
                raise ValueError(f"{side} has a negative entry")
            if sum(v) != 1:
                raise ValueError(f"{side} does not sum to exactly 1")

    @property
    def support(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return (tuple(i for i, e in enumerate(self.x) if e > 0),
                tuple(j for j, e in enumerate(self.y) if e > 0))

    def to_float(self) -> MixedProfile:
        return MixedProfile(np.array([float(e) for e in self.x]),
                            np.array([float(e) for e in self.y]))


@dataclass(frozen=True)
class SupportPair:
    S: tuple[int, ...]
    T: tuple[int, ...]

    def __post_init__(self):
        if not self.S or not self.T:
            raise ValueError("supports must be nonempty")
        object.__setattr__(self, "S", tuple(sorted(set(self.S))))
        object.__setattr__(self, "T", tuple(sorted(set(self.T))))


def as_fraction_matrix(M) -> list[list[Fraction]]:
    return [[Fraction(v) for v in row] for row in np.asarray(M).tolist()]


def to_rational_profile(p: MixedProfile | RationalProfile) -> RationalProfile:
    """Exact conversion; float vectors are renormalized by their exact sum."""
    if isinstance(p, RationalProfile):
        return p
    x = [Fraction(v) for v in p.x.tolist()]
    y = [Fraction(v) for v in p.y.tolist()]
    sx, sy = sum(x), sum(y)
    if sx <= 0 or sy <= 0 or any(e < 0 for e in x + y):
        raise ValueError("profile is not stochastic")
    return RationalProfile(tuple(e / sx for e in x), tuple(e / sy for e in y))


# ---------------------------------------------------------------------------
# Exact epsilon. The arithmetic runs over scaled integers (floats are dyadic,
# user rationals get a common denominator), which is much faster than nested
# Fraction operations on large games; the result is still exact.

def _int_matrix(M) -> tuple[list[list[int]], int]:
    """Represent a float matrix as integers over a power-of-two denominator."""
    fr = as_fraction_matrix(M)
    shift = 0
    for row in fr:
        for f in row:
            shift = max(shift, f.denominator.bit_length() - 1)
    ints = [[f.numerator << (shift - (f.denominator.bit_length() - 1))
             for f in row] for row in fr]
    return ints, shift


def _int_vector(v: Sequence[Fraction]) -> tuple[list[int], int]:
    den = math.lcm(*(f.denominator for f in v)) if v else 1
    return [f.numerator * (den // f.denominator) for f in v], den


class ExactView:
    """Reusable exact-arithmetic view of one game.

    Converting floats to rationals dominates the cost of a one-off exact
    query, so batch workloads (support enumeration, benchmark audits) build
    this once and query it many times. Both internal representations are
    lazy: epsilon queries need the scaled-integer form, support checks need
    the Fraction form.
    """

    def __init__(self, g: Game):
        self.m, self.n = g.shape
        self._R = g.R
        self._C = g.C
        self._ints = None
        self._fracs = None

    def _int_form(self):
        if self._ints is None:
            self._ints = (*_int_matrix(self._R), *_int_matrix(self._C))
        return self._ints

    def _frac_form(self):
        if self._fracs is None:
            Rfr = as_fraction_matrix(self._R)
            Cfr = as_fraction_matrix(self._C)
            Ct = [[Cfr[i][j] for i in range(self.m)] for j in range(self.n)]
            self._fracs = (Rfr, Ct)
        return self._fracs

    def epsilon(self, p: MixedProfile | RationalProfile,
                kind: EpsKind = EpsKind.APPROX_NE) -> Fraction:
        rp = to_rational_profile(p)
        if len(rp.x) != self.m or len(rp.y) != self.n:
            raise ValueError(f"profile shape ({len(rp.x)}, {len(rp.y)}) does "
                             f"not match game shape ({self.m}, {self.n})")
        Rint, rs, Cint, cs = self._int_form()
        xi, xden = _int_vector(rp.x)
        yi, yden = _int_vector(rp.y)

        Ry = [sum(row[j] * yi[j] for j in range(self.n)) for row in Rint]
        xC = [sum(Cint[i][j] * xi[i] for i in range(self.m))
              for j in range(self.n)]
        ry_den = yden << rs
        xc_den = xden << cs

        if kind is EpsKind.APPROX_NE:
            xRy = sum(xi[i] * Ry[i] for i in range(self.m))
            xCy = sum(xC[j] * yi[j] for j in range(self.n))
            g1 = Fraction(max(Ry), ry_den) - Fraction(xRy, xden * ry_den)
            g2 = Fraction(max(xC), xc_den) - Fraction(xCy, yden * xc_den)
            return max(g1, g2, Fraction(0))
        row_gap = max(Ry) - min(Ry[i] for i in range(self.m) if rp.x[i] > 0)
        col_gap = max(xC) - min(xC[j] for j in range(self.n) if rp.y[j] > 0)
        return max(Fraction(row_gap, ry_den), Fraction(col_gap, xc_den),
                   Fraction(0))

    def check_support(self, sp: "SupportPair") -> RationalProfile | None:
        Rfr, Ct = self._frac_form()
        y = _one_side(Rfr, sp.S, sp.T, self.n)
        if y is None:
            return None
        x = _one_side(Ct, sp.T, sp.S, self.m)
        if x is None:
            return None
        return RationalProfile(tuple(x), tuple(y))


def exact_epsilon(g: Game | ExactView, p: MixedProfile | RationalProfile,
                  kind: EpsKind = EpsKind.APPROX_NE) -> Fraction:
    """Exact rational epsilon of a profile, per either approximation notion."""
    view = g if isinstance(g, ExactView) else ExactView(g)
    return view.epsilon(p, kind)


# ---------------------------------------------------------------------------
# Exact linear algebra for the support checker.

def _solve_affine(A: list[list[Fraction]], b: list[Fraction]):
    """Solve A u = b exactly.

    Returns (particular, kernel_basis) or None when inconsistent. Gaussian
    elimination with partial pivoting (largest |pivot| in each column).
    """
    rows, cols = len(A), len(A[0]) if A else 0
    M = [list(r) + [b[i]] for i, r in enumerate(A)]
    pivot_cols: list[int] = []
    r = 0
    for c in range(cols):
        pr = max(range(r, rows), key=lambda i: abs(M[i][c]), default=None)
        if pr is None or M[pr][c] == 0:
            continue
        M[r], M[pr] = M[pr], M[r]
        pv = M[r][c]
        M[r] = [e / pv for e in M[r]]
        for i in range(rows):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * p for a, p in zip(M[i], M[r])]
        pivot_cols.append(c)
        r += 1
        if r == rows:
            break
    for i in range(r, rows):
        if M[i][cols] != 0:
            return None
    free_cols = [c for c in range(cols) if c not in pivot_cols]
    particular = [Fraction(0)] * cols
    for i, c in enumerate(pivot_cols):
        particular[c] = M[i][cols]
    kernel = []
    for fc in free_cols:
        v = [Fraction(0)] * cols
        v[fc] = Fraction(1)
        for i, c in enumerate(pivot_cols):
            v[c] = -M[i][fc]
        kernel.append(v)
    return particular, kernel


def _fm_feasible(cons: list[tuple[list[Fraction], Fraction]]):
    """Find t with a.t <= c for every (a, c), by Fourier-Motzkin; None if none."""
    d = len(cons[0][0]) if cons else 0
    if d == 0:
        return [] if all(c >= 0 for _, c in cons) else None
    lowers, uppers, rest = [], [], []
    for a, c in cons:
        if a[0] > 0:
            uppers.append(([e / a[0] for e in a[1:]], c / a[0]))
        elif a[0] < 0:
            lowers.append(([e / a[0] for e in a[1:]], c / a[0]))
        else:
            rest.append((a[1:], c))
    projected = rest + [([lu - ll for lu, ll in zip(au, al)], cu - cl)
                        for au, cu in uppers for al, cl in lowers]
    if len(projected) > _FM_LIMIT:
        raise RuntimeError("support system too degenerate for exact feasibility "
                           "search")
    if projected:
        tail = _fm_feasible(projected)
        if tail is None:
            return None
    else:
        tail = [Fraction(0)] * (d - 1)
    lo = max((c - sum(a * t for a, t in zip(av, tail)) for av, c in lowers),
             default=None)
    hi = min((c - sum(a * t for a, t in zip(av, tail)) for av, c in uppers),
             default=None)
    if lo is not None and hi is not None:
        if lo > hi:
            return None
        t0 = (lo + hi) / 2
    elif lo is not None:
        t0 = lo
    elif hi is not None:
        t0 = hi
    else:
        t0 = Fraction(0)
    return [t0] + tail


def _feasible_point(particular: list[Fraction], kernel: list[list[Fraction]],
                    cons: list[tuple[list[Fraction], Fraction]]):
    """Point on the affine manifold satisfying a.u <= c constraints, or None."""
    if not kernel:
        ok = all(sum(a * u for a, u in zip(av, particular)) <= c
                 for av, c in cons)
        return particular if ok else None
    reduced = []
    for av, c in cons:
        coeffs = [sum(a * k for a, k in zip(av, kv)) for kv in kernel]
        rhs = c - sum(a * u for a, u in zip(av, particular))
        if all(e == 0 for e in coeffs):
            if rhs < 0:
                return None
            continue
        reduced.append((coeffs, rhs))
    t = _fm_feasible(reduced) if reduced else [Fraction(0)] * len(kernel)
    if t is None:
        return None
    return [p + sum(kv[idx] * tv for kv, tv in zip(kernel, t))
            for idx, p in enumerate(particular)]


def _one_side(opp_payoff: list[list[Fraction]], S: Sequence[int],
              T: Sequence[int], n: int):
    """Opponent mix over T making rows S indifferent and best responses.

    opp_payoff is the matrix whose row player must be indifferent (R for the
    y side). Returns the full length-n vector over columns, or None.
    Unknowns are (y_j for j in T, v); equations are indifference over S plus
    the sum-to-one row; inequalities are nonnegativity on T and the
    best-response condition (payoff of every row <= v).
    """
    k = len(T)
    A: list[list[Fraction]] = []
    b: list[Fraction] = []
    for i in S:
        A.append([opp_payoff[i][j] for j in T] + [Fraction(-1)])
        b.append(Fraction(0))
    A.append([Fraction(1)] * k + [Fraction(0)])
    b.append(Fraction(1))
    sol = _solve_affine(A, b)
    if sol is None:
        return None
    particular, kernel = sol
    cons: list[tuple[list[Fraction], Fraction]] = []
    for idx in range(k):
        a = [Fraction(0)] * (k + 1)
        a[idx] = Fraction(-1)
        cons.append((a, Fraction(0)))
    in_support = set(S)
    for i in range(len(opp_payoff)):
        if i in in_support:
            continue
        a = [opp_payoff[i][j] for j in T] + [Fraction(-1)]
        cons.append((a, Fraction(0)))
    point = _feasible_point(particular, kernel, cons)
    if point is None:
        return None
    full = [Fraction(0)] * n
    for idx, j in enumerate(T):
        full[j] = point[idx]
    return full


def check_support_equilibrium(g: Game | ExactView, sp: SupportPair
                              ) -> RationalProfile | None:
    """Exact Nash equilibrium with supports contained in (S, T), if one exists.

    Returns a certified profile (its exact epsilon is zero) or None. The two
    sides decouple: y solves row-player indifference over S, x solves
    column-player indifference over T.
    """
    view = g if isinstance(g, ExactView) else ExactView(g)
    return view.check_support(sp)


# ---------------------------------------------------------------------------
# Profile file parsing for the CLI: one line of m tokens for x, one line of
# n tokens for y; tokens are `p/q` fractions or decimal literals.

def parse_rational_profile(text: str, m: int, n: int) -> RationalProfile:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if len(lines) != 2:
        raise ValueError("profile file must hold exactly two nonempty lines")
    vecs = []
    for ln, want in zip(lines, (m, n)):
        toks = ln.split()
        if len(toks) != want:
            raise ValueError(f"expected {want} entries, got {len(toks)}")
        vecs.append(tuple(Fraction(t) for t in toks))
    return RationalProfile(vecs[0], vecs[1])


def format_rational_profile(p: RationalProfile) -> str:
    return (" ".join(str(e) for e in p.x) + "\n"
            + " ".join(str(e) for e in p.y) + "\n")
