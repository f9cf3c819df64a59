"""Game and mixed-strategy data model: normalization, best responses, regrets.

A bimatrix game is a pair of m x n payoff matrices (R for the row player, C
for the column player). All solvers in this package expect games normalized
so every payoff lies in [0, 1]; `normalize` rescales each matrix
independently by a positive affine map, which preserves best-response
structure.

Two approximation notions are supported:

* approximate Nash equilibrium: each player's expected payoff is within
  epsilon of a best response;
* well-supported approximate equilibrium: every pure strategy a player uses
  is within epsilon of a best response.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

# Tolerance for float probability vectors (nonnegativity and sum-to-one).
PROB_TOL = 1e-9


class EpsKind(Enum):
    APPROX_NE = "ne"
    WELL_SUPPORTED = "ws"


@dataclass(frozen=True)
class Game:
    """Immutable bimatrix game. R and C must have identical shape."""

    R: np.ndarray
    C: np.ndarray
    name: str | None = None

    def __post_init__(self):
        R = np.asarray(self.R, dtype=float)
        C = np.asarray(self.C, dtype=float)
        if R.ndim != 2 or R.shape != C.shape:
            raise ValueError(f"payoff matrices must share an m x n shape, "
                             f"got {R.shape} and {C.shape}")
        if R.shape[0] < 1 or R.shape[1] < 1:
            raise ValueError("game must have at least one strategy per side")
        R.setflags(write=False)
        C.setflags(write=False)
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "C", C)

    @property
    def shape(self) -> tuple[int, int]:
        return self.R.shape

    @property
    def m(self) -> int:
        return self.R.shape[0]

    @property
    def n(self) -> int:
        return self.R.shape[1]

    def is_normalized(self, tol: float = 1e-12) -> bool:
        return bool(
            self.R.min() >= -tol and self.R.max() <= 1 + tol
            and self.C.min() >= -tol and self.C.max() <= 1 + tol
        )


@dataclass(frozen=True)
class MixedProfile:
    """A pair of mixed strategies (x over rows, y over columns)."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        for v, side in ((x, "x"), (y, "y")):
            if v.ndim != 1:
                raise ValueError(f"{side} must be a vector")
            if v.min() < -PROB_TOL:
                raise ValueError(f"{side} has a negative entry: {v.min()}")
            if abs(v.sum() - 1.0) > PROB_TOL:
                raise ValueError(f"{side} sums to {v.sum()}, not 1")
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def support(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return (tuple(np.flatnonzero(self.x > 0)),
                tuple(np.flatnonzero(self.y > 0)))


def make_profile(x, y) -> MixedProfile:
    """Clip float dust and renormalize so the profile is exactly stochastic."""
    x = np.maximum(np.asarray(x, dtype=float), 0.0)
    y = np.maximum(np.asarray(y, dtype=float), 0.0)
    return MixedProfile(x / x.sum(), y / y.sum())


def pure_profile(m: int, n: int, i: int, j: int) -> MixedProfile:
    x = np.zeros(m)
    y = np.zeros(n)
    x[i] = 1.0
    y[j] = 1.0
    return MixedProfile(x, y)


def uniform_profile(m: int, n: int) -> MixedProfile:
    return MixedProfile(np.full(m, 1.0 / m), np.full(n, 1.0 / n))


def normalize(g: Game) -> Game:
    """Min-max scale each payoff matrix independently onto [0, 1].

    A constant matrix maps to all zeros. The map is positive affine per
    player, so argmax structure (best responses) is unchanged.
    """

    def scale(M: np.ndarray) -> np.ndarray:
        lo = M.min()
        hi = M.max()
        if hi == lo:
            return np.zeros_like(M)
        return (M - lo) / (hi - lo)

    return Game(scale(g.R), scale(g.C), name=g.name)


def _check_dims(g: Game, p: MixedProfile) -> None:
    if p.x.shape[0] != g.m or p.y.shape[0] != g.n:
        raise ValueError(
            f"profile shape ({p.x.shape[0]}, {p.y.shape[0]}) does not match "
            f"game shape {g.shape}")


def regrets(g: Game, p: MixedProfile) -> tuple[float, float]:
    """Best-response gaps (row regret, column regret) at the profile."""
    _check_dims(g, p)
    Ry = g.R @ p.y
    xC = p.x @ g.C
    g1 = float(Ry.max() - p.x @ Ry)
    g2 = float(xC.max() - xC @ p.y)
    return max(g1, 0.0), max(g2, 0.0)


def epsilon(g: Game, p: MixedProfile, kind: EpsKind = EpsKind.APPROX_NE) -> float:
    """Approximation quality of a profile under either epsilon notion.

    APPROX_NE is the larger of the two regrets. WELL_SUPPORTED is the
    largest best-response gap of any pure strategy actually in a player's
    support.
    """
    _check_dims(g, p)
    if kind is EpsKind.APPROX_NE:
        return max(regrets(g, p))
    Ry = g.R @ p.y
    xC = p.x @ g.C
    row_gap = float((Ry.max() - Ry[p.x > 0]).max())
    col_gap = float((xC.max() - xC[p.y > 0]).max())
    return max(row_gap, col_gap, 0.0)


def pure_best_response(g: Game, against: int, side: str) -> int:
    """Lowest-index pure best response.

    side is the responding player: "column" answers the row index `against`,
    "row" answers a column index.
    """
    if side == "column":
        if not 0 <= against < g.m:
            raise IndexError(f"row index {against} out of range")
        return int(np.argmax(g.C[against, :]))
    if side == "row":
        if not 0 <= against < g.n:
            raise IndexError(f"column index {against} out of range")
        return int(np.argmax(g.R[:, against]))
    raise ValueError(f"side must be 'row' or 'column', got {side!r}")


def dominated_rows(g: Game, side: str) -> set[int]:
    """Indices of pure strategies strictly dominated by another pure strategy."""
    if side == "row":
        M = g.R
    elif side == "column":
        M = g.C.T
    else:
        raise ValueError(f"side must be 'row' or 'column', got {side!r}")
    k = M.shape[0]
    out: set[int] = set()
    for i in range(k):
        if np.any(np.all(M > M[i], axis=1)):
            out.add(i)
    return out


# ---------------------------------------------------------------------------
# Text format: line 1 is "m n", then m rows of R, a blank line, m rows of C.

def write_game(g: Game, path: str | Path) -> None:
    lines = [f"{g.m} {g.n}"]
    for M in (g.R, g.C):
        for row in M:
            lines.append(" ".join(format(v, ".17g") for v in row))
        lines.append("")
    Path(path).write_text("\n".join(lines))


def read_game(path: str | Path, normalize_payoffs: bool = False,
              name: str | None = None) -> Game:
    """Parse a game file; entries may be decimals or raw integer payoffs.

    With normalize_payoffs=True the loaded matrices are min-max scaled,
    which is how integer-payoff files are meant to be consumed.
    """
    text = Path(path).read_text()
    tokens_by_line = [ln.split() for ln in text.splitlines() if ln.strip()]
    if not tokens_by_line:
        raise ValueError(f"{path}: empty game file")
    header = tokens_by_line[0]
    if len(header) != 2:
        raise ValueError(f"{path}: first line must be 'm n'")
    m, n = int(header[0]), int(header[1])
    rows = tokens_by_line[1:]
    if len(rows) != 2 * m:
        raise ValueError(f"{path}: expected {2 * m} payoff rows, got {len(rows)}")
    data = []
    for row in rows:
        if len(row) != n:
            raise ValueError(f"{path}: expected {n} entries per row, got {len(row)}")
        data.append([float(t) for t in row])
    g = Game(np.array(data[:m]), np.array(data[m:]),
             name=name or Path(path).stem)
    return normalize(g) if normalize_payoffs else g
