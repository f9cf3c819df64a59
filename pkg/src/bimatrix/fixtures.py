"""Bundled adversarial 5x5 instances produced by the genetic search.

Each file holds raw integer payoffs in the standard game text format. The
names record what the instance was evolved against: the TS descent solver
with delta = 0.001, or the min over an algorithm portfolio; the `_nodom`
variants were evolved under the dominated-strategy penalty and contain no
strictly dominated pure strategies.
"""
from __future__ import annotations

from importlib import resources

from .core import Game, normalize, read_game

FIXTURE_NAMES = (
    "evolved_vs_ts001",
    "evolved_vs_portfolio",
    "evolved_vs_ts001_nodom",
    "evolved_vs_portfolio_nodom",
)


def load_fixture(name: str, normalized: bool = True) -> Game:
    if name not in FIXTURE_NAMES:
        raise KeyError(f"unknown fixture {name!r}; choices: {FIXTURE_NAMES}")
    path = resources.files("bimatrix.data").joinpath(f"{name}.txt")
    with resources.as_file(path) as p:
        g = read_game(p, name=name)
    return normalize(g) if normalized else g
