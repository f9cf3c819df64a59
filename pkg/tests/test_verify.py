from __future__ import annotations

from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest

from bimatrix.core import EpsKind, Game, MixedProfile, normalize
from bimatrix.verify import (RationalProfile, SupportPair,
                             check_support_equilibrium, exact_epsilon,
                             format_rational_profile, parse_rational_profile,
                             to_rational_profile)

from oracles import grid_support_accepts, naive_exact_epsilon

MP = Game([[1, 0], [0, 1]], [[0, 1], [1, 0]])
F = Fraction


def rational_profile(x, y):
    return RationalProfile(tuple(F(*t) for t in x), tuple(F(*t) for t in y))


def rand_rational_game(rng, m, n, den=1000):
    R = rng.integers(0, den + 1, size=(m, n)) / den
    C = rng.integers(0, den + 1, size=(m, n)) / den
    return Game(R, C)


class TestExactEpsilon:
    def test_matching_pennies_uniform_zero(self):
        p = rational_profile([(1, 2), (1, 2)], [(1, 2), (1, 2)])
        assert exact_epsilon(MP, p, EpsKind.APPROX_NE) == 0
        assert exact_epsilon(MP, p, EpsKind.WELL_SUPPORTED) == 0

    def test_lopsided_mix_value(self):
        # Row mixes 2/3 - 1/3 against a uniform column: the row side is
        # indifferent, the column side has regret 2/3 - 1/2 = 1/6.
        p = rational_profile([(2, 3), (1, 3)], [(1, 2), (1, 2)])
        got = exact_epsilon(MP, p, EpsKind.APPROX_NE)
        assert got == F(1, 6)
        assert got == naive_exact_epsilon(MP.R, MP.C, p.x, p.y, "ne")

    def test_agrees_with_naive_fraction_oracle(self):
        rng = np.random.default_rng(5)
        for _ in range(25):
            m, n = rng.integers(1, 5, size=2)
            g = rand_rational_game(rng, m, n)
            x = [F(int(v), 97) for v in rng.multinomial(97, np.full(m, 1 / m))]
            y = [F(int(v), 83) for v in rng.multinomial(83, np.full(n, 1 / n))]
            p = RationalProfile(tuple(x), tuple(y))
            for kind, tag in ((EpsKind.APPROX_NE, "ne"),
                              (EpsKind.WELL_SUPPORTED, "ws")):
                assert (exact_epsilon(g, p, kind)
                        == naive_exact_epsilon(g.R, g.C, p.x, p.y, tag))

    def test_ws_at_least_ne(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            g = rand_rational_game(rng, 4, 4)
            x = [F(int(v), 64) for v in rng.multinomial(64, np.full(4, 0.25))]
            y = [F(int(v), 64) for v in rng.multinomial(64, np.full(4, 0.25))]
            p = RationalProfile(tuple(x), tuple(y))
            assert (exact_epsilon(g, p, EpsKind.WELL_SUPPORTED)
                    >= exact_epsilon(g, p, EpsKind.APPROX_NE))

    def test_float_profile_conversion_matches_core(self):
        rng = np.random.default_rng(23)
        for _ in range(20):
            g = rand_rational_game(rng, 5, 4, den=10 ** 6)
            x = rng.random(5)
            y = rng.random(4)
            p = MixedProfile(x / x.sum(), y / y.sum())
            from bimatrix.core import epsilon
            for kind in EpsKind:
                exact = exact_epsilon(g, p, kind)
                assert abs(float(exact) - epsilon(g, p, kind)) <= 1e-9

    def test_rejects_non_stochastic(self):
        with pytest.raises(ValueError):
            RationalProfile((F(1, 2),), (F(1),))
        with pytest.raises(ValueError):
            exact_epsilon(MP, rational_profile([(1, 1)], [(1, 1)]))


class TestSupportChecker:
    def test_matching_pennies_full_support(self):
        p = check_support_equilibrium(MP, SupportPair((0, 1), (0, 1)))
        assert p is not None
        assert p.x == (F(1, 2), F(1, 2)) and p.y == (F(1, 2), F(1, 2))

    def test_matching_pennies_pure_absent(self):
        assert check_support_equilibrium(MP, SupportPair((0,), (0,))) is None

    def test_coordination_pure_cell(self):
        g = Game([[1, 0], [0, 1]], [[1, 0], [0, 1]])
        p = check_support_equilibrium(g, SupportPair((0,), (0,)))
        assert p is not None
        assert p.x == (F(1), F(0)) and p.y == (F(1), F(0))

    def test_accepted_profiles_are_exact_equilibria(self):
        rng = np.random.default_rng(3)
        hits = 0
        for trial in range(40):
            g = rand_rational_game(rng, 3, 3, den=50)
            S = tuple(sorted(rng.choice(3, rng.integers(1, 4), replace=False)))
            T = tuple(sorted(rng.choice(3, rng.integers(1, 4), replace=False)))
            p = check_support_equilibrium(g, SupportPair(S, T))
            if p is not None:
                hits += 1
                assert exact_epsilon(g, p, EpsKind.APPROX_NE) == 0
        assert hits > 0

    def test_degenerate_unequal_supports(self):
        # Column 0 keeps every row indifferent, so a pure column supports a
        # fully mixed row side; the checker must handle |S| != |T|.
        g = Game([[1, 0], [1, 1]], [[1, 0], [1, 0]])
        p = check_support_equilibrium(g, SupportPair((0, 1), (0,)))
        assert p is not None
        assert exact_epsilon(g, p, EpsKind.APPROX_NE) == 0

    @pytest.mark.slow
    def test_exhaustive_equivalence_with_grid_oracle_4x4(self):
        rng = np.random.default_rng(17)
        idx = list(range(4))
        all_supports = [tuple(c) for r in range(1, 5)
                        for c in combinations(idx, r)]
        for _ in range(2):
            g = rand_rational_game(rng, 4, 4, den=100)
            for S in all_supports:
                for T in all_supports:
                    ours = check_support_equilibrium(g, SupportPair(S, T))
                    oracle = grid_support_accepts(g.R, g.C, S, T)
                    assert (ours is not None) == oracle, (S, T)


class TestProfileIO:
    def test_parse_and_format_roundtrip(self):
        text = "1/3 2/3\n0.25 1/4 1/2\n"
        p = parse_rational_profile(text, 2, 3)
        assert p.x == (F(1, 3), F(2, 3))
        assert p.y == (F(1, 4), F(1, 4), F(1, 2))
        again = parse_rational_profile(format_rational_profile(p), 2, 3)
        assert again == p

    def test_to_rational_renormalizes_float_dust(self):
        x = np.array([0.1, 0.9])
        p = to_rational_profile(MixedProfile(x / x.sum(), np.array([1.0])))
        assert sum(p.x) == 1 and sum(p.y) == 1
