"""Bimatrix game toolkit: solvers, approximation algorithms, generators,
exact verification, benchmarking, and adversarial instance search."""
from .approx import (ApproxResult, ApproxTimeout, GuaranteeViolation, TsState,
                     best_pure, bbm1, bbm2, dmp, ks, ks_plus, pure_eps_matrix,
                     ts)
from .bench import (AlgoSpec, BenchConfig, BenchRecord, SummaryRow, SweepRow,
                    frontier_data, load_config, read_records, run_bench,
                    run_cell, summarize, summary_csv, summary_text,
                    ts_delta_sweep)
from .core import (EpsKind, Game, MixedProfile, dominated_rows, epsilon,
                   make_profile, normalize, pure_best_response, pure_profile,
                   read_game, regrets, uniform_profile, write_game)
from .evolve import (EvolveResult, FitnessSpec, GAParams, Genome,
                     domination_count, evolve, fitness, random_genome,
                     write_history)
from .exact import (LHResult, SEResult, lemke_howson, support_enumeration,
                    support_pairs)
from .gen import GenSpec, CLASS_TAGS, has_pure_ne, make_game
from .lp import LinearProgram, LPError, LPResult, solve_lp, solve_zero_sum
from .verify import (ExactView, RationalProfile, SupportPair,
                     check_support_equilibrium, exact_epsilon,
                     to_rational_profile)

__all__ = [
    "AlgoSpec", "ApproxResult", "ApproxTimeout", "BenchConfig", "BenchRecord",
    "CLASS_TAGS", "EpsKind", "EvolveResult", "ExactView", "FitnessSpec",
    "GAParams", "Game", "GenSpec", "Genome", "GuaranteeViolation", "LHResult",
    "LPError", "LPResult", "LinearProgram", "MixedProfile", "RationalProfile",
    "SEResult", "SummaryRow", "SupportPair", "SweepRow", "TsState",
    "best_pure", "bbm1", "bbm2", "check_support_equilibrium", "dmp",
    "dominated_rows", "domination_count", "epsilon", "evolve", "exact_epsilon",
    "fitness", "frontier_data", "has_pure_ne", "ks", "ks_plus", "lemke_howson",
    "load_config", "make_game", "make_profile", "normalize",
    "pure_best_response", "pure_eps_matrix", "pure_profile", "random_genome",
    "read_game", "read_records", "regrets", "run_bench", "run_cell",
    "solve_lp", "solve_zero_sum", "summarize", "summary_csv", "summary_text",
    "support_enumeration", "support_pairs", "to_rational_profile", "ts",
    "ts_delta_sweep", "uniform_profile", "write_game", "write_history",
]
