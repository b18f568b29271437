"""Exact solvers and structure analysis for diversity subset selection.

Given n candidate points with pairwise distances, pick m of them under one
of several dispersion objectives: largest distance sum, largest minimum
pairwise distance, largest minimum per-node contribution, smallest spread
between per-node contributions, or largest mean distance over a free-size
subset.  The package bundles reproducible instance generators, exact
reference solvers, MILP text export for external solvers, and reporting
helpers for comparing the models' optimal solutions.
"""

from .analysis import (BenchJob, BenchRow, CrossModelRow, DistanceHistogram,
                       GeometryStats, HistogramMode, MultiplicitySummary,
                       PairedObjectives, benchmark_csv, benchmark_summary,
                       compute_pairing, cross_model_csv, cross_model_report,
                       deviation_pct, geometry_csv, geometry_stats, histogram,
                       histogram_csv, multiplicity_csv, multiplicity_report,
                       pearson, relative_range)
from .instances import (Family, FormatError, GeneratorSpec, Instance,
                        SpectrumStats, euclidean_instance, generate,
                        parse_instance, spectrum_stats, truncate,
                        write_instance)
from .milp import (ExternalCheck, FormulationKind, TighteningConstants,
                   compute_constants, emit, parse_solution_vector,
                   verify_external)
from .objectives import (ObjectiveKind, Sense, Solution, contribution_vector,
                         eval_maxmean, eval_maxmin, eval_maxminsum,
                         eval_maxsum, eval_mindiff, evaluate)
from .plots import histogram_svg, scatter_svg
from .rng import CounterStream
from .solvers import (DEFAULT_OPTIMA_CAP, MAX_SUBINTERVAL_EXPONENT,
                      BiLevelResult, BudgetExceededError, OptimaEnumeration,
                      SearchStats, SolveResult, SolveStatus, SolverBudget,
                      ThresholdGraph, brute_force, build_threshold_graph,
                      default_subinterval_exponent, enumerate_maxmin_optima,
                      enumerate_optima, feasible_subset, max_packing,
                      solve_bilevel, solve_maxmin_improved,
                      solve_maxmin_original, solve_maxsum_bnb, solve_model)

__version__ = "0.1.0"

__all__ = [
    "BenchJob", "BenchRow", "BiLevelResult", "BudgetExceededError",
    "CounterStream", "CrossModelRow", "DEFAULT_OPTIMA_CAP",
    "DistanceHistogram", "ExternalCheck", "Family", "FormatError",
    "FormulationKind", "GeneratorSpec", "GeometryStats", "HistogramMode",
    "Instance", "MAX_SUBINTERVAL_EXPONENT", "MultiplicitySummary",
    "ObjectiveKind", "OptimaEnumeration", "PairedObjectives", "SearchStats",
    "Sense", "Solution", "SolveResult", "SolveStatus", "SolverBudget",
    "SpectrumStats", "ThresholdGraph", "TighteningConstants",
    "benchmark_csv", "benchmark_summary", "brute_force",
    "build_threshold_graph", "compute_constants", "compute_pairing",
    "contribution_vector", "cross_model_csv", "cross_model_report",
    "default_subinterval_exponent", "deviation_pct", "emit",
    "enumerate_maxmin_optima", "enumerate_optima", "euclidean_instance",
    "eval_maxmean", "eval_maxmin", "eval_maxminsum", "eval_maxsum",
    "eval_mindiff", "evaluate", "feasible_subset", "generate",
    "geometry_csv", "geometry_stats", "histogram", "histogram_csv",
    "histogram_svg", "max_packing", "multiplicity_csv",
    "multiplicity_report", "parse_instance", "parse_solution_vector",
    "pearson", "relative_range", "scatter_svg", "solve_bilevel",
    "solve_maxmin_improved", "solve_maxmin_original", "solve_maxsum_bnb",
    "solve_model", "spectrum_stats", "truncate", "verify_external",
    "write_instance",
]
