"""Independent equilibrium oracles for the canonical outcome."""

from .deviation import DeviationReport, one_shot_deviation_check
from .grid import (
    GridComparison,
    GridGameSolution,
    check_consistency,
    compare_canonical_vs_grid,
    grid_backward_induction,
)

__all__ = [
    "DeviationReport",
    "GridComparison",
    "GridGameSolution",
    "check_consistency",
    "compare_canonical_vs_grid",
    "grid_backward_induction",
    "one_shot_deviation_check",
]
