"""Exact-arithmetic knapsack intersection hierarchy for packing integer programs.

Everything is computed over the rationals. The main entry points:

* ``PipInstance`` / ``TreeInstance``: packing programs and their tree-routing form;
* ``solve_lp`` and ``verify_lp_outcome``: certified exact LP;
* ``membership``: separation over the integer hull of a row subset;
* ``optimize_level``: optimum of level ``t`` with a checkable certificate;
* ``s_routable_partition``: colouring-based membership certificates.
"""

from .anf_tree import TreeInstance, generate_fg, generate_random_tree, generate_staircase, to_pip
from .coloring import s_routable_partition, staircase_partition, uniform_membership_certificate
from .exact_lp import LinearProgram, Row, solve_lp, verify_lp_outcome
from .hierarchy import (
    BudgetExhausted,
    HierarchyResult,
    gap_report,
    generate_rank_cuts,
    optimize_level,
    point_in_level,
    verify_hierarchy_result,
)
from .hull_oracle import Inside, Outside, membership, verify_membership_certificate
from .knapsack import NodeBudgetExceeded, rank, solve_ip
from .numerics import RAT_BACKEND, Rat
from .pip_model import InstanceError, PipInstance, subsystem

__version__ = "0.1.0"

__all__ = [
    "BudgetExhausted", "HierarchyResult", "Inside", "InstanceError", "LinearProgram",
    "NodeBudgetExceeded", "Outside", "PipInstance", "RAT_BACKEND", "Rat", "Row", "TreeInstance",
    "gap_report", "generate_fg", "generate_random_tree", "generate_rank_cuts", "generate_staircase",
    "membership", "optimize_level", "point_in_level", "rank", "s_routable_partition", "solve_ip",
    "solve_lp", "staircase_partition", "subsystem", "to_pip", "uniform_membership_certificate",
    "verify_hierarchy_result", "verify_lp_outcome", "verify_membership_certificate",
]
