"""Functional object-oriented networks: parsing, merging and task-tree retrieval."""
from .core import (
    ALGORITHMS,
    FOONGraph,
    FunctionalUnit,
    GoalSpec,
    Kitchen,
    MotionNode,
    MotionRateTable,
    ObjectNode,
    SearchReport,
    TaskTree,
    UnknownMotionError,
    canonical_key,
    kitchen_contains,
    producers_of,
    units_equal,
)
from .merge import MergeReport, merge_files, merge_units
from .metrics import ComparisonTable, avg_success_rate, compare, unit_count
from .parser import (
    ParseError,
    parse_kitchen,
    parse_motion_rates,
    parse_subgraph,
    serialize_kitchen,
    serialize_subgraph,
)
from .search import (
    ALL_POLICIES,
    GoalNotFoundError,
    SearchPolicy,
    UnsatisfiableGoalError,
    gbfs_score,
    goal_candidates,
    heuristic_input_count,
    heuristic_success_rate,
    resolve,
)

__version__ = "0.1.0"
