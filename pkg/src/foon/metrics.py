"""Task-tree quality measures and per-algorithm comparison tables."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

from . import search
from .core import MotionRateTable, TaskTree, UnknownMotionError

ROW_FIELDS = ("algorithm", "unit_count", "avg_success_rate", "expansions", "restarts",
              "max_frontier", "final_depth_bound", "mean_branching", "status")


def unit_count(tree: TaskTree) -> int:
    return len(set(tree.units))


def avg_success_rate(tree: TaskTree, rates: MotionRateTable) -> Optional[float]:
    """Unweighted mean motion rate over the tree's units.

    None for an empty tree, or when a motion has no rate and the table is not
    strict; a strict table raises :class:`UnknownMotionError` instead.
    """
    if not tree.units:
        return None
    values = []
    for unit in tree.functional_units():
        value = rates.get(unit.motion.name)
        if value is None:
            if rates.strict:
                raise UnknownMotionError(unit.motion.name)
            return None
        values.append(value)
    return sum(values) / len(values)


@dataclass
class ComparisonRow:
    algorithm: str
    status: str = "ok"
    report: Optional[object] = None
    error: str = ""

    def as_dict(self) -> dict:
        r = self.report
        return {
            "algorithm": self.algorithm,
            "unit_count": r.unit_count if r else None,
            "avg_success_rate": r.avg_success_rate if r else None,
            "expansions": r.expansions if r else None,
            "restarts": r.restarts if r else None,
            "max_frontier": r.max_frontier if r else None,
            "final_depth_bound": r.final_depth_bound if r else None,
            "mean_branching": r.mean_branching if r else None,
            "status": self.status,
        }


@dataclass
class ComparisonTable:
    goal: str
    rows: list = field(default_factory=list)

    def row(self, algorithm: str) -> ComparisonRow:
        for row in self.rows:
            if row.algorithm == algorithm:
                return row
        raise KeyError(algorithm)

    def to_json(self) -> str:
        payload = {"goal": self.goal, "rows": [row.as_dict() for row in self.rows]}
        return json.dumps(payload, indent=2) + "\n"

    def render(self) -> str:
        header = list(ROW_FIELDS)
        body = [[_cell(name, row.as_dict()[name]) for name in header] for row in self.rows]
        widths = [max(len(h), *(len(r[i]) for r in body)) if body else len(h)
                  for i, h in enumerate(header)]
        lines = [f"goal: {self.goal}",
                 "  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip()]
        for r in body:
            lines.append("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip())
        return "\n".join(lines) + "\n"


def _cell(name, value) -> str:
    if value is None:
        return "-" if name != "avg_success_rate" else "n/a"
    if name == "avg_success_rate":
        return f"{value:.2f}"
    if name == "mean_branching":
        return f"{value:.2f}"
    return str(value)


def compare(graph, goal, kitchen, rates, algorithms=search.ALL_POLICIES) -> ComparisonTable:
    table = ComparisonTable(str(goal))
    for policy in algorithms:
        row = ComparisonRow(policy.algorithm)
        try:
            row.report = search.resolve(graph, goal, kitchen, rates, policy)
        except search.GoalNotFoundError as err:
            row.status, row.error = "not_found", str(err)
        except search.UnsatisfiableGoalError as err:
            row.status, row.error = "unsatisfiable", str(err)
        except UnknownMotionError as err:
            row.status, row.error = "unknown_motion", str(err)
        table.rows.append(row)
    return table
