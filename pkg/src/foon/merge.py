"""Fold subgraphs into one universal FOON, dropping duplicate units.

The first occurrence of a unit wins, so re-merging never reorders the
producer candidates a search will see.
"""
from __future__ import annotations

from dataclasses import dataclass

from .core import FOONGraph
from .parser import load_subgraph


@dataclass(frozen=True)
class MergeReport:
    files_read: int = 0
    units_seen: int = 0
    duplicates_dropped: int = 0
    units_total: int = 0

    def __add__(self, other: "MergeReport") -> "MergeReport":
        return MergeReport(
            self.files_read + other.files_read,
            self.units_seen + other.units_seen,
            self.duplicates_dropped + other.duplicates_dropped,
            other.units_total,
        )

    def __str__(self):
        return (f"files_read={self.files_read} units_seen={self.units_seen} "
                f"duplicates_dropped={self.duplicates_dropped} units_total={self.units_total}")


def merge_units(graph: FOONGraph, new_units) -> tuple:
    units = list(graph.units)
    seen = {u.identity() for u in units}
    seen_count = dropped = 0
    for unit in new_units:
        seen_count += 1
        ident = unit.identity()
        if ident in seen:
            dropped += 1
            continue
        seen.add(ident)
        units.append(unit)
    merged = FOONGraph(tuple(units)) if dropped < seen_count else graph
    return merged, MergeReport(0, seen_count, dropped, len(merged))


def merge_files(paths) -> tuple:
    graph = FOONGraph()
    report = MergeReport()
    for path in paths:
        graph, step = merge_units(graph, load_subgraph(path))
        report = report + MergeReport(1, step.units_seen, step.duplicates_dropped, step.units_total)
    return graph, report
