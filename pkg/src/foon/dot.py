"""Graphviz DOT rendering of FOON graphs and task trees.

Object nodes are ellipses, motion nodes boxes.  Node ids come from the
canonical object order and the unit position so diffs stay readable.
"""
from __future__ import annotations

from typing import Optional

from .core import MotionRateTable, canonical_key


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _object_label(node) -> str:
    parts = [node.name]
    if node.states:
        parts.append(",".join(sorted(node.states)))
    if node.ingredients:
        parts.append("{" + ",".join(sorted(node.ingredients)) + "}")
    return "\\n".join(_quote(p)[1:-1] for p in parts)


def to_dot(units, rates: Optional[MotionRateTable] = None, name: str = "foon") -> str:
    units = list(units)
    objects = sorted({n for u in units for n in (*u.inputs, *u.outputs)}, key=canonical_key)
    ids = {node: f"o{i}" for i, node in enumerate(objects)}
    lines = [f"digraph {name} {{"]
    for node in objects:
        lines.append(f'  {ids[node]} [shape=ellipse, label="{_object_label(node)}"];')
    for i, unit in enumerate(units):
        label = unit.motion.name
        rate = rates.get(label) if rates is not None else None
        if rate is not None:
            label = f"{label} ({rate:.2f})"
        lines.append(f"  m{i} [shape=box, label={_quote(label)}];")
        for node in unit.inputs:
            lines.append(f"  {ids[node]} -> m{i};")
        for node in unit.outputs:
            lines.append(f"  m{i} -> {ids[node]};")
    lines.append("}")
    return "\n".join(lines) + "\n"
