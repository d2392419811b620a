"""Domain types for functional object-oriented networks.

Objects are compared by identity ``(name, states, ingredients)``; names and
labels are case-folded and trimmed on construction so hand-written files
that differ only in casing describe the same node.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Optional


def _token(text: str) -> str:
    return " ".join(str(text).split()).casefold() if text is not None else ""


def _token_set(items: Iterable[str]) -> frozenset:
    if isinstance(items, str):
        items = [items]
    out = frozenset(_token(s) for s in items)
    if "" in out:
        raise ValueError("empty state or ingredient label")
    return out


@dataclass(frozen=True)
class ObjectNode:
    name: str
    states: frozenset = frozenset()
    ingredients: frozenset = frozenset()

    def __post_init__(self):
        name = _token(self.name)
        if not name:
            raise ValueError("object name must be nonempty")
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "states", _token_set(self.states))
        object.__setattr__(self, "ingredients", _token_set(self.ingredients))

    def key(self) -> tuple:
        return canonical_key(self)

    def label(self) -> str:
        parts = [self.name]
        if self.states:
            parts.append(",".join(sorted(self.states)))
        if self.ingredients:
            parts.append("{" + ",".join(sorted(self.ingredients)) + "}")
        return " ".join(parts)

    def __repr__(self):
        return f"ObjectNode({self.label()!r})"


@dataclass(frozen=True)
class MotionNode:
    name: str

    def __post_init__(self):
        name = _token(self.name)
        if not name:
            raise ValueError("motion name must be nonempty")
        object.__setattr__(self, "name", name)


def canonical_key(node: ObjectNode) -> tuple:
    """Total-order key: name, then sorted states, then sorted ingredients."""
    return (node.name, tuple(sorted(node.states)), tuple(sorted(node.ingredients)))


class UnknownMotionError(LookupError):
    """A motion has no success rate and no default is configured."""

    def __init__(self, motion: str):
        super().__init__(f"no success rate for motion {motion!r}")
        self.motion = motion


@dataclass(frozen=True)
class MotionRateTable:
    entries: Mapping[str, float] = field(default_factory=dict)
    default_rate: Optional[float] = None
    strict: bool = False

    def __post_init__(self):
        clean = {}
        for motion, rate in dict(self.entries).items():
            _check_rate(rate)
            clean[_token(motion)] = float(rate)
        object.__setattr__(self, "entries", clean)
        if self.default_rate is not None:
            if self.strict:
                raise ValueError("strict rate tables cannot carry a default rate")
            _check_rate(self.default_rate)

    def get(self, motion: str) -> Optional[float]:
        motion = _token(motion)
        if motion in self.entries:
            return self.entries[motion]
        return self.default_rate

    def rate(self, motion: str) -> float:
        value = self.get(motion)
        if value is None:
            raise UnknownMotionError(_token(motion))
        return value

    def with_options(self, *, default_rate=None, strict=False) -> "MotionRateTable":
        return MotionRateTable(self.entries, default_rate=default_rate, strict=strict)

    def __len__(self):
        return len(self.entries)


def _check_rate(rate) -> None:
    if isinstance(rate, bool) or not isinstance(rate, (int, float)):
        raise ValueError(f"rate must be a number, got {rate!r}")
    if not math.isfinite(rate) or not 0.0 <= rate <= 1.0:
        raise ValueError(f"rate {rate!r} outside [0, 1]")


@dataclass(frozen=True)
class FunctionalUnit:
    """Input objects transformed by one motion into output objects.

    List order is kept for serialization only; equality between units in the
    duplicate sense is :func:`units_equal`, which ignores order.
    """

    inputs: tuple
    motion: MotionNode
    outputs: tuple

    def __post_init__(self):
        motion = self.motion if isinstance(self.motion, MotionNode) else MotionNode(self.motion)
        object.__setattr__(self, "motion", motion)
        for side in ("inputs", "outputs"):
            nodes = tuple(getattr(self, side))
            if not nodes:
                raise ValueError(f"functional unit needs at least one {side[:-1]}")
            if len(set(nodes)) != len(nodes):
                raise ValueError(f"duplicate object among {side}")
            object.__setattr__(self, side, nodes)

    def identity(self) -> tuple:
        return (frozenset(self.inputs), self.motion.name, frozenset(self.outputs))


def units_equal(a: FunctionalUnit, b: FunctionalUnit) -> bool:
    return a.identity() == b.identity()


@dataclass(frozen=True)
class FOONGraph:
    units: tuple = ()
    producer_index: Mapping = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        units = tuple(self.units)
        seen = {}
        for i, unit in enumerate(units):
            ident = unit.identity()
            if ident in seen:
                raise ValueError(f"units {seen[ident]} and {i} are duplicates")
            seen[ident] = i
        object.__setattr__(self, "units", units)
        object.__setattr__(self, "_identities", seen)
        object.__setattr__(self, "producer_index", build_producer_index(units))

    def __len__(self):
        return len(self.units)

    def __iter__(self) -> Iterator[FunctionalUnit]:
        return iter(self.units)

    def index_of(self, unit: FunctionalUnit) -> Optional[int]:
        return self._identities.get(unit.identity())

    def objects(self) -> list:
        """Every distinct object identity in the graph, in canonical order."""
        found = set()
        for unit in self.units:
            found.update(unit.inputs)
            found.update(unit.outputs)
        return sorted(found, key=canonical_key)

    def motions(self) -> list:
        return sorted({u.motion.name for u in self.units})


def build_producer_index(units) -> dict:
    index: dict = {}
    for i, unit in enumerate(units):
        for node in unit.outputs:
            index.setdefault(node, []).append(i)
    return {node: tuple(ids) for node, ids in index.items()}


def producers_of(graph: FOONGraph, node: ObjectNode) -> list:
    return list(graph.producer_index.get(node, ()))


@dataclass(frozen=True)
class Kitchen:
    items: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "items", frozenset(self.items))

    def __contains__(self, node) -> bool:
        return node in self.items

    def __len__(self):
        return len(self.items)

    def __iter__(self):
        return iter(sorted(self.items, key=canonical_key))


def kitchen_contains(kitchen: Kitchen, node: ObjectNode) -> bool:
    return node in kitchen.items


@dataclass(frozen=True)
class GoalSpec:
    name: str
    required_states: frozenset = frozenset()

    def __post_init__(self):
        name = _token(self.name)
        if not name:
            raise ValueError("goal name must be nonempty")
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "required_states", _token_set(self.required_states))

    @classmethod
    def parse(cls, text: str) -> "GoalSpec":
        """Parse ``name`` or ``name|state1,state2``."""
        name, sep, states = text.partition("|")
        labels = [s for s in (p.strip() for p in states.split(",")) if s] if sep else []
        return cls(name, frozenset(labels))

    def matches(self, node: ObjectNode) -> bool:
        return node.name == self.name and self.required_states <= node.states

    def __str__(self):
        if not self.required_states:
            return self.name
        return self.name + "|" + ",".join(sorted(self.required_states))


@dataclass(frozen=True)
class TaskTree:
    """Executable unit sequence ending at ``goal_node``.

    ``units`` are indices into ``graph``; ``choices`` records, for every
    non-kitchen object resolved on the way, the index of the unit chosen to
    produce it.
    """

    graph: FOONGraph = field(repr=False)
    units: tuple
    goal_node: ObjectNode
    choices: Mapping = field(default_factory=dict, compare=False)

    def functional_units(self) -> list:
        return [self.graph.units[i] for i in self.units]

    def __len__(self):
        return len(self.units)

    def depth(self, kitchen: Kitchen) -> int:
        """Number of units on the longest goal-to-leaf chain."""
        memo: dict = {}

        def height(node):
            if node in kitchen.items or node not in self.choices:
                return 0
            if node not in memo:
                unit = self.graph.units[self.choices[node]]
                memo[node] = 1 + max(height(i) for i in unit.inputs)
            return memo[node]

        return height(self.goal_node)


ALGORITHMS = ("bfs", "ids", "gbfs_rate", "gbfs_count")


@dataclass(frozen=True)
class SearchReport:
    algorithm: str
    goal: GoalSpec
    tree: TaskTree
    unit_count: int
    avg_success_rate: Optional[float]
    expansions: int
    restarts: int
    max_frontier: int
    final_depth_bound: Optional[int]
    mean_branching: float

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.unit_count != len(self.tree.units):
            raise ValueError("unit_count disagrees with tree")
        if self.restarts and self.algorithm != "ids":
            raise ValueError("only ids restarts")
