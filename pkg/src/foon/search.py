"""Backward task-tree retrieval over the AND-OR structure of a FOON.

Every needed object is an OR-choice among the units that output it; the
chosen unit is an AND-requirement over its inputs.  The three policies share
one engine and differ only in

* candidate order at a choice point (unit index, or heuristic score), and
* which pending object is expanded next (FIFO for bfs, LIFO otherwise),

plus a depth bound with restarts for ids.

The engine backtracks chronologically: when an object cannot be given a
producer, the most recent choice is undone and its next candidate tried.
The result is therefore the first feasible tree in policy order, where
"first" compares the sequence of choices in the order they are made.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Optional

from .core import (
    FOONGraph,
    FunctionalUnit,
    GoalSpec,
    Kitchen,
    MotionRateTable,
    SearchReport,
    TaskTree,
    UnknownMotionError,
    canonical_key,
)

POLICY_KINDS = ("bfs", "ids", "gbfs")
HEURISTICS = ("success_rate", "input_count")


class SearchError(Exception):
    pass


class GoalNotFoundError(SearchError):
    def __init__(self, goal):
        super().__init__(f"no object matching goal {str(goal)!r}")
        self.goal = goal


class UnsatisfiableGoalError(SearchError):
    def __init__(self, goal):
        super().__init__(f"goal {str(goal)!r} cannot be made from the kitchen")
        self.goal = goal


@dataclass(frozen=True)
class SearchPolicy:
    kind: str
    heuristic: Optional[str] = None
    initial_depth_bound: int = 0

    def __post_init__(self):
        if self.kind not in POLICY_KINDS:
            raise ValueError(f"unknown policy kind {self.kind!r}")
        if (self.kind == "gbfs") != (self.heuristic is not None):
            raise ValueError("a heuristic is required for gbfs and only for gbfs")
        if self.heuristic is not None and self.heuristic not in HEURISTICS:
            raise ValueError(f"unknown heuristic {self.heuristic!r}")
        if self.initial_depth_bound < 0:
            raise ValueError("depth bound must be nonnegative")

    @property
    def algorithm(self) -> str:
        if self.kind == "gbfs":
            return "gbfs_rate" if self.heuristic == "success_rate" else "gbfs_count"
        return self.kind

    @classmethod
    def from_name(cls, name: str, initial_depth_bound: int = 0) -> "SearchPolicy":
        """Build a policy from ``bfs``, ``ids``, ``gbfs-rate`` or ``gbfs-count``."""
        name = name.strip().lower().replace("-", "_")
        if name == "bfs":
            return cls("bfs")
        if name == "ids":
            return cls("ids", initial_depth_bound=initial_depth_bound)
        if name == "gbfs_rate":
            return cls("gbfs", "success_rate")
        if name == "gbfs_count":
            return cls("gbfs", "input_count")
        raise ValueError(f"unknown algorithm {name!r}")


ALL_POLICIES = (
    SearchPolicy("bfs"),
    SearchPolicy("ids"),
    SearchPolicy("gbfs", "success_rate"),
    SearchPolicy("gbfs", "input_count"),
)


def heuristic_success_rate(unit: FunctionalUnit, rates: MotionRateTable) -> float:
    return rates.rate(unit.motion.name)


def heuristic_input_count(unit: FunctionalUnit) -> int:
    # a container with ingredients counts once per ingredient
    return sum(len(node.ingredients) or 1 for node in unit.inputs)


def gbfs_score(unit: FunctionalUnit, policy: SearchPolicy, rates: MotionRateTable) -> float:
    if policy.kind != "gbfs":
        raise ValueError("gbfs_score needs a gbfs policy")
    if policy.heuristic == "success_rate":
        return heuristic_success_rate(unit, rates)
    return -heuristic_input_count(unit)


def goal_candidates(graph: FOONGraph, goal: GoalSpec, kitchen: Optional[Kitchen] = None) -> list:
    """Distinct objects matching ``goal``, in canonical order.

    Objects are taken from the graph and, when given, from the kitchen too.
    """
    found = {node for node in graph.objects() if goal.matches(node)}
    if kitchen is not None:
        found.update(node for node in kitchen.items if goal.matches(node))
    return sorted(found, key=canonical_key)


def resolvable_objects(graph: FOONGraph, kitchen: Kitchen) -> set:
    """Objects with at least one acyclic derivation from the kitchen."""
    missing = [len(unit.inputs) for unit in graph.units]
    users: dict = {}
    for i, unit in enumerate(graph.units):
        for node in unit.inputs:
            users.setdefault(node, []).append(i)
    done = {node for node in users if node in kitchen.items}
    queue = deque(done)
    while queue:
        node = queue.popleft()
        for i in users.get(node, ()):
            missing[i] -= 1
            if missing[i] == 0:
                for out in graph.units[i].outputs:
                    if out not in done:
                        done.add(out)
                        queue.append(out)
    return done


class _Engine:
    """Backward AND-OR search over the producer index.

    Each pass commits, at every object, to the first candidate producer that
    still leaves the goal derivable (within the depth bound, if any). The
    derivability test is exact, so a pass never has to undo a choice and the
    tree it returns is the first one in the policy's candidate order.
    """

    def __init__(self, graph, kitchen, rates, policy):
        self.graph = graph
        self.units = graph.units
        self.kitchen = kitchen.items
        self.rates = rates
        self.policy = policy
        self.lifo = policy.kind != "bfs"
        self.resolvable = resolvable_objects(graph, kitchen) | set(self.kitchen)
        self._candidates: dict = {}
        self._relevant: dict = {}
        self.expansions = 0
        self.max_frontier = 0
        self.branching_total = 0
        self.branching_count = 0

    def candidates(self, node) -> tuple:
        cached = self._candidates.get(node)
        if cached is None:
            usable = [i for i in self.graph.producer_index.get(node, ())
                      if all(x in self.resolvable for x in self.units[i].inputs)]
            if self.policy.kind == "gbfs":
                usable.sort(key=lambda i: (-gbfs_score(self.units[i], self.policy, self.rates), i))
            cached = self._candidates[node] = tuple(usable)
        return cached

    def relevant(self, goal):
        """Users map and kitchen stock for the units that can feed ``goal``."""
        cached = self._relevant.get(goal)
        if cached is None:
            units, seen, todo = set(), {goal}, [goal]
            while todo:
                node = todo.pop()
                if node in self.kitchen:
                    continue
                for i in self.candidates(node):
                    if i in units:
                        continue
                    units.add(i)
                    for x in self.units[i].inputs:
                        if x not in seen:
                            seen.add(x)
                            todo.append(x)
            users: dict = {}
            for i in sorted(units):
                for x in self.units[i].inputs:
                    users.setdefault(x, []).append(i)
            stock = [x for x in seen if x in self.kitchen]
            cached = self._relevant[goal] = (users, stock)
        return cached

    def min_height(self, goal, assigned):
        """Smallest tree height for ``goal`` that keeps ``assigned``, or None.

        Objects are settled level by level from the kitchen; an assigned
        object may only be produced by its assigned unit.
        """
        if goal in self.kitchen:
            return 0
        users, stock = self.relevant(goal)
        missing: dict = {}
        done = set(stock)
        level, height = stock, 0
        while level:
            height += 1
            nxt = []
            for node in level:
                for i in users.get(node, ()):
                    left = missing.get(i, len(self.units[i].inputs)) - 1
                    missing[i] = left
                    if left:
                        continue
                    for out in self.units[i].outputs:
                        if out in done or assigned.get(out, i) != i:
                            continue
                        done.add(out)
                        nxt.append(out)
            if goal in done:
                return height
            level = nxt
        return None

    def closes_cycle(self, node, unit, assigned) -> bool:
        todo = list(unit.inputs)
        seen = set()
        while todo:
            cur = todo.pop()
            if cur == node:
                return True
            if cur in seen:
                continue
            seen.add(cur)
            chosen = assigned.get(cur)
            if chosen is not None:
                todo.extend(self.units[chosen].inputs)
        return False

    def run_pass(self, goal, bound):
        """One search from ``goal``; returns ``(choices or None, bound_was_hit)``.

        When no tree fits under ``bound`` the pass still walks the objects
        within the bound, as a depth-limited search would, before reporting
        the cut-off.
        """
        best = self.min_height(goal, {})
        if best is None:
            return None, False
        probe = bound is not None and best > bound
        limit = None if probe else bound
        frontier = deque([(goal, 0)])
        assigned: dict = {}
        self.max_frontier = max(self.max_frontier, 1)
        while frontier:
            node, depth = frontier.pop() if self.lifo else frontier.popleft()
            self.expansions += 1
            if node in self.kitchen or node in assigned:
                continue
            self.branching_total += len(self.graph.producer_index.get(node, ()))
            self.branching_count += 1
            if probe and depth >= bound:
                continue
            for i in self.candidates(node):
                if self.closes_cycle(node, self.units[i], assigned):
                    continue
                assigned[node] = i
                height = self.min_height(goal, assigned)
                if height is not None and (limit is None or height <= limit):
                    break
                del assigned[node]
            else:
                raise RuntimeError(f"no viable producer for {node!r}")
            inputs = self.units[assigned[node]].inputs
            frontier.extend((x, depth + 1) for x in (reversed(inputs) if self.lifo else inputs))
            self.max_frontier = max(self.max_frontier, len(frontier))
        if probe:
            return None, True
        return assigned, False

    def tree(self, goal, choices) -> TaskTree:
        order, emitted, visited = [], set(), set()
        todo = [(goal, False)]
        while todo:
            node, done = todo.pop()
            if done:
                unit = choices[node]
                if unit not in emitted:
                    emitted.add(unit)
                    order.append(unit)
                continue
            if node in visited or node in self.kitchen:
                continue
            visited.add(node)
            todo.append((node, True))
            todo.extend((x, False) for x in reversed(self.units[choices[node]].inputs))
        return TaskTree(self.graph, tuple(order), goal, dict(choices))


def resolve(graph: FOONGraph, goal: GoalSpec, kitchen: Kitchen, rates: MotionRateTable,
            policy: SearchPolicy) -> SearchReport:
    """Retrieve a task tree for ``goal``.

    Raises :class:`GoalNotFoundError` when nothing matches the goal,
    :class:`UnsatisfiableGoalError` when no match can be made, and
    :class:`UnknownMotionError` when the success-rate heuristic meets a motion
    missing from ``rates``.
    """
    from .metrics import avg_success_rate

    candidates = goal_candidates(graph, goal, kitchen)
    if not candidates:
        raise GoalNotFoundError(goal)
    engine = _Engine(graph, kitchen, rates, policy)
    restarts = 0
    found = None
    for node in candidates:
        if policy.kind == "ids":
            bound = policy.initial_depth_bound
            while True:
                choices, hit = engine.run_pass(node, bound)
                if choices is not None or not hit:
                    break
                bound += 1
                restarts += 1
        else:
            bound = None
            choices, _ = engine.run_pass(node, None)
        if choices is not None:
            found = (node, choices, bound)
            break
    if found is None:
        raise UnsatisfiableGoalError(goal)

    node, choices, bound = found
    tree = engine.tree(node, choices)
    try:
        rate = avg_success_rate(tree, rates)
    except UnknownMotionError:
        if policy.algorithm == "gbfs_rate":
            raise
        rate = None
    branching = engine.branching_total / engine.branching_count if engine.branching_count else 0.0
    return SearchReport(
        algorithm=policy.algorithm,
        goal=goal,
        tree=tree,
        unit_count=len(tree.units),
        avg_success_rate=rate,
        expansions=engine.expansions,
        restarts=restarts,
        max_frontier=engine.max_frontier,
        final_depth_bound=bound,
        mean_branching=branching,
    )
