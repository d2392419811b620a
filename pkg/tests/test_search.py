import random
import time

import pytest

from foon import (
    ALL_POLICIES,
    FOONGraph,
    FunctionalUnit,
    GoalNotFoundError,
    GoalSpec,
    Kitchen,
    MotionRateTable,
    ObjectNode,
    SearchPolicy,
    UnknownMotionError,
    UnsatisfiableGoalError,
    gbfs_score,
    goal_candidates,
    heuristic_input_count,
    heuristic_success_rate,
    resolve,
)
from foon.merge import merge_files
from foon.parser import load_kitchen, load_motion_rates

import oracle
from instances import RATES, chain, ice_instance, layered_instance, random_instance, rate_table

BFS, IDS, GBFS_RATE, GBFS_COUNT = ALL_POLICIES
POUR_CHOP = MotionRateTable({"pour": 0.9, "chop": 0.1})

bowl_sp = ObjectNode("bowl", ingredients={"salt", "pepper"})
knife = ObjectNode("knife")


def test_policy_validation():
    with pytest.raises(ValueError):
        SearchPolicy("gbfs")
    with pytest.raises(ValueError):
        SearchPolicy("bfs", "input_count")
    assert SearchPolicy.from_name("gbfs-count").algorithm == "gbfs_count"
    assert SearchPolicy.from_name("ids", 2).initial_depth_bound == 2


def test_goal_candidates():
    ice = ObjectNode("ice")
    g = FOONGraph((FunctionalUnit((ObjectNode("water"),), "freeze", (ice,)),))
    assert goal_candidates(g, GoalSpec("ice")) == [ice]
    assert goal_candidates(g, GoalSpec("ice", {"crushed"})) == []


def test_goal_candidates_state_variants():
    mixed = ObjectNode("salad", {"mixed"})
    dressed = ObjectNode("salad", {"dressed", "mixed"})
    units = (FunctionalUnit((ObjectNode("bowl"),), "mix", (mixed,)),
             FunctionalUnit((mixed, ObjectNode("oil")), "pour", (dressed,)))
    g = FOONGraph(units)
    expected = sorted({n for u in units for n in (*u.inputs, *u.outputs) if n.name == "salad"},
                      key=lambda n: (n.name, sorted(n.states), sorted(n.ingredients)))
    assert goal_candidates(g, GoalSpec("salad")) == expected == [dressed, mixed]
    assert goal_candidates(g, GoalSpec("salad", {"dressed"})) == [dressed]


def test_success_rate_heuristic():
    pour = FunctionalUnit((knife,), "pour", (ObjectNode("x"),))
    chop = FunctionalUnit((knife,), "chop", (ObjectNode("x"),))
    whisk = FunctionalUnit((knife,), "whisk", (ObjectNode("x"),))
    assert heuristic_success_rate(pour, POUR_CHOP) == 0.9
    assert heuristic_success_rate(chop, POUR_CHOP) == 0.1
    with pytest.raises(UnknownMotionError):
        heuristic_success_rate(whisk, MotionRateTable(POUR_CHOP.entries, strict=True))
    assert gbfs_score(pour, GBFS_RATE, POUR_CHOP) > gbfs_score(chop, GBFS_RATE, POUR_CHOP)


def test_input_count_heuristic():
    out = (ObjectNode("x"),)
    assert heuristic_input_count(FunctionalUnit((bowl_sp,), "mix", out)) == 2
    assert heuristic_input_count(FunctionalUnit((knife,), "mix", out)) == 1
    assert heuristic_input_count(FunctionalUnit((bowl_sp, knife), "mix", out)) == 2 + 1


def test_input_count_score_prefers_fewer_inputs():
    one = FunctionalUnit((knife,), "mix", (ObjectNode("x"),))
    three = FunctionalUnit((knife, ObjectNode("a"), ObjectNode("b")), "mix", (ObjectNode("x"),))
    assert gbfs_score(one, GBFS_COUNT, POUR_CHOP) == -1
    assert gbfs_score(three, GBFS_COUNT, POUR_CHOP) == -3


def test_equal_scores_break_ties_by_index():
    x = ObjectNode("x")
    kitchen = Kitchen({ObjectNode(n) for n in "abc"})
    units = tuple(FunctionalUnit((ObjectNode(n),), "pour", (x,)) for n in "cab")
    g = FOONGraph(units)
    # reference: sort candidates by (-score, index) by hand
    ranked = sorted(range(3), key=lambda i: (-POUR_CHOP.rate(units[i].motion.name), i))
    for _ in range(2):
        for policy in (GBFS_RATE, GBFS_COUNT):
            rep = resolve(g, GoalSpec("x"), kitchen, POUR_CHOP, policy)
            assert rep.tree.units == (ranked[0],) == (0,)


def test_goal_in_kitchen():
    water = ObjectNode("water", {"cold"})
    g = FOONGraph((FunctionalUnit((ObjectNode("ice"),), "melt", (water,)),))
    for policy in ALL_POLICIES:
        rep = resolve(g, GoalSpec.parse("water|cold"), Kitchen({water}),
                      MotionRateTable({"melt": 0.5}), policy)
        assert rep.unit_count == 0 and rep.expansions == 1 and rep.avg_success_rate is None


def test_ice_instance():
    g, k, rates, goal = ice_instance()
    bfs = resolve(g, goal, k, rates, BFS)
    gbfs = resolve(g, goal, k, rates, GBFS_RATE)
    assert bfs.tree.units == (0,) and bfs.avg_success_rate == pytest.approx(0.6)
    assert gbfs.tree.units == (1,) and gbfs.avg_success_rate == pytest.approx(0.8)
    # reference: the two feasible trees, found by brute force
    trees = oracle.feasible_trees(g.units, k.items, ObjectNode("ice"))
    assert sorted(t[ObjectNode("ice")] for t in trees) == [0, 1]


def test_goal_not_found():
    g, k, rates, _ = ice_instance()
    with pytest.raises(GoalNotFoundError):
        resolve(g, GoalSpec("unicorn"), k, rates, BFS)


def test_unsatisfiable():
    x = ObjectNode("x")
    g = FOONGraph((FunctionalUnit((ObjectNode("gold"),), "mix", (x,)),))
    for policy in ALL_POLICIES:
        with pytest.raises(UnsatisfiableGoalError):
            resolve(g, GoalSpec("x"), Kitchen(), rate_table(), policy)


def test_depth_three_chain():
    g, k, goal = chain(3)
    spec = GoalSpec(goal.name)
    bfs = resolve(g, spec, k, POUR_CHOP, BFS)
    ids = resolve(g, spec, k, POUR_CHOP, IDS)
    assert bfs.tree.units == ids.tree.units == (0, 1, 2)
    # bounds 0,1,2,3 dequeue 1,2,3,4 objects; bfs dequeues the 4 once
    assert bfs.expansions == 4
    assert ids.expansions == 1 + 2 + 3 + 4
    assert ids.restarts == 3 and ids.final_depth_bound == 3
    assert bfs.restarts == 0 and bfs.final_depth_bound is None


def test_ids_depth_start():
    g, k, goal = chain(3)
    rep = resolve(g, GoalSpec(goal.name), k, POUR_CHOP, SearchPolicy("ids", initial_depth_bound=2))
    assert rep.restarts == 1 and rep.final_depth_bound == 3
    rep = resolve(g, GoalSpec(goal.name), k, POUR_CHOP, SearchPolicy("ids", initial_depth_bound=5))
    assert rep.restarts == 0 and rep.final_depth_bound == 5


def test_skips_dead_end_producer():
    x, a, b = ObjectNode("x"), ObjectNode("a"), ObjectNode("b")
    units = (FunctionalUnit((a,), "pour", (x,)),      # a has no producer
             FunctionalUnit((b,), "chop", (x,)))
    g = FOONGraph(units)
    for policy in ALL_POLICIES:
        assert resolve(g, GoalSpec("x"), Kitchen({b}), POUR_CHOP, policy).tree.units == (1,)


def test_cycle_is_skipped():
    # frozen and thawed states convert into each other; only one way out of the kitchen
    water = ObjectNode("water")
    ice = ObjectNode("water", {"frozen"})
    slush = ObjectNode("slush")
    units = (FunctionalUnit((ice,), "melt", (water,)),
             FunctionalUnit((water,), "freeze", (ice,)),
             FunctionalUnit((water,), "blend", (slush,)),
             FunctionalUnit((ObjectNode("tap"),), "pour", (water,)))
    g = FOONGraph(units)
    k = Kitchen({ObjectNode("tap")})
    rates = MotionRateTable({"melt": 1.0, "freeze": 1.0, "blend": 0.5, "pour": 0.2})
    for policy in ALL_POLICIES:
        rep = resolve(g, GoalSpec("slush"), k, rates, policy)
        assert rep.tree.units == (3, 2)
        assert oracle.is_executable(list(rep.tree.units), g.units, k.items, slush)


def test_strict_unknown_motion():
    g, k, _, goal = ice_instance()
    strict = MotionRateTable({"freeze": 0.8}, strict=True)
    with pytest.raises(UnknownMotionError):
        resolve(g, goal, k, strict, GBFS_RATE)
    # policies that never consult rates still succeed, without an average
    assert resolve(g, goal, k, strict, BFS).avg_success_rate is None
    loose = MotionRateTable({"freeze": 0.8}, default_rate=0.5)
    assert resolve(g, goal, k, loose, GBFS_RATE).tree.units == (1,)


def test_missing_rates_give_no_average():
    g, k, _, goal = ice_instance()
    assert resolve(g, goal, k, MotionRateTable(), BFS).avg_success_rate is None


def test_unit_shared_by_two_needed_objects():
    # one unit yields both needed objects; it must appear once
    a, b, goal, src = ObjectNode("a"), ObjectNode("b"), ObjectNode("goal"), ObjectNode("src")
    units = (FunctionalUnit((src,), "split", (a, b)), FunctionalUnit((a, b), "mix", (goal,)))
    g = FOONGraph(units)
    for policy in ALL_POLICIES:
        rep = resolve(g, GoalSpec("goal"), Kitchen({src}), MotionRateTable(default_rate=0.5), policy)
        assert rep.tree.units == (0, 1)


def _check_against_oracle(graph, kitchen, goal, policy):
    spec = GoalSpec(goal.name, goal.states)
    expected = oracle.expected_choice(policy.algorithm, graph.units, kitchen.items, goal, RATES)
    if expected is None:
        with pytest.raises(UnsatisfiableGoalError):
            resolve(graph, spec, kitchen, rate_table(), policy)
        return None
    rep = resolve(graph, spec, kitchen, rate_table(), policy)
    assert dict(rep.tree.choices) == expected
    assert oracle.is_executable(list(rep.tree.units), graph.units, kitchen.items, goal)
    if policy.algorithm == "ids":
        assert rep.final_depth_bound == oracle.tree_height(expected, graph.units, goal)
    return rep


@pytest.mark.parametrize("seed", range(60))
@pytest.mark.parametrize("policy", ALL_POLICIES, ids=lambda p: p.algorithm)
def test_matches_brute_force(seed, policy):
    graph, kitchen, goal = random_instance(random.Random(seed))
    _check_against_oracle(graph, kitchen, goal, policy)


@pytest.mark.parametrize("seed", range(40))
def test_gbfs_rate_local_optimality(seed):
    graph, kitchen, goal = random_instance(random.Random(1000 + seed))
    trees = oracle.feasible_trees(graph.units, kitchen.items, goal)
    if not trees:
        return
    rep = resolve(graph, GoalSpec(goal.name, goal.states), kitchen, rate_table(), SearchPolicy("gbfs", "success_rate"))
    chosen = rep.tree.choices
    # at each choice point, no better-rated sibling could have completed the same tree prefix
    for node, unit in chosen.items():
        mine = RATES[graph.units[unit].motion.name]
        for other in oracle.producers_by_scan(graph.units)[node]:
            if RATES[graph.units[other].motion.name] <= mine:
                continue
            earlier = _earlier_choices(rep, kitchen, node)
            assert not any(t.get(node) == other and all(t.get(n) == u for n, u in earlier.items())
                           for t in trees)


def _earlier_choices(rep, kitchen, stop):
    """Choices made before ``stop`` in the depth-first order the policy uses."""
    units = rep.tree.graph.units
    frontier, seen, out = [rep.tree.goal_node], set(), {}
    while frontier:
        node = frontier.pop()
        if node in kitchen.items or node in seen:
            continue
        if node == stop:
            return out
        seen.add(node)
        out[node] = rep.tree.choices[node]
        frontier.extend(reversed(units[out[node]].inputs))
    return out


def test_deterministic(corpus_files, kitchen_path, motions_path):
    graph, _ = merge_files(corpus_files)
    kitchen = load_kitchen(kitchen_path)
    rates = load_motion_rates(motions_path)
    for goal in ("macaroni", "whipped cream", "lemonade", "tea"):
        for policy in ALL_POLICIES:
            a = resolve(graph, GoalSpec(goal), kitchen, rates, policy)
            b = resolve(graph, GoalSpec(goal), kitchen, rates, policy)
            assert repr(a) == repr(b) and a.tree.choices == b.tree.choices


def test_corpus_trees_are_executable(corpus_files, kitchen_path, motions_path):
    graph, _ = merge_files(corpus_files)
    kitchen = load_kitchen(kitchen_path)
    rates = load_motion_rates(motions_path)
    goals = sorted({n.name for n in graph.objects() if n not in kitchen})
    solved = 0
    for name in goals:
        for policy in ALL_POLICIES:
            try:
                rep = resolve(graph, GoalSpec(name), kitchen, rates, policy)
            except UnsatisfiableGoalError:
                continue
            solved += 1
            assert oracle.is_executable(list(rep.tree.units), graph.units, kitchen.items,
                                        rep.tree.goal_node)
    assert solved > 100


def test_whipped_cream_rate_heuristic_prefers_mixer(corpus_files, kitchen_path, motions_path):
    graph, _ = merge_files(corpus_files)
    kitchen = load_kitchen(kitchen_path)
    rates = load_motion_rates(motions_path)
    bfs = resolve(graph, GoalSpec("whipped cream"), kitchen, rates, BFS)
    gbfs = resolve(graph, GoalSpec("whipped cream"), kitchen, rates, GBFS_RATE)
    assert [u.motion.name for u in bfs.tree.functional_units()][-1] == "whisk"
    assert [u.motion.name for u in gbfs.tree.functional_units()][-1] == "mix"
    assert gbfs.avg_success_rate > bfs.avg_success_rate


def test_large_graph_stays_fast():
    graph, kitchen, vocab = layered_instance()
    assert len(graph) > 2000
    start = time.perf_counter()
    solved = 0
    for node in (vocab[200], vocab[600], vocab[800], vocab[899]):
        for policy in ALL_POLICIES:
            rep = resolve(graph, GoalSpec(node.name, node.states), kitchen, rate_table(), policy)
            assert oracle.is_executable(list(rep.tree.units), graph.units, kitchen.items, node)
            solved += 1
    assert solved == 16
    assert time.perf_counter() - start < 20.0
