import itertools
import math
import random
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import cnf, custom_instance, small_cnfs
from lllsolve.applications import cnf_to_instance, random_kcnf
from lllsolve.criteria import XAssignment
from lllsolve.errors import EnumerationLimitExceeded, ImproperTreeError
from lllsolve.model import (DependencyGraph, build_dependency_graph,
                            build_lopsidependency_graph, exact_probability)
from lllsolve.sampling import SampleStream, SampleTable
from lllsolve.sequential import ExecutionLog, solve_sequential
from lllsolve.witness import (WitnessTree, build_witness_tree, count_trees, enumerate_trees,
                              gw_sample, gw_tree_probability, is_proper, read_plan,
                              respects_graph, shrink_range_bound, tree_check)

ISOLATED = DependencyGraph(((),))
PAIR = DependencyGraph(((1,), (0,)))


def naive_witness_tree(steps, t, graph):
    """Direct construction: scan every vertex for each candidate step."""
    nodes = [(steps[t - 1], -1, 0)]  # (label, parent, depth)
    for i in range(t - 1, 0, -1):
        c = steps[i - 1]
        hosts = [v for v, (lab, _, _) in enumerate(nodes) if c in graph.inclusive(lab)]
        if hosts:
            deepest = max(nodes[v][2] for v in hosts)
            h = min(v for v in hosts if nodes[v][2] == deepest)
            nodes.append((c, h, deepest + 1))
    return nodes


def naive_trees(graph, max_size):
    """All proper trees up to ``max_size`` by growing leaves one at a time."""
    found = {WitnessTree.from_nested((a, ())) for a in range(len(graph))}
    frontier = set(found)
    for _ in range(max_size - 1):
        grown = set()
        for tree in frontier:
            for v in range(len(tree)):
                for b in graph.inclusive(tree.labels[v]):
                    new = WitnessTree(tree.labels + (b,), tree.parents + (v,),
                                      tree.depths + (tree.depths[v] + 1,))
                    if is_proper(new):
                        grown.add(new)
        found |= grown
        frontier = grown
    return found


def gw_probability_direct(tree, x, graph):
    """Birth/no-birth product over every vertex and candidate label."""
    p = 1.0
    kids = tree.child_lists()
    for v, lab in enumerate(tree.labels):
        child_labels = {tree.labels[w] for w in kids[v]}
        for b in graph.inclusive(lab):
            p *= x[b] if b in child_labels else 1.0 - x[b]
    return p


def test_first_step_is_singleton():
    g = PAIR
    tree = build_witness_tree([1, 0, 0], 1, g)
    assert len(tree) == 1 and tree.root_label == 1


def test_path_example():
    tree = build_witness_tree([0, 1, 0], 3, PAIR)
    assert tree.canonical() == "0(1(0))"
    assert len(tree) == 3 and tree.depth == 2


def test_skip_unrelated():
    g = DependencyGraph(((), ()))
    tree = build_witness_tree([0, 1], 2, g)
    assert tree.canonical() == "1"


def test_tie_goes_to_earliest_vertex():
    # star: 0 adjacent to 1 and 2; 1 and 2 adjacent to 3
    g = DependencyGraph(((1, 2), (0, 3), (0, 3), (1, 2)))
    tree = build_witness_tree([3, 2, 1, 0], 4, g)
    # 1 and 2 hang below 0 at depth 1; 3 attaches below the earlier one (label 1)
    assert tree.labels == (0, 1, 2, 3)
    assert tree.parents == (-1, 0, 0, 1)


def test_is_proper_examples():
    assert is_proper(WitnessTree.parse("0"))
    assert not is_proper(WitnessTree.parse("0(1,1)"))
    assert is_proper(WitnessTree.parse("0(1(1),0)"))


def test_parse_round_trip():
    tree = WitnessTree.parse("2(0(1),3(3(2)))")
    assert WitnessTree.parse(tree.canonical()) == tree
    with pytest.raises(ValueError):
        WitnessTree.parse("0(1")
    with pytest.raises(ValueError):
        WitnessTree.parse("0)")


def random_log_run(seed, n=24, m=14, width=3, degree=3):
    formula = random_kcnf(n, m, width, degree, random.Random(seed))
    inst, conflicts = cnf_to_instance(formula)
    return inst, conflicts, solve_sequential(inst, SampleStream(inst.variables, seed))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(0, 4), min_size=1, max_size=30), st.data())
def test_matches_naive_construction(steps, data):
    adjacency = [set() for _ in range(5)]
    for a, b in itertools.combinations(range(5), 2):
        if data.draw(st.booleans()):
            adjacency[a].add(b)
            adjacency[b].add(a)
    g = DependencyGraph(tuple(tuple(sorted(s)) for s in adjacency))
    for t in range(1, len(steps) + 1):
        tree = build_witness_tree(steps, t, g)
        assert list(zip(tree.labels, tree.parents, tree.depths)) == \
            naive_witness_tree(steps, t, g)
        assert is_proper(tree) and respects_graph(tree, g)


@pytest.mark.parametrize("seed", range(8))
def test_log_trees_proper_and_levels_independent(seed):
    inst, _, result = random_log_run(seed)
    g = build_dependency_graph(inst)
    for t in range(1, len(result.log) + 1):
        tree = build_witness_tree(result.log, t, g)
        assert is_proper(tree)
        for level in tree.levels():
            supports = [set(inst.events[tree.labels[v]].support) for v in level]
            for s1, s2 in itertools.combinations(supports, 2):
                assert not s1 & s2


@pytest.mark.parametrize("seed", range(8))
def test_injectivity(seed):
    inst, _, result = random_log_run(seed)
    g = build_dependency_graph(inst)
    steps = result.log.steps
    seen = {}
    for t, a in enumerate(steps, start=1):
        seen.setdefault(a, []).append(build_witness_tree(result.log, t, g))
    for a, trees in seen.items():
        for i, tree in enumerate(trees, start=1):
            assert sum(1 for lab in tree.labels if lab == a) == i
        assert len(set(trees)) == len(trees)


@pytest.mark.parametrize("seed", range(20))
def test_coupling(seed):
    inst, conflicts, result = random_log_run(seed)
    g = build_dependency_graph(inst)
    stream = SampleStream(inst.variables, seed)
    for t in range(1, len(result.log) + 1):
        assert tree_check(build_witness_tree(result.log, t, g), stream, inst)


@pytest.mark.parametrize("seed", range(10))
def test_read_plan_counts_deeper_vertices(seed):
    inst, _, result = random_log_run(seed)
    g = build_dependency_graph(inst)
    for t in range(1, len(result.log) + 1):
        tree = build_witness_tree(result.log, t, g)
        for v, cells in read_plan(tree, inst):
            for var, j in cells:
                deeper = sum(1 for w in range(len(tree))
                             if tree.depths[w] > tree.depths[v]
                             and var in inst.events[tree.labels[w]].support)
                assert j == deeper


def test_tree_check_boundaries():
    never = custom_instance([2, 2], [((0, 1), lambda v: False), ((1,), lambda v: True)])
    always = custom_instance([2, 2], [((0, 1), lambda v: True)])
    s = SampleStream(never.variables, 1)
    assert not tree_check(WitnessTree.parse("1(0)"), s, never)
    assert tree_check(WitnessTree.parse("0(0(0),0)"), s, always)


def test_tree_check_on_table():
    inst, _ = cnf(2, (1, 2))
    table = SampleTable([[0, 0, 1], [0, 0, 1]])
    assert tree_check(WitnessTree.parse("0(0)"), table, inst)
    assert not tree_check(WitnessTree.parse("0(0(0))"), table, inst)


def test_pass_frequency_matches_product():
    inst, _ = cnf(4, (1, 2), (-2, 3), (3, 4))
    tree = WitnessTree.parse("1(0,2(1))")
    expected = math.prod(exact_probability(inst, lab) for lab in tree.labels)
    n = 40000
    hits = sum(tree_check(tree, SampleStream(inst.variables, s), inst) for s in range(n))
    sd = math.sqrt(expected * (1 - expected) / n)
    assert abs(hits / n - expected) <= 3 * sd


def test_appearance_bound():
    inst, _ = cnf(4, (1, 2), (-2, 3), (3, 4))
    g = build_dependency_graph(inst)
    target = WitnessTree.parse("1(0)")
    bound = math.prod(exact_probability(inst, lab) for lab in target.labels)
    n = 20000
    occurs = 0
    for s in range(n):
        log = solve_sequential(inst, SampleStream(inst.variables, s)).log
        if any(build_witness_tree(log, t, g) == target for t in range(1, len(log) + 1)):
            occurs += 1
    assert occurs / n <= bound + 3 * math.sqrt(bound * (1 - bound) / n)


def test_lopsided_replay_reported(record_property):
    # recorded logs are not covered by the exchange argument, so this is
    # measured rather than asserted
    failures = total = 0
    for seed in range(40):
        inst, conflicts, result = random_log_run(seed)
        lg = build_lopsidependency_graph(inst, conflicts)
        stream = SampleStream(inst.variables, seed)
        for t in range(1, len(result.log) + 1):
            total += 1
            failures += not tree_check(build_witness_tree(result.log, t, lg), stream, inst)
    record_property("lopsided_replay_failures", f"{failures}/{total}")
    print(f"lopsided replay: {failures} of {total} trees failed their check")
    assert total > 0


def test_gw_no_births():
    x = XAssignment((1e-12, 1e-12))
    rng = random.Random(0)
    assert all(len(gw_sample(0, x, PAIR, rng=rng)) == 1 for _ in range(1000))


def test_gw_isolated_singleton_half():
    rng = random.Random(1)
    n = 40000
    singles = sum(len(gw_sample(0, XAssignment((0.5,)), ISOLATED, rng=rng)) == 1
                  for _ in range(n))
    assert abs(singles / n - 0.5) <= 3 * math.sqrt(0.25 / n)


def test_gw_overflow():
    x = XAssignment((0.99, 0.99))
    rng = random.Random(0)
    assert any(gw_sample(0, x, PAIR, depth_limit=3, rng=rng) is None for _ in range(20))
    assert gw_sample(0, x, PAIR, rng=rng, max_vertices=2) is None


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32), st.floats(0.05, 0.45))
def test_gw_outputs_proper(seed, xv):
    g = DependencyGraph(((1, 2), (0,), (0,)))
    rng = random.Random(seed)
    for _ in range(50):
        tree = gw_sample(seed % 3, XAssignment((xv,) * 3), g, rng=rng)
        if tree is not None:
            assert is_proper(tree) and respects_graph(tree, g)


def test_gw_probability_examples():
    x = XAssignment((0.5,))
    assert gw_tree_probability(WitnessTree.parse("0"), x, ISOLATED) == pytest.approx(0.5)
    assert gw_tree_probability(WitnessTree.parse("0(0)"), x, ISOLATED) == pytest.approx(0.25)
    with pytest.raises(ImproperTreeError):
        gw_tree_probability(WitnessTree.parse("0(0,0)"), x, ISOLATED)
    with pytest.raises(ValueError):
        gw_tree_probability(WitnessTree.parse("0(1)"), XAssignment((0.5, 0.5)),
                            DependencyGraph(((), ())))


@pytest.mark.parametrize("graph,x", [
    (PAIR, (0.3, 0.3)),
    (DependencyGraph(((1,), (0, 2), (1,))), (0.2, 0.25, 0.3)),
    (DependencyGraph(((1, 2), (0, 2), (0, 1))), (0.1, 0.15, 0.2)),
])
def test_gw_formula_and_total(graph, x):
    x = XAssignment(x)
    trees = naive_trees(graph, 5)
    for tree in trees:
        assert gw_tree_probability(tree, x, graph) == pytest.approx(
            gw_probability_direct(tree, x, graph), rel=1e-12)
    for root in range(len(graph)):
        total = sum(gw_tree_probability(t, x, graph) for t in trees if t.root_label == root)
        assert total <= 1.0 + 1e-12


def test_enumeration_examples():
    inst1, _ = cnf(2, (1, 2))
    g1 = build_dependency_graph(inst1)
    assert [t.canonical() for t in enumerate_trees(inst1, g1, (1, 1))] == ["0"]
    assert [t.canonical() for t in enumerate_trees(inst1, g1, (1, 3))] == ["0", "0(0)",
                                                                            "0(0(0))"]
    inst2, _ = cnf(3, (1, 2), (2, 3))
    g2 = build_dependency_graph(inst2)
    assert count_trees(g2, (1, 2)) == 6
    assert len(list(enumerate_trees(inst2, g2, (1, 2)))) == 6


@pytest.mark.parametrize("clauses,max_size", [
    (((1, 2), (2, 3)), 5),
    (((1, 2), (2, 3), (3, 4)), 4),
    (((1, 2), (1, 3), (1, 4)), 4),
    (((1, 2), (3, 4)), 5),
])
def test_enumeration_matches_naive(clauses, max_size):
    inst, _ = cnf(4, *clauses)
    g = build_dependency_graph(inst)
    naive = naive_trees(g, max_size)
    for lo in (1, 2):
        listed = list(enumerate_trees(inst, g, (lo, max_size)))
        assert len(listed) == len(set(listed)) == count_trees(g, (lo, max_size))
        assert set(listed) == {t for t in naive if len(t) >= lo}
    sizes = [len(t) for t in enumerate_trees(inst, g, (1, max_size))]
    assert sizes == sorted(sizes)


def test_enumeration_cap():
    inst, _ = cnf(3, (1, 2), (2, 3))
    g = build_dependency_graph(inst)
    with pytest.raises(EnumerationLimitExceeded):
        list(enumerate_trees(inst, g, (1, 6), cap=10))
    with pytest.raises(ValueError):
        list(enumerate_trees(inst, g, (0, 2)))


def test_shrink_range_examples():
    assert shrink_range_bound(2, 1) == (2, 4)
    assert shrink_range_bound(1, 5) == (1, 6)
    with pytest.raises(ValueError):
        shrink_range_bound(0, 1)


@pytest.mark.parametrize("u", [2, 3, 5])
def test_shrink_range_property(u):
    # whenever a log yields a tree of size >= u, some step yields one in range
    hits = 0
    for seed in range(150):
        formula = random_kcnf(10, 8, 2, 3, random.Random(seed))
        inst, _ = cnf_to_instance(formula)
        g = build_dependency_graph(inst)
        result = solve_sequential(inst, SampleStream(inst.variables, seed), max_steps=400)
        sizes = [len(build_witness_tree(result.log, t, g))
                 for t in range(1, len(result.log) + 1)]
        if any(s >= u for s in sizes):
            hits += 1
            lo, hi = shrink_range_bound(u, g.max_degree)
            assert any(lo <= s <= hi for s in sizes)
    assert hits > 0


def test_build_witness_tree_bounds():
    with pytest.raises(IndexError):
        build_witness_tree(ExecutionLog(1, [0]), 2, ISOLATED)


@settings(max_examples=30, deadline=None)
@given(small_cnfs(max_vars=6, max_clauses=5), st.integers(0, 2**32))
def test_witness_trees_respect_graph(formula, seed):
    inst, _ = cnf_to_instance(formula)
    g = build_dependency_graph(inst)
    result = solve_sequential(inst, SampleStream(inst.variables, seed), max_steps=200)
    counts = Counter()
    for t in range(1, len(result.log) + 1):
        tree = build_witness_tree(result.log, t, g)
        assert respects_graph(tree, g)
        counts[tree] += 1
    assert all(c == 1 for c in counts.values())
