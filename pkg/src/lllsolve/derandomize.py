"""Deterministic solver: fix a sample table by conditional expectations so
that no large witness tree is consistent with it, then run the sequential
solver on the table."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

from .criteria import XAssignment, check_x_condition, rescale_for_derandomization, resample_budget
from .errors import (ConditionFailed, DerandomizationError, MissingConditionalError,
                     TableExhausted)
from .model import STANDARD, DependencyGraph, ProblemInstance
from .sampling import SampleTable
from .sequential import SolveResult, lowest_id, solve_sequential
from .witness import WitnessTree, enumerate_trees, read_plan, shrink_range_bound

logger = logging.getLogger(__name__)

TREE_CAP = 10**7
# Float noise allowed on the monotonicity and half-bound assertions.
_TOL = 1e-9


def _require_conditionals(instance: ProblemInstance) -> None:
    for ev in instance.events:
        if ev.conditional_prob is None:
            raise MissingConditionalError(f"event {ev.id} has no conditional_prob")


def tree_consistency_probability(tree: WitnessTree, fixed: dict,
                                 instance: ProblemInstance) -> float:
    """Probability that ``tree`` passes its replay check when the cells in
    ``fixed`` (``(variable, index) -> value``) are known and every other
    cell is an independent sample."""
    _require_conditionals(instance)
    p = 1.0
    for v, cells in read_plan(tree, instance):
        known = {var: fixed[(var, j)] for var, j in cells if (var, j) in fixed}
        p *= instance.events[tree.labels[v]].conditional_prob(known)
        if p == 0.0:
            return 0.0
    return p


class ConsistencyOracle:
    """Running sum of tree consistency probabilities over a tree list.

    Each tree's probability is kept as a product of per-vertex factors; a
    cell maps to the ``(tree, vertex)`` pairs reading it, so fixing a cell
    only recomputes the factors that depend on it.
    """

    def __init__(self, trees, instance: ProblemInstance):
        _require_conditionals(instance)
        self.instance = instance
        self.trees = list(trees)
        self.fixed: dict = {}
        self._vertices = []  # per tree: [(event id, cells)]
        self._factors = []
        self.readers: dict = {}
        for t, tree in enumerate(self.trees):
            plan = [(tree.labels[v], cells) for v, cells in read_plan(tree, instance)]
            self._vertices.append(plan)
            for k, (_, cells) in enumerate(plan):
                for cell in cells:
                    self.readers.setdefault(cell, []).append((t, k))
            self._factors.append([self._factor(ev, cells) for ev, cells in plan])
        self._probs = [math.prod(f) for f in self._factors]
        self.total = math.fsum(self._probs)

    @property
    def max_index(self) -> int:
        return max((j for _, j in self.readers), default=-1)

    def _factor(self, event: int, cells, extra=None) -> float:
        known = {}
        for var, j in cells:
            if (var, j) in self.fixed:
                known[var] = self.fixed[(var, j)]
            elif extra is not None and extra[0] == (var, j):
                known[var] = extra[1]
        return self.instance.events[event].conditional_prob(known)

    def probability(self, t: int) -> float:
        return self._probs[t]

    def _changes(self, cell, value) -> dict:
        """New per-tree probabilities if ``cell`` were fixed to ``value``."""
        changed = {}
        for t, k in self.readers.get(cell, ()):
            factors = changed.get(t)
            if factors is None:
                factors = changed[t] = list(self._factors[t])
            ev, cells = self._vertices[t][k]
            factors[k] = self._factor(ev, cells, (cell, value))
        return changed

    def total_if(self, cell, value) -> float:
        changes = self._changes(cell, value)
        delta = math.fsum(math.prod(f) - self._probs[t] for t, f in changes.items())
        return self.total + delta

    def fix(self, cell, value) -> None:
        changes = self._changes(cell, value)
        self.fixed[cell] = value
        for t, factors in changes.items():
            self._factors[t] = factors
            self._probs[t] = math.prod(factors)
        self.total = math.fsum(self._probs)


@dataclass
class DerandomizedResult(SolveResult):
    table: SampleTable = None
    tree_count: int = 0
    size_range: tuple = (0, 0)
    threshold: int = 0
    epsilon: float = 0.0
    expectation_trace: list = field(default_factory=list)
    consistent_after: int = 0


def size_threshold(x: XAssignment, epsilon: float) -> int:
    """Smallest ``u >= 1`` with ``(1 - eps)^u * sum x/(1-x) <= 1/2``."""
    budget = resample_budget(x)
    if budget <= 0.5:
        return 1
    return max(1, math.ceil(math.log(2.0 * budget) / -math.log1p(-epsilon) - 1e-12))


def derandomized_solve(instance: ProblemInstance, graph: DependencyGraph, x: XAssignment,
                       epsilon: float, tree_cap: int = TREE_CAP) -> DerandomizedResult:
    """Find a satisfying assignment without randomness.

    Steps: shrink the weights and halve epsilon; pick the size threshold u;
    list every proper witness tree with size in ``[u, (k+1)u]``; fix the
    sample table cell by cell (variable-major), each time taking the value
    that minimizes the expected number of consistent listed trees (lowest
    value on ties); finally run the sequential solver with the table as its
    random source.
    """
    if graph.kind != STANDARD:
        raise ValueError("the derandomized solver uses the standard dependency graph")
    _require_conditionals(instance)
    report = check_x_condition(instance, graph, x, epsilon)
    if epsilon <= 0 or not report.passed:
        raise ConditionFailed(report.format())

    if instance.m == 0:
        table = SampleTable([[0] for _ in instance.variables], instance.variables)
        result = solve_sequential(instance, table, lowest_id)
        return DerandomizedResult(result.assignment, result.log, True, 0, table=table,
                                  epsilon=epsilon)

    x_small, eps_small = rescale_for_derandomization(x, epsilon)
    u = size_threshold(x_small, eps_small)
    size_range = shrink_range_bound(u, graph.max_degree)
    trees = list(enumerate_trees(instance, graph, size_range, cap=tree_cap))
    oracle = ConsistencyOracle(trees, instance)
    logger.info("u=%d range=%s trees=%d initial expectation=%.6g",
                u, size_range, len(trees), oracle.total)
    if oracle.total > 0.5 + _TOL:
        raise DerandomizationError(f"initial expectation {oracle.total} exceeds 1/2")

    depth = max(u, oracle.max_index)
    trace = [oracle.total]
    rows = []
    for var in instance.variables:
        row = []
        for j in range(depth + 1):
            cell = (var.id, j)
            best_value, best_total = 0, None
            for value in range(var.domain_size):
                total = oracle.total_if(cell, value) if cell in oracle.readers else oracle.total
                if best_total is None or total < best_total:
                    best_value, best_total = value, total
            if cell in oracle.readers:
                oracle.fix(cell, best_value)
            if oracle.total > trace[-1] + _TOL or oracle.total > 0.5 + _TOL:
                raise DerandomizationError(
                    f"expectation rose to {oracle.total} at cell {cell}")
            trace.append(oracle.total)
            row.append(best_value)
        rows.append(row)
    table = SampleTable(rows, instance.variables)

    consistent = sum(1 for t in range(len(trees)) if oracle.probability(t) != 0.0)
    if consistent:
        raise DerandomizationError(f"{consistent} listed trees remain consistent")

    try:
        result = solve_sequential(instance, table.fresh(), lowest_id)
    except TableExhausted as exc:
        raise DerandomizationError(f"the run read past the table: {exc}") from exc
    if not result.terminated:
        raise DerandomizationError("sequential run on the table did not terminate")
    return DerandomizedResult(
        result.assignment, result.log, True, result.steps_used,
        table=table, tree_count=len(trees), size_range=size_range, threshold=u,
        epsilon=eps_small, expectation_trace=trace, consistent_after=consistent)
