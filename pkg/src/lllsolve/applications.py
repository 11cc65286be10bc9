"""Instance builders for CNF satisfiability and hypergraph 2-colouring,
the elementary-event breakup, random generators and raw-input verifiers."""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import EnumerationLimitExceeded, InvalidInstanceError
from .model import ENUMERATION_LIMIT, EventSpec, ProblemInstance, VariableSpec


@dataclass(frozen=True)
class CnfFormula:
    """Clauses as DIMACS literals: ``+v`` / ``-v`` for variable ``v`` in 1..n."""

    num_vars: int
    clauses: tuple

    def __post_init__(self):
        clauses = tuple(tuple(int(lit) for lit in c) for c in self.clauses)
        object.__setattr__(self, "clauses", clauses)
        if self.num_vars < 0:
            raise InvalidInstanceError("negative variable count")
        for i, clause in enumerate(clauses):
            if not clause:
                raise InvalidInstanceError(f"clause {i} is empty")
            variables = [abs(lit) for lit in clause]
            if any(lit == 0 or abs(lit) > self.num_vars for lit in clause):
                raise InvalidInstanceError(f"clause {i} has a literal out of range")
            if len(set(variables)) != len(variables):
                raise InvalidInstanceError(f"clause {i} mentions a variable twice")

    @property
    def occurrences(self) -> list:
        counts = [0] * (self.num_vars + 1)
        for clause in self.clauses:
            for lit in clause:
                counts[abs(lit)] += 1
        return counts[1:]


@dataclass(frozen=True)
class Hypergraph:
    """Edges as lists of 1-based vertex ids."""

    num_vertices: int
    edges: tuple

    def __post_init__(self):
        edges = tuple(tuple(int(v) for v in e) for e in self.edges)
        object.__setattr__(self, "edges", edges)
        for i, edge in enumerate(edges):
            if len(set(edge)) != len(edge):
                raise InvalidInstanceError(f"edge {i} repeats a vertex")
            if len(edge) < 2:
                raise InvalidInstanceError(f"edge {i} has fewer than 2 vertices")
            if any(not 1 <= v <= self.num_vertices for v in edge):
                raise InvalidInstanceError(f"edge {i} has a vertex out of range")


def _clause_event(event_id: int, clause) -> EventSpec:
    # Value 1 means true; the clause is violated by the single evaluation
    # that falsifies every literal.
    falsifying = {abs(lit) - 1: (0 if lit > 0 else 1) for lit in clause}
    support = tuple(sorted(falsifying))
    bad = tuple(falsifying[v] for v in support)
    width = len(support)

    def predicate(values, bad=bad):
        return values == bad

    def conditional(fixed):
        free = 0
        for v, b in zip(support, bad):
            if v in fixed:
                if fixed[v] != b:
                    return 0.0
            else:
                free += 1
        return 0.5 ** free

    return EventSpec(event_id, support, 0.5 ** width, predicate, conditional,
                     name=" ".join(str(lit) for lit in clause))


def conflict_adjacency(formula: CnfFormula) -> list:
    """Pairs of clauses where one has a literal and the other its complement."""
    by_literal: dict = {}
    for i, clause in enumerate(formula.clauses):
        for lit in clause:
            by_literal.setdefault(lit, []).append(i)
    adjacency = [set() for _ in formula.clauses]
    for lit, holders in by_literal.items():
        for i in holders:
            for j in by_literal.get(-lit, ()):
                adjacency[i].add(j)
    return [sorted(a) for a in adjacency]


def cnf_to_instance(formula: CnfFormula) -> tuple:
    """One fair coin per variable, one event per clause (all literals false).

    Returns ``(instance, lopsided adjacency)`` where the adjacency joins
    clauses in conflict.
    """
    variables = tuple(VariableSpec(i, 2) for i in range(formula.num_vars))
    events = tuple(_clause_event(i, c) for i, c in enumerate(formula.clauses))
    return ProblemInstance(variables, events), conflict_adjacency(formula)


def _edge_event(event_id: int, edge) -> EventSpec:
    support = tuple(sorted(v - 1 for v in edge))
    size = len(support)

    def predicate(values):
        return len(set(values)) == 1

    def conditional(fixed):
        colours = {fixed[v] for v in support if v in fixed}
        free = sum(1 for v in support if v not in fixed)
        if len(colours) > 1:
            return 0.0
        if not colours:
            return 0.5 ** (free - 1)
        return 0.5 ** free

    return EventSpec(event_id, support, 0.5 ** (size - 1), predicate, conditional,
                     name=" ".join(str(v) for v in edge))


def hypergraph_to_instance(hg: Hypergraph) -> ProblemInstance:
    """One fair colour per vertex, one event per edge (monochromatic)."""
    variables = tuple(VariableSpec(i, 2) for i in range(hg.num_vertices))
    events = tuple(_edge_event(i, e) for i, e in enumerate(hg.edges))
    return ProblemInstance(variables, events)


def break_into_elementary(instance: ProblemInstance,
                          limit: int = ENUMERATION_LIMIT) -> ProblemInstance:
    """Replace every event by one event per violating evaluation of its support.

    Avoiding all new events is equivalent to avoiding all old ones.  Each
    new event's bound is its exact probability.
    """
    events = []
    for ev in instance.events:
        if instance.support_evaluations(ev.support) > limit:
            raise EnumerationLimitExceeded(f"event {ev.id}: support too large to break up")
        variables = [instance.variables[v] for v in ev.support]
        for values in itertools.product(*(range(var.domain_size) for var in variables)):
            if ev.predicate(values):
                events.append(_elementary_event(len(events), ev, variables, values))
    return ProblemInstance(instance.variables, tuple(events))


def _elementary_event(event_id: int, parent: EventSpec, variables, target) -> EventSpec:
    support = parent.support
    prob = math.prod(var.probability(a) for var, a in zip(variables, target))

    def predicate(values, target=tuple(target)):
        return values == target

    def conditional(fixed):
        p = 1.0
        for var, a in zip(variables, target):
            if var.id in fixed:
                if fixed[var.id] != a:
                    return 0.0
            else:
                p *= var.probability(a)
        return p

    name = f"{parent.name or parent.id}@" + ",".join(str(a) for a in target)
    return EventSpec(event_id, support, min(1.0, prob), predicate, conditional, name=name)


def random_kcnf(num_vars: int, num_clauses: int, width: int, max_degree: int,
                rng: random.Random, negation_prob: float = 0.5,
                max_occurrence: Optional[int] = None, attempts: int = 200) -> CnfFormula:
    """Random width-``width`` CNF whose clause dependency graph has degree at
    most ``max_degree``.  Clauses that cannot be placed within ``attempts``
    tries are dropped, so the result may have fewer than ``num_clauses``."""
    holders = [[] for _ in range(num_vars + 1)]
    degree: list = []
    clauses: list = []
    for _ in range(num_clauses):
        for _ in range(attempts):
            chosen = rng.sample(range(1, num_vars + 1), width)
            if max_occurrence is not None and any(len(holders[v]) >= max_occurrence
                                                  for v in chosen):
                continue
            nbrs = set()
            for v in chosen:
                nbrs.update(holders[v])
            if len(nbrs) > max_degree or any(degree[c] >= max_degree for c in nbrs):
                continue
            idx = len(clauses)
            for c in nbrs:
                degree[c] += 1
            degree.append(len(nbrs))
            for v in chosen:
                holders[v].append(idx)
            clauses.append(tuple(-v if rng.random() < negation_prob else v
                                 for v in sorted(chosen)))
            break
    return CnfFormula(num_vars, tuple(clauses))


def random_uniform_hypergraph(num_vertices: int, num_edges: int, edge_size: int,
                              max_degree: int, rng: random.Random,
                              attempts: int = 200) -> Hypergraph:
    """Random ``edge_size``-uniform hypergraph in which every edge meets at
    most ``max_degree`` others."""
    cnf = random_kcnf(num_vertices, num_edges, edge_size, max_degree, rng,
                      negation_prob=0.0, attempts=attempts)
    return Hypergraph(num_vertices, cnf.clauses)


def satisfies(formula: CnfFormula, values: Sequence[int]) -> bool:
    """Check a 0/1 assignment (0-based list) against the raw clauses."""
    return all(any((values[abs(lit) - 1] == 1) == (lit > 0) for lit in clause)
               for clause in formula.clauses)


def is_proper_coloring(hg: Hypergraph, colours: Sequence[int]) -> bool:
    return all(len({colours[v - 1] for v in edge}) > 1 for edge in hg.edges)
