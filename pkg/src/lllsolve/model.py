"""Variables, events, problem instances and their dependency graphs.

Variables have finite domains and are encoded as value indices
``0 .. domain_size - 1``.  An assignment is a plain tuple of such indices,
one per variable.  Events carry their support (the variables they depend
on) and a predicate evaluated on the restriction of an assignment to that
support, in support order.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Optional, Sequence

from .errors import EnumerationLimitExceeded, InvalidInstanceError, SuppliedEdgeError

# Largest number of joint evaluations a brute-force routine may visit.
ENUMERATION_LIMIT = 2**20

Assignment = tuple  # tuple[int, ...]
Predicate = Callable[[tuple], bool]
ConditionalProb = Callable[[Mapping[int, int]], float]


@dataclass(frozen=True)
class VariableSpec:
    id: int
    domain_size: int
    weights: Optional[tuple] = None

    def __post_init__(self):
        if self.domain_size < 1:
            raise InvalidInstanceError(f"variable {self.id}: domain_size must be >= 1")
        if self.weights is not None:
            w = tuple(float(v) for v in self.weights)
            if len(w) != self.domain_size:
                raise InvalidInstanceError(
                    f"variable {self.id}: {len(w)} weights for domain of size {self.domain_size}")
            if any(v < 0 for v in w) or abs(math.fsum(w) - 1.0) > 1e-9:
                raise InvalidInstanceError(
                    f"variable {self.id}: weights must be non-negative and sum to 1")
            object.__setattr__(self, "weights", w)

    def probability(self, value: int) -> float:
        if self.weights is None:
            return 1.0 / self.domain_size
        return self.weights[value]


@dataclass(frozen=True, eq=False)
class EventSpec:
    """A bad event.

    ``predicate`` receives the values of ``support`` (in sorted order) and
    returns True when the event happens.  ``conditional_prob`` receives a
    mapping ``variable id -> value`` of fixed variables (any subset, extra
    keys ignored) and returns the exact probability of the event given them.
    """

    id: int
    support: tuple
    prob_bound: float
    predicate: Predicate
    conditional_prob: Optional[ConditionalProb] = None
    name: str = ""

    def __post_init__(self):
        support = tuple(sorted(set(int(v) for v in self.support)))
        if len(support) != len(self.support):
            raise InvalidInstanceError(f"event {self.id}: repeated variable in support")
        object.__setattr__(self, "support", support)
        if not 0.0 <= self.prob_bound <= 1.0:
            raise InvalidInstanceError(f"event {self.id}: prob_bound outside [0, 1]")

    def violated_by(self, assignment: Sequence[int]) -> bool:
        return bool(self.predicate(tuple(assignment[v] for v in self.support)))


@dataclass(frozen=True, eq=False)
class ProblemInstance:
    variables: tuple
    events: tuple

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "events", tuple(self.events))
        n = len(self.variables)
        for i, var in enumerate(self.variables):
            if var.id != i:
                raise InvalidInstanceError(f"variable at position {i} has id {var.id}")
        for j, ev in enumerate(self.events):
            if ev.id != j:
                raise InvalidInstanceError(f"event at position {j} has id {ev.id}")
            for v in ev.support:
                if not 0 <= v < n:
                    raise InvalidInstanceError(f"event {j}: unknown variable {v}")
            if not ev.support and ev.predicate(()):
                raise InvalidInstanceError(f"event {j}: empty support and always violated")

    @property
    def n(self) -> int:
        return len(self.variables)

    @property
    def m(self) -> int:
        return len(self.events)

    @property
    def problem_size(self) -> int:
        return self.m + self.n + sum(v.domain_size for v in self.variables)

    def check_assignment(self, assignment: Sequence[int]) -> Assignment:
        values = tuple(int(a) for a in assignment)
        if len(values) != self.n:
            raise InvalidInstanceError(f"assignment has {len(values)} values, expected {self.n}")
        for var, a in zip(self.variables, values):
            if not 0 <= a < var.domain_size:
                raise InvalidInstanceError(f"value {a} outside domain of variable {var.id}")
        return values

    def support_evaluations(self, variable_ids: Sequence[int]) -> int:
        return math.prod(self.variables[v].domain_size for v in variable_ids)


def violated_events(instance: ProblemInstance, assignment: Sequence[int]) -> set:
    return {ev.id for ev in instance.events if ev.violated_by(assignment)}


def exact_probability(instance: ProblemInstance, event_id: int,
                      limit: int = ENUMERATION_LIMIT) -> float:
    """Brute-force Pr[event] under the product distribution."""
    ev = instance.events[event_id]
    if instance.support_evaluations(ev.support) > limit:
        raise EnumerationLimitExceeded(f"event {event_id}: support too large to enumerate")
    variables = [instance.variables[v] for v in ev.support]
    total = 0.0
    for values in itertools.product(*(range(var.domain_size) for var in variables)):
        if ev.predicate(values):
            total += math.prod(var.probability(a) for var, a in zip(variables, values))
    return total


def enumerated_conditional(instance: ProblemInstance, event_id: int) -> ConditionalProb:
    """Build a conditional-probability capability by enumerating the support.

    Only practical for small supports; applications supply analytic versions.
    """
    ev = instance.events[event_id]
    variables = [instance.variables[v] for v in ev.support]
    if instance.support_evaluations(ev.support) > ENUMERATION_LIMIT:
        raise EnumerationLimitExceeded(f"event {event_id}: support too large to enumerate")

    def conditional(fixed: Mapping[int, int]) -> float:
        ranges = [(fixed[var.id],) if var.id in fixed else range(var.domain_size)
                  for var in variables]
        total = 0.0
        for values in itertools.product(*ranges):
            if ev.predicate(values):
                total += math.prod(var.probability(a) for var, a in zip(variables, values)
                                   if var.id not in fixed)
        return total

    return conditional


STANDARD = "standard"
LOPSIDED = "lopsided"


@dataclass(frozen=True, eq=False)
class DependencyGraph:
    adjacency: tuple
    kind: str = STANDARD
    _sets: tuple = field(init=False, repr=False)
    _inclusive: tuple = field(init=False, repr=False)

    def __post_init__(self):
        adjacency = tuple(tuple(sorted(set(nbrs))) for nbrs in self.adjacency)
        object.__setattr__(self, "adjacency", adjacency)
        object.__setattr__(self, "_sets", tuple(frozenset(nbrs) for nbrs in adjacency))
        object.__setattr__(self, "_inclusive", tuple(
            tuple(sorted(nbrs + (a,))) for a, nbrs in enumerate(adjacency)))
        for a, nbrs in enumerate(adjacency):
            for b in nbrs:
                if b == a:
                    raise InvalidInstanceError(f"self-loop at event {a}")
                if a not in self._sets[b]:
                    raise InvalidInstanceError(f"edge {a}-{b} is not symmetric")

    def __len__(self) -> int:
        return len(self.adjacency)

    @property
    def max_degree(self) -> int:
        return max((len(nbrs) for nbrs in self.adjacency), default=0)

    def neighbors(self, a: int) -> tuple:
        return self.adjacency[a]

    def inclusive(self, a: int) -> tuple:
        """Inclusive neighbourhood, sorted: the neighbours plus ``a`` itself."""
        return self._inclusive[a]

    def adjacent(self, a: int, b: int) -> bool:
        return b in self._sets[a]

    def edges(self) -> set:
        return {(a, b) for a, nbrs in enumerate(self.adjacency) for b in nbrs if a < b}

    def is_independent(self, events: Iterable[int]) -> bool:
        events = list(events)
        return all(not self.adjacent(a, b) for a, b in itertools.combinations(events, 2))


def build_dependency_graph(instance: ProblemInstance) -> DependencyGraph:
    by_variable: dict = {}
    for ev in instance.events:
        for v in ev.support:
            by_variable.setdefault(v, []).append(ev.id)
    adjacency = [set() for _ in instance.events]
    for ids in by_variable.values():
        for a in ids:
            adjacency[a].update(ids)
    for a, nbrs in enumerate(adjacency):
        nbrs.discard(a)
    return DependencyGraph(tuple(adjacency), STANDARD)


def detect_lopsidependent(instance: ProblemInstance, a: int, b: int,
                          limit: int = ENUMERATION_LIMIT) -> bool:
    """Decide lopsidependence of two events by exhaustive search.

    True iff two evaluations f, g differing only on the shared variables
    exist with f violating ``a``, g violating ``b``, and f not violating
    ``b`` or g not violating ``a``.
    """
    if a == b:
        raise ValueError("an event is not compared with itself")
    ea, eb = instance.events[a], instance.events[b]
    shared = sorted(set(ea.support) & set(eb.support))
    if not shared:
        return False
    union = sorted(set(ea.support) | set(eb.support))
    if instance.support_evaluations(union) > limit:
        raise EnumerationLimitExceeded(
            f"events {a}, {b}: {instance.support_evaluations(union)} joint evaluations")
    rest = [v for v in union if v not in shared]
    rest_ranges = [range(instance.variables[v].domain_size) for v in rest]
    shared_ranges = [range(instance.variables[v].domain_size) for v in shared]

    def evaluate(ev, values):
        return ev.predicate(tuple(values[v] for v in ev.support))

    shared_evals = list(itertools.product(*shared_ranges))
    for rest_values in itertools.product(*rest_ranges):
        base = dict(zip(rest, rest_values))
        # Outcomes of both events for every choice of the shared values.
        outcomes = []
        for sv in shared_evals:
            values = dict(base)
            values.update(zip(shared, sv))
            outcomes.append((evaluate(ea, values), evaluate(eb, values)))
        for fa, fb in outcomes:
            if not fa:
                continue
            for ga, gb in outcomes:
                if gb and (not fb or not ga):
                    return True
    return False


def build_lopsidependency_graph(instance: ProblemInstance,
                                supplied: Optional[Sequence[Iterable[int]]] = None
                                ) -> DependencyGraph:
    """Lopsided dependency graph, either supplied by the caller or detected.

    Supplied adjacency is checked to join only events with intersecting
    supports.  Without it every intersecting pair goes through
    :func:`detect_lopsidependent`.
    """
    standard = build_dependency_graph(instance)
    if supplied is not None:
        if len(supplied) != instance.m:
            raise InvalidInstanceError("supplied adjacency must have one entry per event")
        adjacency = [set() for _ in instance.events]
        for a, nbrs in enumerate(supplied):
            for b in nbrs:
                if not standard.adjacent(a, b):
                    raise SuppliedEdgeError(f"supplied edge {a}-{b} joins disjoint supports")
                adjacency[a].add(b)
                adjacency[b].add(a)
        return DependencyGraph(tuple(adjacency), LOPSIDED)
    adjacency = [set() for _ in instance.events]
    for a, b in sorted(standard.edges()):
        if detect_lopsidependent(instance, a, b):
            adjacency[a].add(b)
            adjacency[b].add(a)
    return DependencyGraph(tuple(adjacency), LOPSIDED)
