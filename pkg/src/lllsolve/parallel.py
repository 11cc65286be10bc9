"""Round-based solver: every round resamples an independent set of
violated events at once."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Optional

from .errors import InvalidInstanceError
from .model import STANDARD, DependencyGraph, ProblemInstance
from .sequential import ExecutionLog, SolveResult


@dataclass(frozen=True)
class RoundRecord:
    index: int
    selected: tuple
    resampled: tuple


def greedy_mis(violated, graph: DependencyGraph) -> set:
    """Inclusion-maximal independent subset of ``violated``, lowest id first."""
    chosen = set()
    blocked = set()
    for a in sorted(violated):
        if a in blocked:
            continue
        chosen.add(a)
        blocked.update(graph.neighbors(a))
    return chosen


def luby_step_mis(violated, graph: DependencyGraph, rng: random.Random) -> set:
    """A single Luby round: each violated event draws a priority and survives
    when its ``(priority, id)`` is below that of every violated neighbour.

    The result is independent and non-empty for non-empty input, but not
    necessarily maximal.
    """
    order = sorted(violated)
    priority = {a: (rng.random(), a) for a in order}
    return {a for a in order
            if all(priority[a] < priority[b] for b in graph.neighbors(a) if b in priority)}


class LubyStep:
    """Callable wrapper binding :func:`luby_step_mis` to a seeded generator."""

    def __init__(self, seed: int = 0):
        self.seed = seed
        self._rng = random.Random(seed)

    def __call__(self, violated, graph):
        return luby_step_mis(violated, graph, self._rng)


MisPolicy = Callable[[set, DependencyGraph], set]


def solve_parallel(instance: ProblemInstance, graph: DependencyGraph, source,
                   mis_policy: Optional[MisPolicy] = None, max_rounds: int = 0) -> SolveResult:
    """Resample an independent set of violated events per round.

    The log is the flattened sequential execution: each round's events in
    ascending id, with ``round_bounds`` marking the segments.  Supports of
    one round are disjoint, so the per-variable draws do not depend on the
    order they are made in.  ``max_rounds = 0`` means no limit.
    """
    if graph.kind != STANDARD:
        raise ValueError("the parallel solver needs the standard dependency graph")
    if len(graph) != instance.m:
        raise InvalidInstanceError("graph does not match the instance")
    mis_policy = mis_policy or greedy_mis
    events = instance.events
    values = [source.draw(v) for v in range(instance.n)]
    violated = {ev.id for ev in events if ev.violated_by(values)}
    log = ExecutionLog(instance.m, round_bounds=[0])
    records = []
    while violated:
        if max_rounds and len(records) >= max_rounds:
            return SolveResult(tuple(values), log, False, len(log), records)
        selected = sorted(mis_policy(violated, graph))
        if not selected or not set(selected) <= violated:
            raise InvalidInstanceError("independent-set policy returned an invalid selection")
        resampled = []
        for a in selected:
            for v in events[a].support:
                values[v] = source.draw(v)
                resampled.append(v)
            log.record(a)
        log.round_bounds.append(len(log))
        records.append(RoundRecord(len(records) + 1, tuple(selected), tuple(sorted(resampled))))
        touched = set(selected)
        for a in selected:
            touched.update(graph.neighbors(a))
        for b in touched:
            if events[b].violated_by(values):
                violated.add(b)
            else:
                violated.discard(b)
    return SolveResult(tuple(values), log, True, len(log), records)
