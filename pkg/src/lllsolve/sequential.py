"""The sequential resampling solver and its execution log."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

from .errors import InvalidInstanceError
from .model import LOPSIDED, DependencyGraph, ProblemInstance

SelectionPolicy = Callable[[set], int]


def lowest_id(violated: set) -> int:
    return min(violated)


class RandomUniform:
    """Picks uniformly among violated events from its own seeded generator.

    The generator is separate from the sample stream, so the choice of
    event never perturbs the per-variable sample sequences.
    """

    def __init__(self, seed: int = 0):
        self.seed = seed
        self._rng = random.Random(seed)

    def __call__(self, violated: set) -> int:
        return self._rng.choice(sorted(violated))

    def __repr__(self):
        return f"RandomUniform(seed={self.seed})"


def ordered(key: Callable[[int], object]) -> SelectionPolicy:
    """Policy choosing the violated event that minimizes ``key``."""

    def policy(violated: set) -> int:
        return min(violated, key=lambda a: (key(a), a))

    return policy


@dataclass
class ExecutionLog:
    """The sequence of resampled events, optionally split into rounds.

    ``round_bounds`` holds the start offset of every round followed by the
    total length, so round ``j`` (1-based) spans
    ``steps[round_bounds[j-1]:round_bounds[j]]``.
    """

    num_events: int
    steps: list = field(default_factory=list)
    round_bounds: Optional[list] = None
    per_event_counts: list = None

    def __post_init__(self):
        if self.per_event_counts is None:
            self.per_event_counts = [0] * self.num_events
            for a in self.steps:
                self.per_event_counts[a] += 1

    def __len__(self):
        return len(self.steps)

    def record(self, event: int) -> None:
        self.steps.append(event)
        self.per_event_counts[event] += 1

    def start_round(self) -> None:
        if self.round_bounds is None:
            self.round_bounds = []
        self.round_bounds.append(len(self.steps))

    def close_rounds(self) -> None:
        if self.round_bounds is not None and self.round_bounds[-1] != len(self.steps):
            self.round_bounds.append(len(self.steps))

    @property
    def num_rounds(self) -> int:
        return 0 if not self.round_bounds else len(self.round_bounds) - 1

    def round_of(self, t: int) -> int:
        """1-based round containing 1-based step ``t``."""
        for j in range(1, len(self.round_bounds)):
            if self.round_bounds[j - 1] < t <= self.round_bounds[j]:
                return j
        raise IndexError(f"step {t} outside the log")

    def rounds(self) -> list:
        b = self.round_bounds or []
        return [self.steps[b[j]:b[j + 1]] for j in range(len(b) - 1)]

    def to_text(self) -> str:
        if self.round_bounds is None:
            return "".join(f"{a}\n" for a in self.steps)
        lines = []
        for k, chunk in enumerate(self.rounds(), start=1):
            lines.append(f"#round {k}")
            lines.extend(str(a) for a in chunk)
        return "".join(line + "\n" for line in lines)

    @classmethod
    def from_text(cls, text: str, num_events: int) -> "ExecutionLog":
        log = cls(num_events)
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            if line.startswith("#round"):
                log.start_round()
            else:
                log.record(int(line))
        log.close_rounds()
        return log


@dataclass
class SolveResult:
    assignment: tuple
    log: ExecutionLog
    terminated: bool
    steps_used: int
    rounds: list = field(default_factory=list)


def _inclusive_by_support(instance: ProblemInstance) -> list:
    """For each event, the events whose supports meet its support (itself included)."""
    by_variable = [[] for _ in instance.variables]
    for ev in instance.events:
        for v in ev.support:
            by_variable[v].append(ev.id)
    touched = []
    for ev in instance.events:
        ids = {ev.id}
        for v in ev.support:
            ids.update(by_variable[v])
        touched.append(tuple(sorted(ids)))
    return touched


def solve_sequential(instance: ProblemInstance, source, policy: SelectionPolicy = lowest_id,
                     max_steps: int = 0) -> SolveResult:
    """Resample violated events one at a time until none is violated.

    The initial assignment takes sample 0 of every variable from ``source``;
    each resampling draws the next sample of exactly the variables in the
    chosen event's support.  ``max_steps = 0`` means no limit; when the
    limit is hit the result has ``terminated=False`` and the partial log.
    """
    if max_steps < 0:
        raise ValueError("max_steps must be >= 0")
    events = instance.events
    values = [source.draw(v) for v in range(instance.n)]
    violated = {ev.id for ev in events if ev.violated_by(values)}
    touched = _inclusive_by_support(instance)
    log = ExecutionLog(instance.m)
    while violated:
        if max_steps and len(log) >= max_steps:
            return SolveResult(tuple(values), log, False, len(log))
        a = policy(violated)
        if a not in violated:
            raise InvalidInstanceError(f"policy chose event {a}, which is not violated")
        for v in events[a].support:
            values[v] = source.draw(v)
        log.record(a)
        for b in touched[a]:
            if events[b].violated_by(values):
                violated.add(b)
            else:
                violated.discard(b)
    return SolveResult(tuple(values), log, True, len(log))


def solve_lopsided(instance: ProblemInstance, graph: DependencyGraph, source,
                   policy: SelectionPolicy = lowest_id, max_steps: int = 0) -> SolveResult:
    """Same algorithm as :func:`solve_sequential`; the lopsided graph only
    changes which condition justifies the resampling budget."""
    if graph.kind != LOPSIDED:
        raise ValueError("solve_lopsided expects a lopsided dependency graph")
    if len(graph) != instance.m:
        raise InvalidInstanceError("graph does not match the instance")
    return solve_sequential(instance, source, policy, max_steps)


def replay_log(instance: ProblemInstance, steps: Iterable[int], source) -> tuple:
    """Re-execute a log against a fresh source, checking every step.

    Raises ``ValueError`` at the first step whose event was not violated
    under the assignment current at that step.  Returns the final assignment.
    """
    values = [source.draw(v) for v in range(instance.n)]
    for t, a in enumerate(steps, start=1):
        ev = instance.events[a]
        if not ev.violated_by(values):
            raise ValueError(f"step {t}: event {a} was not violated")
        for v in ev.support:
            values[v] = source.draw(v)
    return tuple(values)
