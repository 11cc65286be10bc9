"""Local Lemma hypotheses and the resampling budget they imply."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import InvalidInstanceError
from .model import DependencyGraph, ProblemInstance

# Relative slack on the right-hand side so exact equality is not a failure.
RELATIVE_SLACK = 1e-12
# Stand-in for x = 1 when an event has no neighbours.
X_CLAMP = 1.0 - 1e-9


@dataclass(frozen=True)
class XAssignment:
    """Per-event weights strictly inside (0, 1)."""

    values: tuple

    def __post_init__(self):
        values = tuple(float(v) for v in self.values)
        for i, v in enumerate(values):
            if not 0.0 < v < 1.0:
                raise InvalidInstanceError(f"x[{i}] = {v} is outside (0, 1)")
        object.__setattr__(self, "values", values)

    @classmethod
    def uniform(cls, value: float, m: int) -> "XAssignment":
        return cls((value,) * m)

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def __iter__(self):
        return iter(self.values)

    @classmethod
    def from_text(cls, text: str) -> "XAssignment":
        return cls(tuple(float(tok) for tok in text.split()))

    def to_text(self) -> str:
        return "\n".join(repr(v) for v in self.values) + "\n"


@dataclass(frozen=True)
class EventCheck:
    event: int
    probability: float
    bound: float
    passed: bool


@dataclass(frozen=True)
class CriteriaReport:
    rows: tuple
    epsilon: float
    graph_kind: str

    @property
    def passed(self) -> bool:
        return all(row.passed for row in self.rows)

    @property
    def failures(self) -> list:
        return [row for row in self.rows if not row.passed]

    def format(self) -> str:
        lines = [f"x-condition over {self.graph_kind} graph, epsilon={self.epsilon!r}: "
                 + ("PASS" if self.passed else f"FAIL ({len(self.failures)} events)")]
        for row in self.rows:
            mark = "ok  " if row.passed else "FAIL"
            lines.append(f"  {mark} event {row.event}: Pr <= {row.probability:.6g}"
                         f"  bound {row.bound:.6g}")
        return "\n".join(lines)


def condition_rhs(graph: DependencyGraph, x: XAssignment, event: int,
                  epsilon: float = 0.0) -> float:
    return (1.0 - epsilon) * x[event] * math.prod(1.0 - x[b] for b in graph.neighbors(event))


def check_x_condition(instance: ProblemInstance, graph: DependencyGraph, x: XAssignment,
                      epsilon: float = 0.0) -> CriteriaReport:
    """Evaluate ``Pr[A] <= (1 - eps) x(A) prod_{B ~ A} (1 - x(B))`` per event.

    The neighbourhood comes from ``graph``, so a lopsided graph checks the
    lopsided form of the condition.
    """
    if len(x) != instance.m or len(graph) != instance.m:
        raise InvalidInstanceError("x and graph must cover every event")
    if epsilon < 0:
        raise ValueError("epsilon must be non-negative")
    rows = []
    for ev in instance.events:
        rhs = condition_rhs(graph, x, ev.id, epsilon)
        ok = ev.prob_bound <= rhs * (1.0 + RELATIVE_SLACK)
        rows.append(EventCheck(ev.id, ev.prob_bound, rhs, ok))
    return CriteriaReport(tuple(rows), epsilon, graph.kind)


def symmetric_x(instance: ProblemInstance, graph: DependencyGraph) -> tuple:
    """``x(A) = 1/(d+1)`` for the maximum degree d.

    Returns ``(x, clamped)``; with d = 0 the value 1 is out of range and is
    replaced by :data:`X_CLAMP`, setting ``clamped``.
    """
    d = graph.max_degree
    value = 1.0 / (d + 1)
    clamped = value >= 1.0
    if clamped:
        value = X_CLAMP
    return XAssignment.uniform(value, instance.m), clamped


def resample_budget(x: Iterable[float]) -> float:
    return math.fsum(v / (1.0 - v) for v in x)


def rescale_for_derandomization(x: XAssignment, epsilon: float) -> tuple:
    """Shrink every weight by ``1 - eps/2`` and halve epsilon.

    The condition with ``eps`` implies the condition with ``eps/2`` for the
    shrunk weights, which are now at most ``1 - eps/2``.
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    factor = 1.0 - epsilon / 2.0
    return XAssignment(tuple(factor * v for v in x)), epsilon / 2.0


def default_max_steps(x: Sequence[float]) -> int:
    return math.ceil(64 * resample_budget(x) + 1024)
