"""Addressable per-variable sample sequences.

Every variable ``P`` owns an infinite sequence ``P(0), P(1), ...`` of
independent samples.  A :class:`SampleStream` derives ``P(j)`` from
``(seed, P, j)`` with a counter-based generator, so the value at a given
index never depends on how draws of different variables were interleaved.
A :class:`SampleTable` holds the sequences explicitly, truncated at a depth.
"""

from __future__ import annotations

import bisect
import copy
import itertools
from typing import Sequence

from .errors import InvalidInstanceError, TableExhausted

_MASK = (1 << 64) - 1


def _splitmix(z: int) -> int:
    z = (z + 0x9E3779B97F4A7C15) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def uniform(seed: int, variable: int, index: int) -> float:
    """Deterministic uniform in [0, 1) keyed by (seed, variable, index)."""
    h = _splitmix(_splitmix(_splitmix(seed & _MASK) ^ variable) ^ index)
    return (h >> 11) * (1.0 / (1 << 53))


class _Sampler:
    """Maps uniforms to value indices by inverse CDF."""

    def __init__(self, variables):
        self.sizes = [var.domain_size for var in variables]
        self.cdfs = []
        self.last = []
        for var in variables:
            if var.weights is None:
                self.cdfs.append(None)
                self.last.append(var.domain_size - 1)
            else:
                self.cdfs.append(list(itertools.accumulate(var.weights)))
                self.last.append(max(i for i, w in enumerate(var.weights) if w > 0))

    def value(self, variable: int, u: float) -> int:
        cdf = self.cdfs[variable]
        if cdf is None:
            return int(u * self.sizes[variable])
        # Rounding in the cumulative sum must not select a zero-weight tail.
        return min(bisect.bisect_right(cdf, u), self.last[variable])


class SampleStream:
    """Counter-based random source over a fixed list of variables."""

    def __init__(self, variables: Sequence, seed: int):
        self.seed = int(seed)
        self._sampler = _Sampler(variables)
        self.counters = [0] * len(variables)

    def peek(self, variable: int, index: int) -> int:
        return self._sampler.value(variable, uniform(self.seed, variable, index))

    def draw(self, variable: int) -> int:
        j = self.counters[variable]
        self.counters[variable] = j + 1
        return self._sampler.value(variable, uniform(self.seed, variable, j))

    def fresh(self) -> "SampleStream":
        """Same seed, counters rewound to zero."""
        clone = copy.copy(self)
        clone.counters = [0] * len(self.counters)
        return clone


class SampleTable:
    """Explicit sample values ``values[i][j]`` for ``0 <= j <= depth``."""

    def __init__(self, values: Sequence[Sequence[int]], variables: Sequence = None):
        self.values = [list(row) for row in values]
        widths = {len(row) for row in self.values}
        if len(widths) > 1:
            raise InvalidInstanceError("all table rows must have the same length")
        self.depth = (widths.pop() - 1) if widths else -1
        if variables is not None:
            if len(variables) != len(self.values):
                raise InvalidInstanceError("one table row per variable is required")
            for var, row in zip(variables, self.values):
                if any(not 0 <= a < var.domain_size for a in row):
                    raise InvalidInstanceError(f"table row {var.id} leaves the domain")
        self.counters = [0] * len(self.values)

    def peek(self, variable: int, index: int) -> int:
        if not 0 <= index <= self.depth:
            raise TableExhausted(f"variable {variable}: index {index} beyond depth {self.depth}")
        return self.values[variable][index]

    def draw(self, variable: int) -> int:
        j = self.counters[variable]
        value = self.peek(variable, j)
        self.counters[variable] = j + 1
        return value

    def fresh(self) -> "SampleTable":
        return SampleTable(self.values)

    def to_text(self) -> str:
        return "".join(" ".join(str(a) for a in row) + "\n" for row in self.values)

    @classmethod
    def from_text(cls, text: str, variables: Sequence = None) -> "SampleTable":
        rows = [[int(tok) for tok in line.split()] for line in text.splitlines() if line.strip()]
        return cls(rows, variables)


def draw(source, variable: int) -> int:
    return source.draw(variable)


def peek_at(source, variable: int, index: int) -> int:
    return source.peek(variable, index)
