"""Witness trees: construction from logs, replay checks, random generation
and exhaustive enumeration.

Vertices are numbered ``0 .. size-1`` with the root at 0.  Trees built
from a log number vertices in the order they were attached; generated and
enumerated trees use breadth-first order.  Equality and hashing go through
the canonical text form, e.g. ``0(1(0),2)``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

from .errors import EnumerationLimitExceeded, ImproperTreeError
from .model import DependencyGraph, ProblemInstance

GW_DEPTH_LIMIT = 64
GW_MAX_VERTICES = 100_000


@dataclass(frozen=True, eq=False)
class WitnessTree:
    labels: tuple
    parents: tuple
    depths: tuple
    attach_order: Optional[tuple] = None

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def root_label(self) -> int:
        return self.labels[0]

    @property
    def depth(self) -> int:
        return max(self.depths)

    def children(self, v: int) -> list:
        return [w for w, p in enumerate(self.parents) if p == v]

    def child_lists(self) -> list:
        kids = [[] for _ in self.labels]
        for w, p in enumerate(self.parents):
            if p >= 0:
                kids[p].append(w)
        return kids

    def levels(self) -> list:
        out = [[] for _ in range(self.depth + 1)]
        for v, d in enumerate(self.depths):
            out[d].append(v)
        return out

    def check_order(self) -> list:
        """Vertices by decreasing depth, ties by vertex number."""
        return sorted(range(len(self)), key=lambda v: (-self.depths[v], v))

    def canonical(self) -> str:
        kids = self.child_lists()

        def render(v):
            parts = sorted((self.labels[w], render(w)) for w in kids[v])
            inner = ",".join(text for _, text in parts)
            return f"{self.labels[v]}({inner})" if inner else str(self.labels[v])

        return render(0)

    def __str__(self):
        return self.canonical()

    def __eq__(self, other):
        if not isinstance(other, WitnessTree):
            return NotImplemented
        return self.canonical() == other.canonical()

    def __hash__(self):
        return hash(self.canonical())

    @classmethod
    def from_nested(cls, nested) -> "WitnessTree":
        """Build from ``(label, (child, child, ...))`` nested tuples."""
        labels, parents, depths = [], [], []
        queue = [(nested, -1, 0)]
        for node, parent, depth in queue:
            v = len(labels)
            labels.append(node[0])
            parents.append(parent)
            depths.append(depth)
            queue.extend((child, v, depth + 1) for child in node[1])
        return cls(tuple(labels), tuple(parents), tuple(depths))

    @classmethod
    def parse(cls, text: str) -> "WitnessTree":
        pos = 0

        def node():
            nonlocal pos
            start = pos
            while pos < len(text) and text[pos].isdigit():
                pos += 1
            if start == pos:
                raise ValueError(f"expected an event id at offset {pos} of {text!r}")
            label = int(text[start:pos])
            kids = []
            if pos < len(text) and text[pos] == "(":
                pos += 1
                kids.append(node())
                while pos < len(text) and text[pos] == ",":
                    pos += 1
                    kids.append(node())
                if pos >= len(text) or text[pos] != ")":
                    raise ValueError(f"expected ')' at offset {pos} of {text!r}")
                pos += 1
            return (label, tuple(kids))

        text = text.strip()
        tree = node()
        if pos != len(text):
            raise ValueError(f"trailing characters in {text!r}")
        return cls.from_nested(tree)


def build_witness_tree(log, t: int, graph: DependencyGraph) -> WitnessTree:
    """Witness tree for the 1-based step ``t`` of a log.

    Scanning the log backwards from ``t - 1``, each step whose event lies in
    the inclusive neighbourhood of some vertex label is attached below the
    deepest such vertex (earliest attached on ties).  The graph kind decides
    whether this is the standard or the lopsided witness tree.
    """
    steps = getattr(log, "steps", log)
    if not 1 <= t <= len(steps):
        raise IndexError(f"step {t} outside a log of length {len(steps)}")
    labels, parents, depths, attach = [steps[t - 1]], [-1], [0], [t]
    # host[b]: (depth, vertex) of the deepest vertex able to adopt label b
    host = {}

    def register(v):
        d = depths[v]
        for b in graph.inclusive(labels[v]):
            cur = host.get(b)
            if cur is None or d > cur[0]:
                host[b] = (d, v)

    register(0)
    for i in range(t - 1, 0, -1):
        c = steps[i - 1]
        h = host.get(c)
        if h is None:
            continue
        labels.append(c)
        parents.append(h[1])
        depths.append(h[0] + 1)
        attach.append(i)
        register(len(labels) - 1)
    return WitnessTree(tuple(labels), tuple(parents), tuple(depths), tuple(attach))


def is_proper(tree: WitnessTree) -> bool:
    for kids in tree.child_lists():
        labels = [tree.labels[w] for w in kids]
        if len(labels) != len(set(labels)):
            return False
    return True


def respects_graph(tree: WitnessTree, graph: DependencyGraph) -> bool:
    """Every child label lies in the inclusive neighbourhood of its parent's label."""
    return all(p < 0 or graph.adjacent(tree.labels[p], lab) or tree.labels[p] == lab
               for lab, p in zip(tree.labels, tree.parents))


def read_plan(tree: WitnessTree, instance: ProblemInstance) -> list:
    """Sample cells read by the replay check, vertex by vertex.

    Returns ``[(vertex, ((variable, index), ...)), ...]`` in check order.  A
    per-variable counter advances each time a vertex's support uses the
    variable.  For trees occurring in a log the index of ``P`` at vertex
    ``v`` equals the number of deeper vertices whose support contains ``P``.
    """
    counters = {}
    plan = []
    for v in tree.check_order():
        cells = []
        for p in instance.events[tree.labels[v]].support:
            j = counters.get(p, 0)
            counters[p] = j + 1
            cells.append((p, j))
        plan.append((v, tuple(cells)))
    return plan


def tree_check(tree: WitnessTree, source, instance: ProblemInstance) -> bool:
    """Replay the tree against a sample source: deepest vertices first, each
    vertex reading fresh samples of its support; passes iff every label is
    violated when checked."""
    for v, cells in read_plan(tree, instance):
        values = tuple(source.peek(p, j) for p, j in cells)
        if not instance.events[tree.labels[v]].predicate(values):
            return False
    return True


def gw_sample(root: int, x, graph: DependencyGraph, depth_limit: int = GW_DEPTH_LIMIT,
              rng: Optional[random.Random] = None,
              max_vertices: int = GW_MAX_VERTICES) -> Optional[WitnessTree]:
    """One draw of the multitype branching process rooted at ``root``.

    Level by level, every vertex labelled A independently gets a child
    labelled B with probability ``x[B]`` for each B in the inclusive
    neighbourhood of A.  Returns ``None`` when a birth would exceed
    ``depth_limit`` or ``max_vertices``.
    """
    rng = rng or random.Random()
    rand = rng.random
    labels, parents, depths = [root], [-1], [0]
    level = [0]
    while level:
        nxt = []
        for v in level:
            d = depths[v] + 1
            for b in graph.inclusive(labels[v]):
                if rand() < x[b]:
                    if d > depth_limit or len(labels) >= max_vertices:
                        return None
                    nxt.append(len(labels))
                    labels.append(b)
                    parents.append(v)
                    depths.append(d)
        level = nxt
    return WitnessTree(tuple(labels), tuple(parents), tuple(depths))


def gw_tree_probability(tree: WitnessTree, x, graph: DependencyGraph) -> float:
    """Probability that the branching process yields exactly ``tree``:
    ``(1 - x(A))/x(A) * prod_v x'([v])`` with
    ``x'(B) = x(B) * prod_{C ~ B} (1 - x(C))``."""
    if not is_proper(tree):
        raise ImproperTreeError(f"tree {tree} has repeated sibling labels")
    if not respects_graph(tree, graph):
        raise ValueError(f"tree {tree} has a child outside its parent's neighbourhood")
    a = tree.root_label
    p = (1.0 - x[a]) / x[a]
    for lab in tree.labels:
        p *= x[lab]
        for c in graph.neighbors(lab):
            p *= 1.0 - x[c]
    return p


def shrink_range_bound(u: int, k: int) -> tuple:
    if u < 1 or k < 0:
        raise ValueError("need u >= 1 and k >= 0")
    return (u, (k + 1) * u)


def count_trees(graph: DependencyGraph, size_range: Sequence[int]) -> int:
    """Number of proper witness trees (any root) with size in the range."""
    lo, hi = size_range
    m = len(graph)
    # counts[a][s]: proper trees rooted at a with exactly s vertices
    counts = [[0] * (hi + 1) for _ in range(m)]
    for s in range(1, hi + 1):
        for a in range(m):
            # coefficient of z^(s-1) in prod_{b in inclusive(a)} (1 + T_b(z))
            poly = [1] + [0] * (s - 1)
            for b in graph.inclusive(a):
                tb = counts[b]
                new = poly[:]
                for i, ci in enumerate(poly):
                    if ci:
                        for k in range(1, s - i):
                            if tb[k]:
                                new[i + k] += ci * tb[k]
                poly = new
            counts[a][s] = poly[s - 1]
    return sum(counts[a][s] for a in range(m) for s in range(lo, hi + 1))


def enumerate_trees(instance: ProblemInstance, graph: DependencyGraph,
                    size_range: Sequence[int], cap: int = 10**7) -> Iterator[WitnessTree]:
    """Yield every proper witness tree with size in ``[lo, hi]`` exactly once.

    Order: by size, then root label, then child subtrees recursively (child
    labels ascending, smaller subtrees first).  Raises
    :class:`EnumerationLimitExceeded` up front when more than ``cap`` trees
    would be produced.
    """
    lo, hi = size_range
    if lo < 1 or hi < lo:
        raise ValueError(f"bad size range {size_range}")
    if len(graph) != instance.m:
        raise ValueError("graph does not match the instance")
    total = count_trees(graph, (lo, hi))
    if total > cap:
        raise EnumerationLimitExceeded(f"{total} trees in size range {tuple(size_range)}")
    for nested in _enumerate_nested(graph, lo, hi):
        yield WitnessTree.from_nested(nested)


def _enumerate_nested(graph: DependencyGraph, lo: int, hi: int) -> Iterator[tuple]:
    tree_cache: dict = {}
    forest_cache: dict = {}

    def trees(a, s):
        key = (a, s)
        if key not in tree_cache:
            tree_cache[key] = [(a, forest) for forest in forests(graph.inclusive(a), 0, s - 1)]
        return tree_cache[key]

    def forests(labels, i, r):
        # children with distinct labels drawn from labels[i:], total size r
        key = (labels, i, r)
        if key in forest_cache:
            return forest_cache[key]
        if r == 0:
            out = [()]
        elif i == len(labels):
            out = []
        else:
            out = list(forests(labels, i + 1, r))
            for k in range(1, r + 1):
                rest = forests(labels, i + 1, r - k)
                if not rest:
                    continue
                for sub in trees(labels[i], k):
                    out.extend((sub,) + tail for tail in rest)
        forest_cache[key] = out
        return out

    for s in range(lo, hi + 1):
        for a in range(len(graph)):
            yield from trees(a, s)
