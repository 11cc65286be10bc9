"""Test-only helpers: weight search, brute-force oracles, instance factories."""

import itertools
import math
import random
from pathlib import Path

from hypothesis import strategies as st

from lllsolve.applications import CnfFormula, cnf_to_instance
from lllsolve.criteria import XAssignment, check_x_condition
from lllsolve.formats import parse_dimacs
from lllsolve.model import EventSpec, ProblemInstance, VariableSpec

DATA = Path(__file__).parent / "data"


def tight_uniform_x(instance, graph, epsilon=0.0, margin=1.0001):
    """Smallest passing uniform weight (bisection), nudged up by ``margin``.

    x(1-x)^d increases up to 1/(d+1), so every value between the bisection
    result and that cap passes as well.
    """
    cap = 1.0 / (graph.max_degree + 1) if graph.max_degree else 1.0 - 1e-9
    if not check_x_condition(instance, graph, XAssignment.uniform(cap, instance.m),
                             epsilon).passed:
        raise ValueError("no uniform weight passes")
    lo, hi = 0.0, cap
    for _ in range(60):
        mid = (lo + hi) / 2
        if check_x_condition(instance, graph, XAssignment.uniform(mid, instance.m),
                             epsilon).passed:
            hi = mid
        else:
            lo = mid
    return XAssignment.uniform(min(hi * margin, cap), instance.m)


def all_assignments(instance):
    return itertools.product(*(range(v.domain_size) for v in instance.variables))


def avoiding_assignments(instance):
    """Every assignment violating no event, by exhaustive scan."""
    return {a for a in all_assignments(instance)
            if not any(ev.predicate(tuple(a[v] for v in ev.support)) for ev in instance.events)}


def cnf(num_vars, *clauses):
    return cnf_to_instance(CnfFormula(num_vars, tuple(clauses)))


def load_cnf(path):
    return parse_dimacs(Path(path).read_text())


def custom_instance(domain_sizes, events):
    """``events``: list of (support, predicate) pairs; bounds computed exactly."""
    variables = tuple(VariableSpec(i, d) for i, d in enumerate(domain_sizes))
    specs = []
    for i, (support, predicate) in enumerate(events):
        support = tuple(sorted(support))
        count = sum(1 for vals in itertools.product(*(range(domain_sizes[v]) for v in support))
                    if predicate(vals))
        p = count / math.prod(domain_sizes[v] for v in support)
        specs.append(EventSpec(i, support, p, predicate))
    return ProblemInstance(variables, tuple(specs))


@st.composite
def small_cnfs(draw, max_vars=6, max_clauses=6, max_width=3):
    n = draw(st.integers(1, max_vars))
    m = draw(st.integers(0, max_clauses))
    clauses = []
    for _ in range(m):
        width = draw(st.integers(1, min(max_width, n)))
        variables = draw(st.lists(st.integers(1, n), min_size=width, max_size=width,
                                  unique=True))
        signs = draw(st.lists(st.booleans(), min_size=width, max_size=width))
        clauses.append(tuple(v if s else -v for v, s in zip(variables, signs)))
    return CnfFormula(n, tuple(clauses))


def random_small_cnf(rng: random.Random, n, m, width):
    clauses = []
    for _ in range(m):
        variables = rng.sample(range(1, n + 1), width)
        clauses.append(tuple(v if rng.random() < 0.5 else -v for v in variables))
    return CnfFormula(n, tuple(clauses))
