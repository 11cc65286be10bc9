"""Command-line entry point.

Exit status: 0 when the output assignment was verified against the raw
input, 2 when the step or round limit was hit, 1 on input or
configuration errors and on a failing condition without
``--override-check``.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from . import applications, formats
from .criteria import XAssignment, check_x_condition, default_max_steps, resample_budget, symmetric_x
from .derandomize import derandomized_solve
from .errors import LLLError
from .model import build_dependency_graph, build_lopsidependency_graph
from .parallel import LubyStep, greedy_mis, solve_parallel
from .sampling import SampleStream
from .sequential import RandomUniform, lowest_id, solve_lopsided, solve_sequential
from .witness import build_witness_tree

logger = logging.getLogger("lllsolve")

MODES = ("sequential", "parallel", "deterministic")
GRAPHS = ("standard", "lopsided")
POLICIES = ("lowest-id", "random", "greedy", "luby")


@dataclass
class RunConfig:
    input: Path
    mode: str = "sequential"
    graph: str = "standard"
    seed: int = 0
    policy: Optional[str] = None
    epsilon: float = 0.0
    x_file: Optional[Path] = None
    max_steps: Optional[int] = None
    max_rounds: Optional[int] = None
    stats_out: Optional[Path] = None
    override_check: bool = False
    elementary: bool = False

    def validate(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.graph not in GRAPHS:
            raise ValueError(f"unknown graph {self.graph!r}")
        if self.mode == "deterministic" and not self.epsilon > 0:
            raise ValueError("deterministic mode needs --epsilon > 0")
        if self.mode == "parallel" and self.graph == "lopsided":
            raise ValueError("the lopsided graph has no parallel analysis")
        if self.mode == "deterministic" and self.graph == "lopsided":
            raise ValueError("deterministic mode uses the standard graph")
        allowed = {"sequential": ("lowest-id", "random"), "parallel": ("greedy", "luby"),
                   "deterministic": ("lowest-id",)}[self.mode]
        if self.policy is not None and self.policy not in allowed:
            raise ValueError(f"policy {self.policy!r} not available in {self.mode} mode")


def dump_stats(stats: dict) -> str:
    """One ``"key": value`` pair per line; the whole text is a JSON object."""
    lines = [f"{json.dumps(k)}: {json.dumps(stats[k], sort_keys=True)}" for k in sorted(stats)]
    return "{\n" + ",\n".join(lines) + "\n}\n"


def _verify(raw: str, kind: str, assignment) -> bool:
    # Works from the raw text only, never from the solver's instance.
    if kind == "cnf":
        return applications.satisfies(formats.parse_dimacs(raw), assignment)
    return applications.is_proper_coloring(formats.parse_hypergraph(raw), assignment)


def _model_line(kind: str, assignment) -> str:
    if kind == "cnf":
        lits = [str(i + 1) if a else str(-(i + 1)) for i, a in enumerate(assignment)]
        return "v " + " ".join(lits + ["0"])
    return "v " + " ".join(str(a) for a in assignment)


def run(config: RunConfig, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        config.validate()
        raw = Path(config.input).read_text()
        kind = formats.detect_format(raw)
        supplied = None
        if kind == "cnf":
            instance, supplied = applications.cnf_to_instance(formats.parse_dimacs(raw))
        else:
            instance = applications.hypergraph_to_instance(formats.parse_hypergraph(raw))
        if config.elementary:
            instance = applications.break_into_elementary(instance)
            supplied = None
        if config.graph == "lopsided":
            graph = build_lopsidependency_graph(instance, supplied)
        else:
            graph = build_dependency_graph(instance)
        clamped = False
        if config.x_file is not None:
            x = XAssignment.from_text(Path(config.x_file).read_text())
        else:
            x, clamped = symmetric_x(instance, graph)
        report = check_x_condition(instance, graph, x, config.epsilon)
    except (LLLError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=err)
        return 1

    print(report.format(), file=err)
    if not report.passed and (config.mode == "deterministic" or not config.override_check):
        print("refusing to run: the condition fails (use --override-check to run anyway)",
              file=err)
        return 1

    budget = resample_budget(x)
    stats = {
        "mode": config.mode, "graph": config.graph, "seed": config.seed,
        "epsilon": config.epsilon, "input_kind": kind, "elementary": config.elementary,
        "num_variables": instance.n, "num_events": instance.m,
        "problem_size": instance.problem_size,
        "check_passed": report.passed, "override": bool(config.override_check),
        "x_clamped": clamped,
        "criteria": [[r.event, r.probability, r.bound, r.passed] for r in report.rows],
        "budget": budget,
    }
    source = SampleStream(instance.variables, config.seed)
    policy_name = config.policy
    try:
        if config.mode == "sequential":
            policy_name = policy_name or "lowest-id"
            policy = RandomUniform(config.seed) if policy_name == "random" else lowest_id
            max_steps = config.max_steps if config.max_steps is not None else default_max_steps(x)
            if config.graph == "lopsided":
                result = solve_lopsided(instance, graph, source, policy, max_steps)
            else:
                result = solve_sequential(instance, source, policy, max_steps)
        elif config.mode == "parallel":
            policy_name = policy_name or "greedy"
            mis = LubyStep(config.seed) if policy_name == "luby" else greedy_mis
            max_rounds = (config.max_rounds if config.max_rounds is not None
                          else default_max_steps(x))
            result = solve_parallel(instance, graph, source, mis, max_rounds)
            depths = Counter(build_witness_tree(result.log, t, graph).depth
                             for t in range(1, len(result.log) + 1))
            stats["rounds"] = len(result.rounds)
            stats["round_sizes"] = [len(r.selected) for r in result.rounds]
            stats["depth_histogram"] = [depths.get(d, 0)
                                        for d in range(max(depths, default=-1) + 1)]
        else:
            policy_name = "lowest-id"
            result = derandomized_solve(instance, graph, x, config.epsilon)
            stats["tree_list_size"] = result.tree_count
            stats["size_range"] = list(result.size_range)
            stats["threshold"] = result.threshold
            stats["table"] = result.table.values
    except LLLError as exc:
        print(f"error: {exc}", file=err)
        return 1

    stats["policy"] = policy_name
    stats["terminated"] = result.terminated
    stats["total_steps"] = len(result.log)
    stats["per_event_counts"] = result.log.per_event_counts
    verified = result.terminated and _verify(raw, kind, result.assignment)
    stats["verified"] = verified
    if result.terminated:
        stats["assignment"] = list(result.assignment)
    if config.stats_out is not None:
        Path(config.stats_out).write_text(dump_stats(stats))

    if not result.terminated:
        print(f"step limit reached after {len(result.log)} resamplings", file=err)
        return 2
    if not verified:
        print("error: the final assignment failed independent verification", file=err)
        return 1
    print(_model_line(kind, result.assignment), file=out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lllsolve",
        description="Find assignments avoiding bad events by resampling.")
    parser.add_argument("input", type=Path, help="DIMACS CNF or hypergraph file")
    parser.add_argument("--mode", choices=MODES, default="sequential")
    parser.add_argument("--graph", choices=GRAPHS, default="standard")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--policy", choices=POLICIES, default=None,
                        help="lowest-id|random (sequential), greedy|luby (parallel)")
    parser.add_argument("--epsilon", type=float, default=0.0)
    parser.add_argument("--x-file", type=Path, default=None,
                        help="one weight per event; default 1/(max degree + 1)")
    parser.add_argument("--max-steps", type=int, default=None, help="0 means unlimited")
    parser.add_argument("--max-rounds", type=int, default=None, help="0 means unlimited")
    parser.add_argument("--stats-out", type=Path, default=None)
    parser.add_argument("--override-check", action="store_true",
                        help="run even when the condition fails")
    parser.add_argument("--elementary", action="store_true",
                        help="split events into elementary events first")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    config = RunConfig(
        input=args.input, mode=args.mode, graph=args.graph, seed=args.seed,
        policy=args.policy, epsilon=args.epsilon, x_file=args.x_file,
        max_steps=args.max_steps, max_rounds=args.max_rounds, stats_out=args.stats_out,
        override_check=args.override_check, elementary=args.elementary)
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
