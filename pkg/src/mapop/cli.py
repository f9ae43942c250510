"""Command-line front end: solve a multi-agent task or check a stored plan.

The report is a frozen ``key=value`` block, one pair per line, in this order:
status, actions, time_steps, parallelism, agents, messages, runtime_ms.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from dataclasses import dataclass

from .agent_runtime import TRACE_ENV, PrivacyViolation, RunConfig, run, spawn
from .coordination import POLICIES, EvaluatorConfig
from .lang_parser import ParseError
from .map_core import GroundingError, load_task
from .partial_plan import (PartialPlan, PlanError, from_structured, is_solution, makespan_and_parallelism, schedule,
                           to_dot, to_structured)
from .pop_engine import SearchBudget

log = logging.getLogger("mapop")

EXIT_SOLVED, EXIT_INPUT_ERROR, EXIT_NO_SOLUTION = 0, 1, 2
REPORT_KEYS = ("status", "actions", "time_steps", "parallelism", "agents", "messages", "runtime_ms")


@dataclass
class CliReport:
    status: str
    actions: int = 0
    time_steps: int = 0
    parallelism: int = 0
    agents: int = 0
    messages: int = 0
    runtime_ms: int = 0

    def format(self) -> str:
        return "".join(f"{k}={getattr(self, k)}\n" for k in REPORT_KEYS)


def parse_report(text: str) -> dict:
    """Read a report block back; non key=value lines are ignored."""
    out = {}
    for line in text.splitlines():
        key, sep, value = line.partition("=")
        if sep and key in REPORT_KEYS:
            out[key] = value if key == "status" else int(value)
    return out


def plan_report(plan: PartialPlan | None, status: str, agents: int, messages: int, runtime_ms: int) -> CliReport:
    if plan is None:
        return CliReport(status, agents=agents, messages=messages, runtime_ms=runtime_ms)
    ts, par = makespan_and_parallelism(plan)
    return CliReport(status, len(plan.real_steps), ts, par, agents, messages, runtime_ms)


def format_plan(plan: PartialPlan) -> str:
    start = schedule(plan)
    task = plan.task
    lines = []
    for sid in sorted(start, key=lambda s: (start[s], plan.label(s), s)):
        who = ",".join(task.objects.show(task.agent(i).name) for i in sorted(plan.steps[sid].owners))
        lines.append(f"  [{start[sid]}] {who} {plan.label(sid)}")
    return "\n".join(lines) + ("\n" if lines else "")


def export_plan(plan: PartialPlan, fmt: str, path: str) -> None:
    text = to_dot(plan) if fmt == "dot" else to_structured(plan)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _weights(text: str) -> EvaluatorConfig:
    try:
        parts = [float(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError("weights must be three numbers, e.g. 1,1,1") from None
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("weights must be three numbers, e.g. 1,1,1")
    try:
        return EvaluatorConfig(*parts)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mapop", description="Cooperative multi-agent partial-order planner.")
    p.add_argument("--agent", nargs=2, action="append", metavar=("DOMAIN", "PROBLEM"), required=True,
                   help="domain and problem file of one agent (repeat per agent)")
    p.add_argument("--seed", type=int, default=0, help="seed for the randomized scheduler")
    p.add_argument("--random-baton", action="store_true", help="pick the first baton holder from --seed")
    p.add_argument("--max-refinements", type=int, default=SearchBudget.max_refinements,
                   help="refinements each agent may propose per goal")
    p.add_argument("--max-nodes", type=int, default=SearchBudget.max_nodes, help="search nodes per refinement call")
    p.add_argument("--max-iterations", type=int, default=5000, help="coordination rounds before giving up")
    p.add_argument("--weights", type=_weights, default=EvaluatorConfig(), metavar="A,G,P",
                   help="evaluator weights: actions, open-goal cost, private-goal bonus")
    p.add_argument("--policy", choices=POLICIES, default="global", help="which candidates a ballot ranges over")
    p.add_argument("--plan", metavar="FILE", help="check a stored structured plan instead of solving")
    p.add_argument("--out-dot", metavar="FILE", help="write the plan as a Graphviz graph")
    p.add_argument("--out-plan", metavar="FILE", help="write the plan in the structured format")
    p.add_argument("--trace", metavar="FILE", help=f"write protocol events as JSON lines (verbosity: ${TRACE_ENV})")
    p.add_argument("--quiet", action="store_true", help="print only the report block")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="%(name)s: %(message)s")
    pairs = [tuple(a) for a in args.agent]
    for path in (p for pair in pairs for p in pair):
        if not os.path.isfile(path):
            print(f"mapop: no such file: {path}", file=sys.stderr)
            return EXIT_INPUT_ERROR
    trace = None
    try:
        if args.plan:
            start = time.perf_counter()
            task = load_task(pairs)
            with open(args.plan, encoding="utf-8") as fh:
                plan = from_structured(fh.read(), task)
            if not is_solution(plan):
                print(f"mapop: {args.plan}: not a solution plan", file=sys.stderr)
                report = CliReport("no-solution", len(plan.real_steps), agents=len(task.agents))
                print(report.format(), end="")
                return EXIT_NO_SOLUTION
            report = plan_report(plan, "solved", len(task.agents), 0, int((time.perf_counter() - start) * 1000))
        else:
            budget = SearchBudget(args.max_nodes, args.max_refinements)
            if args.trace:
                trace = open(args.trace, "w", encoding="utf-8")
            verbosity = int(os.environ.get(TRACE_ENV, "1") or 0) if args.trace or TRACE_ENV in os.environ else 0
            cfg = RunConfig(pairs, args.seed, args.weights, budget,
                            "seeded-random" if args.random_baton else "deterministic",
                            args.policy, args.max_iterations, trace, verbosity)
            pool = spawn(cfg)
            result = run(pool)
            plan = result.plan
            report = plan_report(plan, result.status, len(pool.task.agents), result.messages, result.runtime_ms)
            if result.status != "solved":
                log.warning("no solution: %s", result.reason)
    except (ParseError, GroundingError, PlanError, PrivacyViolation, OSError, ValueError) as exc:
        print(f"mapop: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    finally:
        if trace is not None:
            trace.close()

    if plan is not None:
        if not args.quiet:
            print("plan:")
            print(format_plan(plan), end="")
        if args.out_dot:
            export_plan(plan, "dot", args.out_dot)
        if args.out_plan:
            export_plan(plan, "structured", args.out_plan)
    print(report.format(), end="")
    return EXIT_SOLVED if report.status == "solved" else EXIT_NO_SOLUTION


if __name__ == "__main__":
    sys.exit(main())
