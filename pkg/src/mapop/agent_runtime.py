"""In-process agents: a counting message bus, and the two-phase run driver.

Phase one exchanges relaxed-planning-graph adverts until a fixpoint; phase two runs
the joint resolution loop.  Every message goes through ``Bus.send``, which checks the
payload type against the current phase, checks every fluent in the payload against
the sender's share patterns, counts it and optionally logs it.
"""
from __future__ import annotations

import json
import os
import random
import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Sequence, TextIO

from .coordination import EvaluatorConfig, SolutionReport, resolution_loop
from .dis_rpg import run_fixpoint
from .lang_parser import ParseError, load_agent
from .map_core import AgentModel, Fluent, GroundingError, MapTask, build_task, is_shareable
from .pop_engine import SearchBudget

PHASE_KINDS = {
    "rpg": frozenset({"FluentAdvertBatch"}),
    "resolution": frozenset({"GoalSelection", "RefinementBatch", "BallotMsg", "BatonTransfer", "SolutionConfirm"}),
}
TRACE_ENV = "MAPOP_TRACE"


class ProtocolViolation(Exception):
    pass


class PrivacyViolation(ProtocolViolation):
    pass


@dataclass(frozen=True)
class Envelope:
    sender: str
    to: str
    round: int
    kind: str
    payload: object


def fluents_in(payload) -> list:
    """Every Fluent nested anywhere inside a payload."""
    out, stack = [], [payload]
    while stack:
        x = stack.pop()
        if isinstance(x, Fluent):
            out.append(x)
        elif isinstance(x, dict):
            stack.extend(x.values())
        elif isinstance(x, (list, tuple, set, frozenset)):
            stack.extend(x)
    return out


class Bus:
    """Point-to-point delivery with per-type counting, phase isolation and privacy checks."""

    def __init__(self, agents: Sequence[AgentModel], trace: TextIO | None = None, verbosity: int = 1,
                 strict_privacy: bool = True):
        self.agents = {a.name: a for a in agents}
        self.phase = "resolution"
        self.round = 0
        self.counts: Counter = Counter()
        self.by_phase: Counter = Counter()
        self.violations: list = []
        self.events: list = []
        self.trace = trace
        self.verbosity = verbosity
        self.strict_privacy = strict_privacy
        self.interceptors: list[Callable[[Envelope], None]] = []
        self._last_round: dict = {}
        self._shareable: dict = {}

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def send(self, sender: str, to: str, kind: str, payload) -> Envelope:
        if kind not in PHASE_KINDS[self.phase]:
            raise ProtocolViolation(f"{kind} is not allowed during the {self.phase} phase")
        if to not in self.agents or sender not in self.agents or to == sender:
            raise ProtocolViolation(f"bad route {sender} -> {to}")
        if self.round < self._last_round.get(sender, 0):
            raise ProtocolViolation(f"{sender} sent a message for an earlier round")
        self._last_round[sender] = self.round
        env = Envelope(sender, to, self.round, kind, payload)
        src = self.agents[sender]
        for f in fluents_in(payload):
            ok = self._shareable.get((f, sender, to))
            if ok is None:
                ok = self._shareable[(f, sender, to)] = is_shareable(f, src, to)
            if not ok:
                self.violations.append((env, f))
                if self.strict_privacy:
                    raise PrivacyViolation(f"{sender} tried to send {src.table.format(f)} to {to}")
        for hook in self.interceptors:
            hook(env)
        self.counts[kind] += 1
        self.by_phase[self.phase] += 1
        if self.verbosity >= 2:
            self.event({"event": "message", "kind": kind, "from": sender, "to": to})
        return env

    def transport(self, sender: str, to: str, adverts: list) -> list:
        """Adapter for the graph exchange: one batch per (sender, receiver)."""
        self.send(sender, to, "FluentAdvertBatch", adverts)
        return adverts

    def event(self, record: dict) -> None:
        if self.verbosity <= 0:
            return
        line = dict(record, round=self.round, phase=self.phase)
        self.events.append(line)
        if self.trace is not None:
            self.trace.write(json.dumps(line, sort_keys=True) + "\n")


@dataclass
class RunConfig:
    agent_inputs: list  # (domain path, problem path) per agent
    seed: int = 0
    evaluator: EvaluatorConfig = field(default_factory=EvaluatorConfig)
    budget: SearchBudget = field(default_factory=SearchBudget)
    scheduler: str = "deterministic"  # or "seeded-random": random initial baton
    policy: str = "global"
    max_iterations: int = 5000
    trace: TextIO | None = None
    verbosity: int | None = None

    def __post_init__(self):
        if not self.agent_inputs:
            raise ValueError("at least one agent is required")
        if self.scheduler not in ("deterministic", "seeded-random"):
            raise ValueError(f"unknown scheduler '{self.scheduler}'")


@dataclass
class AgentPool:
    task: MapTask
    config: RunConfig
    bus: Bus
    report: SolutionReport | None = None


def spawn(config: RunConfig) -> AgentPool:
    """Load, validate and ground every agent; wire a fresh bus."""
    inputs = []
    for domain, problem in config.agent_inputs:
        inputs.append(load_agent(domain, problem))
    try:
        task = build_task(inputs)
    except GroundingError as exc:
        raise GroundingError(f"{', '.join(p for _, p in config.agent_inputs)}: {exc}") from exc
    verbosity = config.verbosity
    if verbosity is None:
        verbosity = int(os.environ.get(TRACE_ENV, "1") or 0)
    return AgentPool(task, config, Bus(task.agents, config.trace, verbosity))


def run(pool: AgentPool) -> SolutionReport:
    """Graph exchange to a fixpoint, then joint resolution."""
    cfg = pool.config
    bus = pool.bus
    start = time.perf_counter()
    bus.phase = "rpg"
    rpgs = run_fixpoint(pool.task.agents, bus.transport)
    bus.phase = "resolution"
    baton = 0
    if cfg.scheduler == "seeded-random":
        baton = random.Random(cfg.seed).randrange(len(pool.task.agents))
    report = resolution_loop(pool.task, rpgs, bus, cfg.evaluator, cfg.budget, baton, cfg.policy,
                             cfg.max_iterations)
    report.runtime_ms = int((time.perf_counter() - start) * 1000)
    report.messages_by_phase = dict(bus.by_phase)
    report.messages = bus.total
    pool.report = report
    return report


def message_stats(pool: AgentPool) -> dict:
    bus = pool.bus
    return {"total": bus.total, "by_kind": dict(sorted(bus.counts.items())),
            "by_phase": {"rpg": bus.by_phase.get("rpg", 0), "resolution": bus.by_phase.get("resolution", 0)}}


__all__ = ["Bus", "Envelope", "RunConfig", "AgentPool", "spawn", "run", "message_stats", "ParseError",
           "ProtocolViolation", "PrivacyViolation", "fluents_in"]
