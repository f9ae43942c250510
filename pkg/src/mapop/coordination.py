"""Joint resolution: goal selection, refinement exchange, evaluation, voting and adoption.

One iteration: the baton agent picks the costliest open goal it can see, every agent
that knows the goal proposes refinements, every agent scores every proposal on its
own view of the plan, ballots go to the baton, the winner becomes the new base plan
and the baton moves on round-robin.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .dis_rpg import Rpg, heuristic_cost
from .map_core import AgentModel, Fluent, MapTask, is_shareable, supports
from .partial_plan import (FICTITIOUS, INIT, PartialPlan, PlanView, compose, empty_plan, is_solution, open_goals,
                           view)
from .pop_engine import UNREACHABLE_COST, SearchBudget, can_refine, refine

POLICIES = ("greedy", "global")


class NoSolution(Exception):
    pass


@dataclass(frozen=True)
class EvaluatorConfig:
    weight_actions: float = 1.0
    weight_open_goal_cost: float = 1.0
    private_goal_bonus: float = 1.0

    def __post_init__(self):
        ws = (self.weight_actions, self.weight_open_goal_cost, self.private_goal_bonus)
        if any(w < 0 for w in ws) or not any(ws):
            raise ValueError("weights must be non-negative and not all zero")

    def scaled(self, k: float) -> "EvaluatorConfig":
        return EvaluatorConfig(self.weight_actions * k, self.weight_open_goal_cost * k, self.private_goal_bonus * k)


def evaluate(observer: AgentModel, plan_view: PlanView, rpg: Rpg, cfg: EvaluatorConfig) -> float:
    """Lower is better: steps, plus estimated cost of the open goals the observer sees,
    minus a bonus per private goal of the observer some visible effect achieves."""
    steps = sum(1 for s in plan_view.steps if s not in FICTITIOUS)
    h = 0
    for _, f in plan_view.open_goals:
        c = heuristic_cost(rpg, f)
        h += UNREACHABLE_COST if c is None else c
    bonus = 0
    if observer.private_goals:
        table = observer.table
        effects = [e for s, vs in plan_view.steps.items() if s != INIT for e in vs.effects]
        bonus = sum(1 for g in observer.private_goals
                    if any(supports(e, g, table.is_boolean(g.var)) for e in effects))
    return cfg.weight_actions * steps + cfg.weight_open_goal_cost * h - cfg.private_goal_bonus * bonus


def plan_score(observer: AgentModel, plan: PartialPlan, rpg: Rpg, cfg: EvaluatorConfig) -> float:
    """Same value as ``evaluate(observer, view(plan, observer), ...)`` without building the view."""
    steps = len(plan.steps) - len(FICTITIOUS)
    h = 0
    for _, f in open_goals(plan):
        if observer.sees(f):
            c = heuristic_cost(rpg, f)
            h += UNREACHABLE_COST if c is None else c
    bonus = 0
    if observer.private_goals:
        table = observer.table
        effects = [e for s, act in plan.steps.items() if s != INIT for e in act.effects if observer.sees_effect(e)]
        bonus = sum(1 for g in observer.private_goals
                    if any(supports(e, g, table.is_boolean(g.var)) for e in effects))
    return cfg.weight_actions * steps + cfg.weight_open_goal_cost * h - cfg.private_goal_bonus * bonus


def select_open_goal(plan: PartialPlan, rpgs: Mapping[int, Rpg], baton: int) -> tuple:
    """Open goal visible to the baton with the highest cost in its graph; ties by lowest fluent."""
    agent = plan.task.agent(baton)
    rpg = rpgs[baton]
    goals = [g for g in open_goals(plan) if agent.sees(g[1])]
    if not goals:
        raise LookupError(f"{agent.name} sees no open goal")

    def cost(g):
        c = heuristic_cost(rpg, g[1])
        return UNREACHABLE_COST if c is None else c
    return min(goals, key=lambda g: (-cost(g), g[1], g[0]))


@dataclass
class PoolEntry:
    id: int
    plan: PartialPlan
    scores: dict  # agent id -> score
    author: int
    parent: int | None


@dataclass
class SearchPool:
    """Unadopted candidate plans, with one lazily pruned score heap per voter."""
    entries: dict = field(default_factory=dict)  # id -> PoolEntry
    next_id: int = 0
    keys: set = field(default_factory=set)
    heaps: dict = field(default_factory=dict)  # voter -> [(score, id)]

    def add(self, plan: PartialPlan, scores: dict, author: int, parent: int | None) -> int | None:
        key = plan.key()
        if key in self.keys:
            return None
        self.keys.add(key)
        pid = self.next_id
        self.next_id += 1
        self.entries[pid] = PoolEntry(pid, plan, scores, author, parent)
        for voter, score in scores.items():
            heapq.heappush(self.heaps.setdefault(voter, []), (score, pid))
        return pid

    def best(self, voter: int) -> int | None:
        heap = self.heaps.get(voter, [])
        while heap and heap[0][1] not in self.entries:
            heapq.heappop(heap)
        return heap[0][1] if heap else None

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, pid) -> bool:
        return pid in self.entries


@dataclass(frozen=True)
class Ballot:
    voter: int
    choice: int
    score: float


def best_choice(pool: SearchPool, voter: int, among: Sequence[int] | None = None) -> Ballot:
    """The voter's lowest-scored plan, over ``among`` or the whole pool; ties go to the oldest."""
    if among is None:
        pid = pool.best(voter)
        if pid is None:
            raise NoSolution("no candidate plan left")
    else:
        ids = [i for i in among if i in pool]
        if not ids:
            raise NoSolution("no candidate plan left")
        pid = min(ids, key=lambda i: (pool.entries[i].scores[voter], i))
    return Ballot(voter, pid, pool.entries[pid].scores[voter])


def vote_and_adopt(pool: SearchPool, ballots: Sequence[Ballot], baton: int) -> tuple[int, SearchPool]:
    """Plurality winner; among tied leaders the baton's best-scored plan wins."""
    if not pool.entries:
        raise NoSolution("the pool of candidate plans is empty")
    tally: dict = {}
    for b in ballots:
        if b.choice not in pool:
            raise ValueError(f"ballot of agent {b.voter} names plan {b.choice}, which is not in the pool")
        tally[b.choice] = tally.get(b.choice, 0) + 1
    top = max(tally.values())
    leaders = [pid for pid, n in tally.items() if n == top]
    winner = min(leaders, key=lambda i: (pool.entries[i].scores.get(baton, 0), i))
    rest = {pid: e for pid, e in pool.entries.items() if pid != winner}
    return winner, SearchPool(rest, pool.next_id, pool.keys, pool.heaps)


def confirm_solution(plan: PartialPlan, agents: Sequence[AgentModel]) -> bool:
    """Every agent sees no open goal in its view and the full plan is a solution."""
    return all(not view(plan, a).open_goals for a in agents) and is_solution(plan)


@dataclass
class SolutionReport:
    status: str  # "solved" or "no-solution"
    plan: PartialPlan | None
    nodes_expanded: int = 0
    rounds: int = 0
    messages: int = 0
    reason: str = ""
    messages_by_phase: dict = field(default_factory=dict)
    runtime_ms: int = 0


def wire_view(plan: PartialPlan, sender: AgentModel, to: AgentModel) -> dict:
    """What travels from ``sender`` to ``to``: links and goals only on fluents the sender may share."""
    task = plan.task

    def ok(f: Fluent) -> bool:
        return to.sees(f) and is_shareable(f, sender, to.name)
    links, orderings = [], set(plan.orderings)
    for l in sorted(plan.links):
        if ok(l.fluent):
            links.append((l.producer, l.consumer, l.fluent))
        else:
            orderings.add((l.producer, l.consumer))
    return {"steps": [(s, task.action_label(plan.steps[s])) for s in plan.real_steps],
            "orderings": sorted(orderings), "links": links,
            "open_goals": [(s, f) for s, f in open_goals(plan) if ok(f)]}


def resolution_loop(task: MapTask, rpgs: Mapping[int, Rpg], bus=None, cfg: EvaluatorConfig = EvaluatorConfig(),
                    budget: SearchBudget = SearchBudget(), baton: int = 0, policy: str = "global",
                    max_iterations: int = 5000) -> SolutionReport:
    """Refine, exchange, vote and adopt until a confirmed solution or an empty pool."""
    if policy not in POLICIES:
        raise ValueError(f"unknown pool policy '{policy}'")
    if bus is None:
        from .agent_runtime import Bus
        bus = Bus(task.agents)
    agents = task.agents
    n = len(agents)
    base = empty_plan(task)
    base_id = None
    pool = SearchPool()
    nodes = 0

    def report(status, plan, iteration, reason=""):
        return SolutionReport(status, plan, nodes, iteration, bus.total, reason)

    for iteration in range(max_iterations):
        bus.round = iteration
        holder = agents[baton]
        candidates: list = []
        visible_goals = [g for g in open_goals(base) if any(a.sees(g[1]) for a in agents)]
        if open_goals(base) and visible_goals:
            # the baton passes goal selection on if it cannot see any open goal
            chooser = next(agents[(baton + k) % n] for k in range(n)
                           if any(agents[(baton + k) % n].sees(g[1]) for g in visible_goals))
            goal = select_open_goal(base, rpgs, chooser.id)
            bus.event({"event": "goal_selected", "baton": holder.name, "by": chooser.name,
                       "goal": task.format(goal[1]), "step": list(goal[0])})
            for a in agents:
                if a.id != chooser.id:
                    share = a.sees(goal[1]) and is_shareable(goal[1], chooser, a.name)
                    bus.send(chooser.name, a.name, "GoalSelection", {"goal": goal[1] if share else None})
            for a in agents:
                if not can_refine(a, goal[1]):
                    continue
                found = refine(a, base, goal, rpgs[a.id], budget,
                               score=lambda p, a=a: plan_score(a, p, rpgs[a.id], cfg))
                nodes += found.nodes_expanded
                plans = [compose(base, step) for step in found]
                if plans:
                    for b in agents:
                        if b.id != a.id:
                            bus.send(a.name, b.name, "RefinementBatch", [wire_view(p, a, b) for p in plans])
                bus.event({"event": "proposals", "agent": a.name, "count": len(plans),
                           "budget_exhausted": found.budget_exhausted})
                for p in plans:
                    scores = {b.id: plan_score(b, p, rpgs[b.id], cfg) for b in agents}
                    pid = pool.add(p, scores, a.id, base_id)
                    if pid is not None:
                        candidates.append(pid)

        if not pool.entries:
            bus.event({"event": "no_solution", "round": iteration})
            return report("no-solution", None, iteration, "the pool of candidate plans is empty")
        among = candidates if policy == "greedy" and candidates else None
        ballots = [best_choice(pool, a.id, among) for a in agents]
        for b in ballots:
            bus.event({"event": "ballot", "voter": agents[b.voter].name, "choice": b.choice, "score": b.score})
            if b.voter != holder.id:
                bus.send(agents[b.voter].name, holder.name, "BallotMsg", {"choice": b.choice})
        winner, rest = vote_and_adopt(pool, ballots, holder.id)
        base, base_id, pool = pool.entries[winner].plan, winner, rest
        baton = (baton + 1) % n
        bus.event({"event": "winner", "plan": winner, "steps": len(base.real_steps),
                   "open_goals": len(open_goals(base))})
        for a in agents:
            if a.id != holder.id:
                bus.send(holder.name, a.name, "BatonTransfer", {"winner": winner, "baton": agents[baton].name})
        bus.event({"event": "baton", "to": agents[baton].name})

        if not open_goals(base):
            for a in agents:
                if a.id != holder.id:
                    bus.send(a.name, holder.name, "SolutionConfirm", {"confirmed": not view(base, a).open_goals})
            if confirm_solution(base, agents):
                bus.event({"event": "solved", "steps": len(base.real_steps)})
                return report("solved", base, iteration + 1)
    return report("no-solution", None, max_iterations, "iteration limit reached")
