"""Per-agent partial-order planning: refinements of a base plan for one open goal.

A refinement links the selected goal to a supporter, then keeps working until no
open goal private to the author remains, no threat remains and every pair of
concurrent, fully supported public steps is mutually consistent.  Public open goals
other than the selected one are left for later rounds.
"""
from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass
from typing import Callable

from .dis_rpg import Rpg, heuristic_cost
from .map_core import AgentModel, Fluent, supports
from .partial_plan import (GOAL, INIT, CausalLink, PartialPlan, PlanError, RefinementStep, Threat,
                           concurrency_clashes, open_goals, threats)

__all__ = ["RefinementStep", "SearchBudget", "RefinementList", "can_refine", "supporters", "refine",
           "refinement_between"]

UNREACHABLE_COST = 1000


@dataclass(frozen=True)
class SearchBudget:
    max_nodes: int = 10000
    max_refinements: int = 10
    patience: int = 300  # nodes allowed without a new refinement once one was found

    def __post_init__(self):
        if self.max_nodes <= 0 or self.max_refinements <= 0 or self.patience <= 0:
            raise ValueError("search budgets must be positive")


class RefinementList(list):
    """Refinement steps in score order, plus search statistics."""

    def __init__(self, items=(), budget_exhausted: bool = False, nodes_expanded: int = 0):
        super().__init__(items)
        self.budget_exhausted = budget_exhausted
        self.nodes_expanded = nodes_expanded


def can_refine(agent: AgentModel, goal: Fluent) -> bool:
    """The agent knows the goal's variable and value."""
    return agent.sees(goal)


def supporters(agent: AgentModel, base: PartialPlan, goal: Fluent, consumer=None,
               rpg: Rpg | None = None) -> list:
    """Candidate producers of ``goal``: ("step", id) for existing steps, ("new", action) otherwise."""
    task = base.task
    is_bool = task.is_boolean(goal.var)
    out = []
    for sid, act in base.steps.items():
        if sid == consumer or (consumer is not None and base.precedes(consumer, sid)):
            continue
        if any(supports(e, goal, is_bool) and agent.sees_effect(e) for e in act.effects):
            out.append(("step", sid))
    for act in sorted(agent.actions, key=lambda a: a.name):
        if rpg is not None and act not in rpg.action_level:
            continue
        if any(supports(e, goal, is_bool) for e in act.effects):
            out.append(("new", act))
    return out


def refinement_between(base: PartialPlan, plan: PartialPlan, author: int, goal) -> RefinementStep:
    """The refinement step that turns ``base`` into ``plan``."""
    added = tuple((sid, act) for sid, act in plan.steps.items() if sid not in base.steps)
    return RefinementStep(author, added,
                          tuple(sorted(plan.orderings - base.orderings)),
                          tuple(sorted(plan.links - base.links)), goal)


def _default_score(agent: AgentModel, rpg: Rpg) -> Callable[[PartialPlan], float]:
    from .coordination import EvaluatorConfig, plan_score
    cfg = EvaluatorConfig()
    return lambda plan: plan_score(agent, plan, rpg, cfg)


def _stuck(plan: PartialPlan, t: Threat) -> bool:
    """Neither promotion nor demotion can clear the threat, now or after more orderings."""
    producer, consumer = t.link.producer, t.link.consumer
    no_promotion = producer == INIT or plan.precedes(producer, t.step)
    no_demotion = consumer == GOAL or plan.precedes(t.step, consumer)
    return no_promotion and no_demotion


def _link(plan: PartialPlan, agent: AgentModel, consumer, goal: Fluent, how) -> PartialPlan | None:
    try:
        if how[0] == "step":
            return plan.with_link(CausalLink(how[1], consumer, goal))
        plan, sid = plan.add(how[1], agent.id)
        return plan.with_link(CausalLink(sid, consumer, goal))
    except PlanError:
        return None


def refine(agent: AgentModel, base: PartialPlan, goal: tuple, rpg: Rpg,
           budget: SearchBudget = SearchBudget(), score: Callable[[PartialPlan], float] | None = None
           ) -> RefinementList:
    """Threat-free refinement steps of ``base`` solving ``goal`` = (step, fluent), best first."""
    step, fluent = goal
    if (step, fluent) not in open_goals(base):
        raise PlanError(f"{base.task.format(fluent)} is not an open goal of the base plan")
    if not can_refine(agent, fluent):
        return RefinementList()
    task = base.task
    score = score or _default_score(agent, rpg)

    def private_goals(plan: PartialPlan) -> list:
        return [(s, f) for s, f in open_goals(plan) if task.is_private_to(f, agent)]

    def cost(f: Fluent) -> int:
        h = heuristic_cost(rpg, f)
        return UNREACHABLE_COST if h is None else h

    tick = itertools.count()
    heap: list = []
    seen: set = set()

    def push(plan: PartialPlan | None) -> None:
        if plan is None:
            return
        key = plan.key()
        if key in seen:
            return
        seen.add(key)
        pending = private_goals(plan)
        if any(heuristic_cost(rpg, f) is None for _, f in pending):
            return  # a private goal nobody can reach: dead end
        heapq.heappush(heap, (score(plan), next(tick), plan))

    for how in supporters(agent, base, fluent, step, rpg):
        push(_link(base, agent, step, fluent, how))

    done: list = []
    done_keys: set = set()
    expanded = 0
    last_found = 0
    exhausted = False
    while heap and len(done) < budget.max_refinements:
        if expanded >= budget.max_nodes:
            exhausted = True
            break
        if done and expanded - last_found >= budget.patience:
            break
        _, _, plan = heapq.heappop(heap)
        expanded += 1
        found = threats(plan)
        if any(_stuck(plan, t) for t in found):
            continue  # some threat can no longer be ordered away

        pending = private_goals(plan)
        if pending:
            s, f = min(pending, key=lambda g: (cost(g[1]), g[1], g[0]))
            for how in supporters(agent, plan, f, s, rpg):
                push(_link(plan, agent, s, f, how))
            continue
        if found:
            t = found[0]
            for a, b in ((t.step, t.link.producer), (t.link.consumer, t.step)):
                try:
                    push(plan.with_ordering(a, b))
                except PlanError:
                    pass
            continue
        clashes = concurrency_clashes(plan)
        if clashes:
            a, b = clashes[0]
            for x, y in ((a, b), (b, a)):
                try:
                    push(plan.with_ordering(x, y))
                except PlanError:
                    pass
            continue
        key = plan.key()
        if key not in done_keys:
            done_keys.add(key)
            done.append((score(plan), len(done), plan))
            last_found = expanded

    done.sort(key=lambda x: (x[0], x[1]))
    steps = [refinement_between(base, plan, agent.id, goal) for _, _, plan in done]
    return RefinementList(steps, exhausted, expanded)
