import random

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from mapop.dis_rpg import run_fixpoint
from mapop.fixtures import PICTURE2_PLAN, path, table4_pairs, transport_pairs
from mapop.map_core import load_task
from mapop.partial_plan import (CausalLink, CycleError, PartialPlan, PlanError, empty_plan, from_structured,
                                makespan_and_parallelism, open_goals, resolve_threat, threats, violated_clauses,
                                view, view_precedes)
from mapop.pop_engine import supporters
from oracles import build_from_texts, central_levels, random_full_share_task

TASK = load_task(transport_pairs())
AG1 = TASK.agents[0]
PICTURE2 = load_task(table4_pairs("Picture2"))
PICTURE2_SOLUTION = from_structured(open(path(PICTURE2_PLAN)).read(), PICTURE2)
DRIVES = [a for a in AG1.actions if a.name[0] == "drive"]
SETTINGS = dict(deadline=None, suppress_health_check=[HealthCheck.too_slow])


def acyclic(plan: PartialPlan) -> bool:
    return not any(plan.precedes(a, b) and plan.precedes(b, a) for a in plan.steps for b in plan.steps)


def random_plan(data, moves: int, check=None) -> PartialPlan:
    """Grow a plan by random goal supports and random threat repairs."""
    plan = empty_plan(TASK)
    for _ in range(moves):
        found = threats(plan)
        if found:
            t = data.draw(st.sampled_from(found))
            mode = data.draw(st.sampled_from(["promotion", "demotion"]))
            try:
                plan = resolve_threat(plan, t, mode)
            except CycleError:
                continue
            if check:
                check(plan, t)
            continue
        goals = [g for g in open_goals(plan) if AG1.sees(g[1])]
        if not goals or data.draw(st.integers(0, 2)) == 0:
            plan, _ = plan.add(data.draw(st.sampled_from(DRIVES)), AG1.id)  # a likely clobberer
            continue
        step, f = data.draw(st.sampled_from(goals))
        options = supporters(AG1, plan, f, step)
        if not options:
            continue
        kind, x = data.draw(st.sampled_from(options))
        try:
            if kind == "new":
                plan, sid = plan.add(x, AG1.id)
                x = sid
            plan = plan.with_link(CausalLink(x, step, f))
        except PlanError:
            continue
    return plan


@settings(max_examples=1000, **SETTINGS)
@given(st.data())
def test_flaw_repairs_keep_plans_acyclic(data):
    def check(plan, t):
        assert t not in threats(plan)
    plan = random_plan(data, data.draw(st.integers(3, 12)), check)
    assert acyclic(plan)


@settings(max_examples=200, **SETTINGS)
@given(st.data())
def test_views_keep_steps_and_order(data):
    plan = random_plan(data, data.draw(st.integers(1, 6)))
    full = {(a, b) for a in plan.steps for b in plan.steps if plan.precedes(a, b)}
    for agent in TASK.agents:
        v = view(plan, agent)
        assert set(v.steps) == set(plan.steps)
        assert all(agent.sees(l.fluent) for l in v.links)
        assert all(agent.sees(f) for _, f in v.open_goals)
        assert view_precedes(v) == full


@settings(max_examples=500, **SETTINGS)
@given(st.sampled_from(TASK.actions), st.sampled_from(TASK.actions))
def test_consistency_is_symmetric(a, b):
    assert violated_clauses(a, b) == violated_clauses(b, a)


@settings(max_examples=200, **SETTINGS)
@given(st.randoms(use_true_random=False))
def test_makespan_ignores_step_ids(rng):
    plan = PICTURE2_SOLUTION
    real = plan.real_steps
    fresh = [(rng.randrange(2), n) for n in rng.sample(range(100, 200), len(real))]
    rename = dict(zip(real, fresh))
    rename.update({s: s for s in plan.steps if s not in rename})
    order = list(plan.steps)[:2] + rng.sample(real, len(real))
    steps = {rename[s]: plan.steps[s] for s in order}
    orderings = frozenset((rename[a], rename[b]) for a, b in plan.orderings)
    links = frozenset(CausalLink(rename[l.producer], rename[l.consumer], l.fluent) for l in plan.links)
    moved = PartialPlan(plan.task, steps, orderings, links)
    assert moved.key() == plan.key()
    assert makespan_and_parallelism(moved) == makespan_and_parallelism(plan) == (8, 2)


@settings(max_examples=30, **SETTINGS)
@given(st.integers(0, 10**6))
def test_distributed_graph_matches_central_one(seed):
    rng = random.Random(seed)
    task = build_from_texts(random_full_share_task(rng, agents=rng.randint(1, 3)))
    central = central_levels(task)
    rpgs = run_fixpoint(task.agents)
    for agent in task.agents:
        assert rpgs[agent.id].fluent_level == {f: l for f, l in central.items() if agent.sees(f)}
