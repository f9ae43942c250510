import json

import pytest
from conftest import action, fluent

from mapop.agent_runtime import RunConfig, run, spawn
from mapop.fixtures import path, table4_pairs
from mapop.map_core import load_task
from mapop.partial_plan import (GOAL, INIT, CausalLink, CycleError, DanglingReference, PartialPlan, PlanError,
                                RefinementStep, Threat, compose, concurrency_clashes, empty_plan, from_structured,
                                is_concurrent_plan, is_solution, makespan_and_parallelism, mutually_consistent,
                                open_goals, resolve_threat, schedule, threats, to_dot, to_structured,
                                violated_clauses, view, view_precedes)


@pytest.fixture
def pi00(transport):
    """Init supports at(t1)=cA of 'load t1 p3 cA'."""
    ag1 = transport.agent("ag1")
    plan, load = empty_plan(transport).add(action(transport, "load t1 p3 ca"), ag1.id)
    plan = plan.with_link(CausalLink(INIT, load, fluent(transport, "at(t1)=ca")))
    return plan, load


def test_empty_plan(transport):
    plan = empty_plan(transport)
    assert len(plan.steps) == 2 and plan.orderings == {(INIT, GOAL)} and not plan.links
    assert {transport.format(f) for _, f in open_goals(plan)} == {"pos(p1)=cA", "pos(p3)=cE"}
    assert [f for _, f in open_goals(plan)] == list(plan.steps[GOAL].pre)


def test_empty_plan_needs_goals():
    task = load_task([(path("transport.pddl"), path("transportation1/ta.pddl"))])
    with pytest.raises(PlanError):
        empty_plan(task)


def test_open_goals_exclude_linked(transport, pi00):
    plan, load = pi00
    goals = open_goals(plan)
    assert (load, fluent(transport, "at(t1)=ca")) not in goals
    assert (load, fluent(transport, "pos(p3)=ca")) in goals


def test_fully_linked_chain_has_no_open_goal():
    task = load_task([(path("transport.pddl"), path("transportation3/tb.pddl"))])
    plan = linear_tb_plan(task)
    assert open_goals(plan) == []
    for sid, act in plan.steps.items():
        assert all(any(l.consumer == sid and l.fluent == p for l in plan.links) for p in act.pre)


def linear_tb_plan(task):
    """load, drive, drive, unload for TB of Transportation3, linked by hand."""
    labels = ["load t2 p1 b0", "drive t2 b0 b1", "drive t2 b1 b2", "unload t2 p1 b2"]
    plan = empty_plan(task)
    sids = []
    for label in labels:
        plan, sid = plan.add(action(task, label), 0)
        sids.append(sid)
    for sid in sids + [GOAL]:
        for p in plan.steps[sid].pre:
            producer = next(s for s in reversed([INIT] + sids[:sids.index(sid)] if sid != GOAL else [INIT] + sids)
                            if any(e.var == p.var for e in plan.steps[s].effects)
                            and s != sid and _supports(plan, s, p))
            plan = plan.with_link(CausalLink(producer, sid, p))
    for a, b in zip(sids, sids[1:]):
        plan = plan.with_ordering(a, b)
    return plan


def _supports(plan, s, p):
    from mapop.map_core import supports
    return any(supports(e, p, plan.task.is_boolean(p.var)) for e in plan.steps[s].effects)


def test_drive_threatens_init_link(transport, pi00):
    plan, load = pi00
    plan, drive = plan.add(action(transport, "drive t1 ca cb"), 0)
    found = threats(plan)
    assert found == [Threat(drive, CausalLink(INIT, load, fluent(transport, "at(t1)=ca")))]
    fixed = resolve_threat(plan, found[0], "demotion")
    assert (load, drive) in fixed.orderings
    assert threats(fixed) == []


def test_promotion_before_init_is_a_cycle(transport, pi00):
    plan, load = pi00
    plan, drive = plan.add(action(transport, "drive t1 ca cb"), 0)
    with pytest.raises(CycleError):
        resolve_threat(plan, threats(plan)[0], "promotion")


def test_resolving_a_missing_threat_is_rejected(transport, pi00):
    plan, load = pi00
    plan, drive = plan.add(action(transport, "drive t1 ca cb"), 0)
    t = threats(plan)[0]
    plan = plan.with_ordering(load, drive)
    for mode in ("promotion", "demotion"):
        with pytest.raises(PlanError):
            resolve_threat(plan, t, mode)


def test_no_shared_variables_no_threats():
    task = load_task(table4_pairs("Picture3"))
    plan = empty_plan(task)
    for label in ("pickup w1 t1 l1", "pickup w2 t2 l2"):
        plan, _ = plan.add(action(task, label))
    assert threats(plan) == []


def test_negative_link_threat(transport):
    ag1 = transport.agent("ag1")
    plan = empty_plan(transport)
    not_b = fluent(transport, "at(t1)!=cb")
    plan, a = plan.add(action(transport, "drive t1 cb ca"), ag1.id)
    plan, gamma = plan.add(action(transport, "drive t1 ca cb"), ag1.id)
    consumer = _consumer_needing(transport, not_b)
    plan, c = plan.add(consumer, ag1.id)
    plan = plan.with_link(CausalLink(a, c, not_b))
    assert Threat(gamma, CausalLink(a, c, not_b)) in threats(plan)
    assert brute_force_threatened(plan, gamma, CausalLink(a, c, not_b))


def _consumer_needing(task, f):
    from mapop.map_core import GroundAction
    return GroundAction(10_000, ("probe",), (f,), (), frozenset({0}))


def brute_force_threatened(plan, gamma, link):
    """Some linear extension places gamma between producer and consumer."""
    from itertools import permutations
    steps = [gamma, link.producer, link.consumer]
    for order in permutations(steps):
        pos = {s: i for i, s in enumerate(order)}
        if any(pos[a] > pos[b] for a in steps for b in steps if a != b and plan.precedes(a, b)):
            continue
        if pos[link.producer] < pos[gamma] < pos[link.consumer]:
            return True
    return False


def test_mutual_consistency_examples(transport):
    ab = action(transport, "drive t1 ca cb")
    ac = action(transport, "drive t1 ca cc")
    cb = action(transport, "drive t1 cc cb")
    assert not mutually_consistent(ab, ac) and 2 in violated_clauses(ab, ac)
    assert not mutually_consistent(ab, cb) and 3 in violated_clauses(ab, cb)
    other = action(transport, "stack p1 p2 h1") if any(a.label == "stack p1 p2 h1" for a in transport.actions) \
        else next(a for a in transport.actions if a.name[0] == "stack")
    assert mutually_consistent(ab, other)


def test_mutual_consistency_symmetric(transport):
    acts = transport.actions[:30]
    for a in acts:
        for b in acts:
            assert violated_clauses(a, b) == violated_clauses(b, a)


def test_empty_actions_are_consistent():
    from mapop.map_core import GroundAction
    a = GroundAction(1, ("a",), (), (), frozenset({0}))
    assert mutually_consistent(a, a)


def test_concurrent_drives_are_not_a_concurrent_plan(transport):
    plan = empty_plan(transport)
    at_a = fluent(transport, "at(t1)=ca")
    for label in ("drive t1 ca cb", "drive t1 ca cc"):
        plan, sid = plan.add(action(transport, label), 0)
        for p in plan.steps[sid].pre:
            plan = plan.with_link(CausalLink(INIT, sid, p))
    assert not is_concurrent_plan(plan)
    assert len(concurrency_clashes(plan)) == 1


def test_single_step_plan_is_concurrent(pi00):
    assert is_concurrent_plan(pi00[0])


def test_solution_plan_checks(transport_run):
    _, report = transport_run
    assert is_solution(report.plan) and is_concurrent_plan(report.plan)
    assert not is_solution(empty_plan(report.plan.task))


def test_injected_threat_breaks_a_solution(transport_run):
    _, report = transport_run
    plan = report.plan
    link = next(l for l in sorted(plan.links) if l.fluent.var == fluent(plan.task, "at(t1)=ca").var
                and l.producer != INIT)
    clobber = next(a for a in plan.task.actions if a.name[0] == "drive" and
                   any(e.var == link.fluent.var and e.value != link.fluent.value for e in a.effects))
    broken, _ = plan.add(clobber, 0)
    assert threats(broken)
    assert not is_solution(broken)


def test_compose_unload_into_empty_plan(transport):
    unload = action(transport, "unload t1 p1 ca")
    goal = fluent(transport, "pos(p1)=ca")
    step = RefinementStep(0, (((0, 99), unload),), (), (CausalLink((0, 99), GOAL, goal),), (GOAL, goal))
    plan = compose(empty_plan(transport), step)
    assert len(plan.steps) == 3 and len(plan.links) == 1
    assert (GOAL, goal) not in open_goals(plan)


def test_compose_identity(pi00):
    plan, _ = pi00
    assert compose(plan, RefinementStep(0)) == plan


def test_compose_dangling(transport):
    goal = fluent(transport, "pos(p1)=ca")
    step = RefinementStep(0, (), (), (CausalLink((5, 5), GOAL, goal),))
    with pytest.raises(DanglingReference):
        compose(empty_plan(transport), step)


def test_compose_cycle(pi00):
    plan, load = pi00
    with pytest.raises(CycleError):
        compose(plan, RefinementStep(0, (), ((GOAL, load),)))


def test_view_hides_private_links(transport_run):
    pool, report = transport_run
    plan = report.plan
    for agent in pool.task.agents:
        v = view(plan, agent)
        assert set(v.steps) == set(plan.steps)
        assert all(agent.sees(l.fluent) for l in v.links)
        full = {(a, b) for a in plan.steps for b in plan.steps if plan.precedes(a, b)}
        assert view_precedes(v) == full


def test_view_of_pi00_is_complete(transport, pi00):
    plan, _ = pi00
    for agent in transport.agents:
        if agent.name == "ag3":
            continue
        assert view(plan, agent).links == plan.links


def test_view_by_sole_author(transport):
    task = load_task([(path("transport.pddl"), path("transportation3/tb.pddl"))])
    plan = linear_tb_plan(task)
    v = view(plan, task.agents[0])
    assert v.links == plan.links and v.orderings == plan.orderings


def test_makespan_linear_chain():
    task = load_task([(path("transport.pddl"), path("transportation3/tb.pddl"))])
    assert makespan_and_parallelism(linear_tb_plan(task)) == (4, 1)


def test_makespan_two_chains():
    pool = spawn(RunConfig(table4_pairs("Picture1"), verbosity=0))
    plan = run(pool).plan
    # one worker walks 6 steps, the other 5, side by side
    assert makespan_and_parallelism(plan) == (6, 2)


def test_makespan_rejects_non_solutions(transport):
    with pytest.raises(PlanError):
        makespan_and_parallelism(empty_plan(transport))


def test_makespan_of_picture2_fixture_plan():
    task = load_task(table4_pairs("Picture2"))
    plan = from_structured(open(path("picture2/plan.json")).read(), task)
    assert len(plan.real_steps) == 12
    assert makespan_and_parallelism(plan) == (8, 2)


def test_structured_round_trip(transport_run):
    _, report = transport_run
    text = to_structured(report.plan)
    again = from_structured(text, report.plan.task)
    assert again == report.plan
    assert to_structured(again) == text
    data = json.loads(text)
    assert list(data) == ["steps", "orderings", "links"]


def test_structured_rejects_unknown_action(transport):
    bad = json.dumps({"steps": [{"id": [0, 1], "action": "fly t1 ca", "owners": ["ag1"]}],
                      "orderings": [], "links": []})
    with pytest.raises(PlanError):
        from_structured(bad, transport)


def test_dot_export(transport, pi00):
    plan, _ = pi00
    dot = to_dot(plan)
    assert 'Init -> "load t1 p3 cA"' in dot
    assert 'label="at(t1)=cA"' in dot
    empty = to_dot(empty_plan(transport))
    nodes = [l for l in empty.splitlines() if "[shape=" in l]
    assert len(nodes) == 2


def test_dot_shapes_per_owner(transport_run):
    _, report = transport_run
    dot = to_dot(report.plan)
    shapes = {l.split("shape=")[1].split(",")[0].split("]")[0] for l in dot.splitlines()
              if "shape=" in l and "tooltip" in l}
    assert len(shapes) == 3


def test_schedule_respects_orderings(transport_run):
    _, report = transport_run
    plan = report.plan
    start = schedule(plan)
    for a, b in plan.orderings | {(l.producer, l.consumer) for l in plan.links}:
        if a in start and b in start:
            assert start[a] < start[b]


def test_steps_need_unique_ids(pi00):
    plan, load = pi00
    with pytest.raises(PlanError):
        plan.with_step(load, plan.steps[load])


def test_link_must_be_supported(transport, pi00):
    plan, load = pi00
    with pytest.raises(PlanError):
        plan.with_link(CausalLink(INIT, load, fluent(transport, "pos(p3)=cb")))


def test_plan_is_a_value(pi00):
    plan, load = pi00
    assert isinstance(plan, PartialPlan)
    before = (dict(plan.steps), plan.orderings, plan.links)
    plan.with_ordering(load, GOAL)
    assert (dict(plan.steps), plan.orderings, plan.links) == before
