"""Partial-order plans: steps, orderings and causal links, with their flaw calculus.

Plans are immutable; every modifier returns a new plan.  Reachability between real
steps is kept as one successor bitset per step and updated edge by edge.  The two
fictitious steps are implicit in the ordering: ``INIT`` precedes and ``GOAL``
follows every other step.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, NamedTuple

from .map_core import Effect, Fluent, GroundAction, MapTask, clobbers, supports

StepId = tuple  # (author agent id, counter)
INIT: StepId = (-1, 0)
GOAL: StepId = (-1, 1)
FICTITIOUS = (INIT, GOAL)


class PlanError(Exception):
    pass


class CycleError(PlanError):
    pass


class DanglingReference(PlanError):
    pass


class CausalLink(NamedTuple):
    producer: StepId
    consumer: StepId
    fluent: Fluent


class Threat(NamedTuple):
    step: StepId
    link: CausalLink


@dataclass(frozen=True)
class RefinementStep:
    """Steps, orderings and links one agent adds to a base plan to solve one goal.

    ``added_steps`` carries placeholder ids; ``compose`` maps them to fresh ones.
    """
    author: int
    added_steps: tuple = ()  # (placeholder StepId, GroundAction), ...
    added_orderings: tuple = ()  # (StepId, StepId), ...
    added_links: tuple = ()  # CausalLink, ...
    solved_goal: tuple | None = None  # (StepId, Fluent)


def init_action(task: MapTask) -> GroundAction:
    effects = tuple(sorted(Effect(f.var, f.value, f.positive) for f in task.init))
    return GroundAction(-1, ("init",), (), effects, frozenset())


def goal_action(task: MapTask) -> GroundAction:
    return GroundAction(-2, ("goal",), tuple(task.goals), (), frozenset())


class PartialPlan:
    __slots__ = ("task", "steps", "orderings", "links", "_index", "_reach", "_cache")

    def __init__(self, task: MapTask, steps: dict, orderings: frozenset, links: frozenset,
                 _index: dict | None = None, _reach: dict | None = None):
        self.task = task
        self.steps = steps  # StepId -> GroundAction, INIT and GOAL first
        self.orderings = orderings
        self.links = links
        self._cache: dict = {}  # derived facts; safe because plans never change
        if _index is None:
            self._index = {sid: i for i, sid in enumerate(steps)}
            self._reach = {sid: 0 for sid in steps}
            for a, b in sorted(set(orderings) | {(l.producer, l.consumer) for l in links}):
                self._add_edge(a, b)
        else:
            self._index, self._reach = _index, _reach

    # -- ordering queries

    def precedes(self, a: StepId, b: StepId) -> bool:
        """Strict transitive precedence a < b."""
        if a == b:
            return False
        if a == INIT or b == GOAL:
            return True
        if b == INIT or a == GOAL:
            return False
        return bool(self._reach[a] >> self._index[b] & 1)

    def ordered(self, a: StepId, b: StepId) -> bool:
        return self.precedes(a, b) or self.precedes(b, a)

    def _add_edge(self, a: StepId, b: StepId) -> None:
        for s in (a, b):
            if s not in self.steps:
                raise DanglingReference(f"ordering refers to unknown step {s}")
        if a == b or b == INIT or a == GOAL or self.precedes(b, a):
            raise CycleError(f"ordering {a} < {b} introduces a cycle")
        if a == INIT or b == GOAL:
            return
        ia, new = self._index[a], (1 << self._index[b]) | self._reach[b]
        for s, bits in self._reach.items():
            if s == a or bits >> ia & 1:
                self._reach[s] = bits | new

    # -- modifiers (return new plans)

    def _copy(self, steps=None, orderings=None, links=None) -> "PartialPlan":
        return PartialPlan(self.task, self.steps if steps is None else steps,
                           self.orderings if orderings is None else orderings,
                           self.links if links is None else links,
                           dict(self._index), dict(self._reach))

    def with_step(self, sid: StepId, action: GroundAction) -> "PartialPlan":
        if sid in self.steps:
            raise PlanError(f"step id {sid} already in use")
        steps = dict(self.steps)
        steps[sid] = action
        out = self._copy(steps=steps)
        out._index[sid] = len(out._index)
        out._reach[sid] = 0
        return out

    def with_ordering(self, a: StepId, b: StepId) -> "PartialPlan":
        out = self._copy(orderings=self.orderings | {(a, b)})
        out._add_edge(a, b)
        return out

    def with_link(self, link: CausalLink) -> "PartialPlan":
        for s in (link.producer, link.consumer):
            if s not in self.steps:
                raise DanglingReference(f"causal link refers to unknown step {s}")
        is_bool = self.task.is_boolean(link.fluent.var)
        if not any(supports(e, link.fluent, is_bool) for e in self.steps[link.producer].effects):
            raise PlanError(f"{self.label(link.producer)} does not produce {self.task.format(link.fluent)}")
        if link.fluent not in self.steps[link.consumer].pre:
            raise PlanError(f"{self.task.format(link.fluent)} is not a precondition of {self.label(link.consumer)}")
        if (link.consumer, link.fluent) not in open_goals(self):
            raise PlanError(f"{self.task.format(link.fluent)} at {self.label(link.consumer)} is not open")
        out = self._copy(links=self.links | {link})
        out._add_edge(link.producer, link.consumer)
        return out

    def fresh_id(self, author: int) -> StepId:
        return (author, 1 + max((c for a, c in self.steps if a == author), default=0))

    def add(self, action: GroundAction, author: int | None = None) -> tuple["PartialPlan", StepId]:
        """Append an action under a fresh id for ``author`` (its lowest owner by default)."""
        if author is None:
            author = min(action.owners) if action.owners else 0
        sid = self.fresh_id(author)
        return self.with_step(sid, action), sid

    # -- misc

    @property
    def real_steps(self) -> list:
        return [s for s in self.steps if s not in FICTITIOUS]

    def label(self, sid: StepId) -> str:
        if sid == INIT:
            return "Init"
        if sid == GOAL:
            return "Goal"
        return self.task.action_label(self.steps[sid])

    def key(self) -> tuple:
        """Structural identity, independent of step ids."""
        if "key" not in self._cache:
            self._cache["key"] = self._key()
        return self._cache["key"]

    def _key(self) -> tuple:
        ids = {s: a.id for s, a in self.steps.items()}
        if len(set(ids.values())) == len(ids):  # no repeated action: the action id is the rank
            return (frozenset(ids.values()),
                    frozenset((ids[a], ids[b]) for a, b in self.orderings),
                    frozenset((ids[l.producer], ids[l.consumer], l.fluent) for l in self.links))
        names = {s: (self.steps[s].id, self.steps[s].owners) for s in self.steps}
        count: dict = {}
        rank = {}
        for s in sorted(self.steps, key=lambda s: (names[s][0], s)):
            rank[s] = (names[s][0], count.setdefault(names[s][0], 0))
            count[names[s][0]] += 1
        return (frozenset(rank.values()),
                frozenset((rank[a], rank[b]) for a, b in self.orderings),
                frozenset((rank[l.producer], rank[l.consumer], l.fluent) for l in self.links))

    def __eq__(self, other) -> bool:
        return isinstance(other, PartialPlan) and self.steps == other.steps and \
            self.orderings == other.orderings and self.links == other.links

    def __hash__(self) -> int:
        return hash((frozenset(self.steps.items()), self.orderings, self.links))

    def __repr__(self) -> str:
        return f"PartialPlan({len(self.real_steps)} steps, {len(self.orderings)} orderings, {len(self.links)} links)"


def empty_plan(task: MapTask) -> PartialPlan:
    if not task.goals:
        raise PlanError("the task has no goals")
    steps = {INIT: init_action(task), GOAL: goal_action(task)}
    return PartialPlan(task, steps, frozenset({(INIT, GOAL)}), frozenset())


# ---------------------------------------------------------------- flaws

def open_goals(plan: PartialPlan) -> list:
    """(step, precondition) pairs without an incoming causal link."""
    if "open" in plan._cache:
        return list(plan._cache["open"])
    linked = {(l.consumer, l.fluent) for l in plan.links}
    out = [(sid, p) for sid, act in plan.steps.items() for p in act.pre if (sid, p) not in linked]
    plan._cache["open"] = tuple(out)
    return out


def _clobber_ids(plan: PartialPlan, f: Fluent) -> frozenset:
    """Ids of the task's actions (and Init) with an effect that destroys ``f``; memoized per task."""
    task = plan.task
    hit = task._clobberers.get(f)
    if hit is None:
        is_bool = task.is_boolean(f.var)
        acts = [init_action(task), *task.actions]
        hit = task._clobberers[f] = frozenset(
            a.id for a in acts if any(clobbers(e, f, is_bool) for e in a.effects))
    return hit


def threats(plan: PartialPlan) -> list:
    """Steps that can destroy a causal link and are not ordered around it."""
    if "threats" in plan._cache:
        return list(plan._cache["threats"])
    by_action: dict = {}
    for sid, act in plan.steps.items():
        by_action.setdefault(act.id, []).append(sid)
    present = by_action.keys()
    precedes = plan.precedes
    out = []
    for link in sorted(plan.links):
        ids = _clobber_ids(plan, link.fluent)
        hits = [sid for aid in ids & present for sid in by_action[aid]]
        if len(hits) > 1:
            hits.sort(key=plan._index.__getitem__)
        for sid in hits:
            if sid != link.producer and sid != link.consumer \
                    and not precedes(sid, link.producer) and not precedes(link.consumer, sid):
                out.append(Threat(sid, link))
    plan._cache["threats"] = tuple(out)
    return out


def threats_to(plan: PartialPlan, link: CausalLink) -> list:
    return [t for t in threats(plan) if t.link == link]


def threats_by(plan: PartialPlan, sid: StepId) -> list:
    return [t for t in threats(plan) if t.step == sid]


def resolve_threat(plan: PartialPlan, threat: Threat, mode: str) -> PartialPlan:
    """``promotion`` puts the threat before the producer, ``demotion`` after the consumer."""
    if threat not in threats(plan):
        raise PlanError("the plan has no such threat")
    if mode == "promotion":
        return plan.with_ordering(threat.step, threat.link.producer)
    if mode == "demotion":
        return plan.with_ordering(threat.link.consumer, threat.step)
    raise ValueError(f"unknown threat resolution mode '{mode}'")


# ---------------------------------------------------------------- concurrency

Visibility = Callable[[int, str], bool]


def _everything(var: int, value: str) -> bool:
    return True


def violated_clauses(a: GroundAction, b: GroundAction, visible: Visibility = _everything) -> set:
    """Which of the three clash conditions hold between a and b, in either direction."""
    out = set()
    for x, y in ((a, b), (b, a)):
        for e in x.effects:
            if not e.assign or not visible(e.var, e.value):
                continue
            # 1: an assignment against a precondition of the other action
            for p in y.pre:
                if p.var == e.var and ((p.positive and p.value != e.value) or (not p.positive and p.value == e.value)):
                    out.add(1)
            # 2: two assignments (or an assignment and a denial) of the same variable
            for g in y.effects:
                if g.var == e.var and ((g.assign and g.value != e.value) or (not g.assign and g.value == e.value)):
                    out.add(2)
        # 3: incompatible preconditions
        for p in x.pre:
            if not p.positive or not visible(p.var, p.value):
                continue
            for q in y.pre:
                if q.var == p.var and ((q.positive and q.value != p.value) or (not q.positive and q.value == p.value)):
                    out.add(3)
    return out


def mutually_consistent(a: GroundAction, b: GroundAction, visible: Visibility = _everything) -> bool:
    return not violated_clauses(a, b, visible)


def is_public_action(task: MapTask, action: GroundAction) -> bool:
    if action.is_fictitious:
        return False
    if len(action.owners) > 1:
        return True
    return any(task.is_public_var(f.var) for f in action.pre) or \
        any(task.is_public_var(e.var) for e in action.effects)


def _consistency_clashes(plan: PartialPlan, only_public: bool, only_supported: bool) -> Iterator[tuple]:
    task = plan.task
    pending = {sid for sid, _ in open_goals(plan)}
    cands = [s for s in plan.real_steps
             if (not only_public or is_public_action(task, plan.steps[s]))
             and (not only_supported or s not in pending)]
    for i, s in enumerate(cands):
        for t in cands[i + 1:]:
            if plan.ordered(s, t):
                continue
            a, b = plan.steps[s], plan.steps[t]
            visible = task.shared_visible(a.owners, b.owners)
            if not mutually_consistent(a, b, visible):
                yield s, t


def concurrency_clashes(plan: PartialPlan) -> list:
    """Unordered, fully supported public step pairs that are not mutually consistent."""
    return list(_consistency_clashes(plan, True, True))


def is_concurrent_plan(plan: PartialPlan) -> bool:
    return next(_consistency_clashes(plan, True, True), None) is None


def is_solution(plan: PartialPlan) -> bool:
    if open_goals(plan) or threats(plan):
        return False
    return next(_consistency_clashes(plan, False, False), None) is None


# ---------------------------------------------------------------- composition

def compose(base: PartialPlan, step: RefinementStep) -> PartialPlan:
    """Add a refinement step to a base plan, giving its new steps fresh ids."""
    plan = base
    remap: dict = {}
    for placeholder, action in step.added_steps:
        if placeholder in remap:
            raise PlanError(f"placeholder {placeholder} used twice")
        plan, sid = plan.add(action, step.author)
        remap[placeholder] = sid

    def resolve(s: StepId) -> StepId:
        s = tuple(s)
        if s in remap:
            return remap[s]
        if s in base.steps:
            return s
        raise DanglingReference(f"refinement refers to unknown step {s}")

    for a, b in step.added_orderings:
        plan = plan.with_ordering(resolve(a), resolve(b))
    for link in step.added_links:
        plan = plan.with_link(CausalLink(resolve(link.producer), resolve(link.consumer), link.fluent))
    return plan


# ---------------------------------------------------------------- views

@dataclass(frozen=True)
class ViewStep:
    label: str
    owners: frozenset
    pre: tuple
    effects: tuple


@dataclass(frozen=True)
class PlanView:
    """What one agent can see of a plan: every step, fewer links, no hidden fluents."""
    observer: int
    steps: dict = field(hash=False)  # StepId -> ViewStep
    orderings: frozenset = frozenset()
    links: frozenset = frozenset()
    open_goals: tuple = ()


def view(plan: PartialPlan, observer) -> PlanView:
    """Occlude links and fluents the observer cannot see; hidden links become orderings."""
    steps = {}
    for sid, act in plan.steps.items():
        steps[sid] = ViewStep(plan.label(sid), act.owners,
                              tuple(p for p in act.pre if observer.sees(p)),
                              tuple(e for e in act.effects if observer.sees_effect(e)))
    links = frozenset(l for l in plan.links if observer.sees(l.fluent))
    hidden = {(l.producer, l.consumer) for l in plan.links if l not in links}
    goals = tuple(g for g in open_goals(plan) if observer.sees(g[1]))
    return PlanView(observer.id, steps, frozenset(plan.orderings | hidden), links, goals)


def view_precedes(v: PlanView) -> set:
    """Transitive closure of a view's ordering relation (links included)."""
    succ: dict = {}
    for a, b in set(v.orderings) | {(l.producer, l.consumer) for l in v.links}:
        succ.setdefault(a, set()).add(b)
    for s in v.steps:
        if s not in FICTITIOUS:
            succ.setdefault(INIT, set()).add(s)
            succ.setdefault(s, set()).add(GOAL)
    closure = set()
    for s in v.steps:
        stack, seen = list(succ.get(s, ())), set()
        while stack:
            t = stack.pop()
            if t not in seen:
                seen.add(t)
                stack.extend(succ.get(t, ()))
        closure.update((s, t) for t in seen)
    return closure


# ---------------------------------------------------------------- schedule

def schedule(plan: PartialPlan) -> dict:
    """Earliest unit-duration start time of every real step."""
    preds: dict = {s: set() for s in plan.real_steps}
    for a, b in set(plan.orderings) | {(l.producer, l.consumer) for l in plan.links}:
        if a in preds and b in preds:
            preds[b].add(a)
    succ: dict = {s: [] for s in preds}
    for b, ps in preds.items():
        for a in ps:
            succ[a].append(b)
    indeg = {s: len(ps) for s, ps in preds.items()}
    start = {s: 0 for s in preds}
    ready = [s for s, d in indeg.items() if d == 0]
    while ready:
        s = ready.pop()
        for t in succ[s]:
            start[t] = max(start[t], start[s] + 1)
            indeg[t] -= 1
            if indeg[t] == 0:
                ready.append(t)
    return start


def makespan_and_parallelism(plan: PartialPlan) -> tuple[int, int]:
    if not is_solution(plan):
        raise PlanError("makespan is only defined for solution plans")
    start = schedule(plan)
    if not start:
        return 0, 0
    counts: dict = {}
    for t in start.values():
        counts[t] = counts.get(t, 0) + 1
    return max(start.values()) + 1, max(counts.values())


# ---------------------------------------------------------------- serialization

_TERM = re.compile(r"^([^(]+)\(([^)]*)\)(?:@([^=!]+))?(!=|=)(.+)$")


def fluent_key(task: MapTask, f: Fluent) -> str:
    var = task.table[f.var]
    scope = f"@{var.scope}" if var.scope else ""
    return f"{var.term}{scope}{'=' if f.positive else '!='}{f.value}"


def parse_fluent_key(task: MapTask, text: str) -> Fluent:
    m = _TERM.match(text.strip().lower())
    if not m:
        raise PlanError(f"malformed fluent '{text}'")
    head, args, scope, op, value = m.groups()
    vid = task.table.lookup(head, tuple(a.strip() for a in args.split(",") if a.strip()), scope)
    if vid is None:
        raise PlanError(f"unknown variable in '{text}'")
    if value not in task.table[vid].domain:
        raise PlanError(f"'{value}' is not a value of {task.table.term(vid)}")
    return Fluent(vid, value, op == "=")


def _agent_names(task: MapTask, owners) -> list:
    return sorted(task.agent(i).name for i in owners)


def to_structured(plan: PartialPlan) -> str:
    """JSON text with stable key order: steps, orderings, links."""
    task = plan.task
    doc = {
        "steps": [{"id": list(s), "action": " ".join(plan.steps[s].name),
                   "owners": _agent_names(task, plan.steps[s].owners)} for s in plan.real_steps],
        "orderings": sorted([list(a), list(b)] for a, b in plan.orderings),
        "links": sorted(({"producer": list(l.producer), "consumer": list(l.consumer),
                          "fluent": fluent_key(task, l.fluent)} for l in plan.links),
                        key=lambda d: (d["producer"], d["consumer"], d["fluent"])),
    }
    parts = []
    for key, items in doc.items():
        body = ",\n".join("  " + json.dumps(x) for x in items)
        parts.append(f' "{key}": [\n{body}\n ]' if items else f' "{key}": []')
    return "{\n" + ",\n".join(parts) + "\n}\n"


def from_structured(text: str, task: MapTask) -> PartialPlan:
    doc = json.loads(text)
    by_name: dict = {}
    for act in task.actions:
        by_name.setdefault(" ".join(act.name), []).append(act)
    plan = empty_plan(task)
    for entry in doc.get("steps", []):
        cands = by_name.get(entry["action"].lower(), [])
        if "owners" in entry:
            cands = [a for a in cands if _agent_names(task, a.owners) == sorted(entry["owners"])]
        if not cands:
            raise PlanError(f"no ground action matches '{entry['action']}'")
        if len(cands) > 1:
            raise PlanError(f"action '{entry['action']}' is ambiguous; give its owners")
        plan = plan.with_step(tuple(entry["id"]), cands[0])
    for a, b in doc.get("orderings", []):
        if (tuple(a), tuple(b)) != (INIT, GOAL):
            plan = plan.with_ordering(tuple(a), tuple(b))
    for entry in doc.get("links", []):
        plan = plan.with_link(CausalLink(tuple(entry["producer"]), tuple(entry["consumer"]),
                                         parse_fluent_key(task, entry["fluent"])))
    return plan


SHAPES = ("box", "ellipse", "diamond", "hexagon", "octagon", "parallelogram", "trapezium", "house")


def to_dot(plan: PartialPlan) -> str:
    """Graphviz text: one shape per owning agent, solid causal links, dashed orderings."""
    task = plan.task
    names, used = {}, set()
    for sid in plan.steps:
        base = plan.label(sid)
        name, n = base, 2
        while name in used:
            name, n = f"{base} #{n}", n + 1
        used.add(name)
        names[sid] = name

    def q(s: str) -> str:
        return '"' + s.replace('"', '\\"') + '"'

    lines = ["digraph plan {", "  rankdir=LR;"]
    lines.append(f"  Init [shape=circle];")
    lines.append(f"  Goal [shape=doublecircle];")
    for sid in plan.real_steps:
        owners = sorted(plan.steps[sid].owners)
        shape = SHAPES[owners[0] % len(SHAPES)] if owners else "plaintext"
        who = ",".join(task.objects.show(task.agent(i).name) for i in owners)
        lines.append(f"  {q(names[sid])} [shape={shape}, tooltip={q(who)}];")

    def node(sid):
        return names[sid] if sid in FICTITIOUS else q(names[sid])

    for l in sorted(plan.links):
        lines.append(f"  {node(l.producer)} -> {node(l.consumer)} [label={q(task.format(l.fluent))}];")
    for a, b in sorted(plan.orderings):
        lines.append(f"  {node(a)} -> {node(b)} [style=dashed];")
    lines.append("}")
    return "\n".join(lines) + "\n"
