"""Ground per-agent inputs into variables, fluents, actions and agent models.

Predicates become boolean variables with domain ``("true", "false")``; for those a
negative fluent is always stored in canonical form as the positive fluent of the
other value.  Variables whose term no agent is allowed to share are private: each
agent gets its own copy, told apart by ``Variable.scope``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Mapping, NamedTuple, Sequence

from .lang_parser import DomainModel, Formula, SharePattern, TypeTable, ValidatedAgentInput, format_formula

TRUE, FALSE = "true", "false"
BOOLEAN = (TRUE, FALSE)


class GroundingError(Exception):
    pass


class InconsistentState(Exception):
    pass


class PreconditionViolated(Exception):
    pass


class Fluent(NamedTuple):
    var: int
    value: str
    positive: bool = True


class Effect(NamedTuple):
    var: int
    value: str
    assign: bool = True  # False means "deny": v != value


@dataclass(frozen=True)
class Variable:
    id: int
    head: str
    args: tuple
    domain: tuple
    scope: str | None = None  # owning agent for private variables

    @property
    def is_boolean(self) -> bool:
        return self.domain == BOOLEAN

    @property
    def term(self) -> str:
        return f"{self.head}({','.join(self.args)})"


class VariableTable:
    """Interns variables to dense ids shared by every agent of a task."""

    def __init__(self) -> None:
        self._ids: dict[tuple, int] = {}
        self._keys: list[tuple] = []
        self._domains: list[list[str]] = []

    def intern(self, head: str, args: tuple, scope: str | None, values: Iterable[str]) -> int:
        key = (head, tuple(args), scope)
        vid = self._ids.get(key)
        if vid is None:
            vid = len(self._keys)
            self._ids[key] = vid
            self._keys.append(key)
            self._domains.append([])
        dom = self._domains[vid]
        for v in values:
            if v not in dom:
                dom.append(v)
        return vid

    def lookup(self, head: str, args: tuple, scope: str | None) -> int | None:
        return self._ids.get((head, tuple(args), scope))

    def __len__(self) -> int:
        return len(self._keys)

    def __getitem__(self, vid: int) -> Variable:
        head, args, scope = self._keys[vid]
        dom = self._domains[vid]
        domain = BOOLEAN if set(dom) == set(BOOLEAN) else tuple(dom)
        return Variable(vid, head, args, domain, scope)

    def __iter__(self) -> Iterator[Variable]:
        return (self[i] for i in range(len(self)))

    def is_boolean(self, vid: int) -> bool:
        return set(self._domains[vid]) == set(BOOLEAN)

    def fluent(self, vid: int, value: str, positive: bool = True) -> Fluent:
        if not positive and self.is_boolean(vid):
            return Fluent(vid, FALSE if value == TRUE else TRUE, True)
        return Fluent(vid, value, positive)

    def term(self, vid: int) -> str:
        head, args, _ = self._keys[vid]
        return f"{head}({','.join(args)})"

    def format(self, f: Fluent, display: Mapping[str, str] | None = None) -> str:
        show = (lambda s: display.get(s, s)) if display else (lambda s: s)
        head, args, _ = self._keys[f.var]
        term = f"{head}({','.join(show(a) for a in args)})"
        return f"{term}{'=' if f.positive else '!='}{show(f.value)}"


@dataclass(frozen=True)
class GroundAction:
    id: int
    name: tuple  # (schema, arg, ...)
    pre: tuple  # Fluent, ...
    effects: tuple  # Effect, ...
    owners: frozenset = frozenset()

    @property
    def label(self) -> str:
        return " ".join(self.name)

    @property
    def is_fictitious(self) -> bool:
        return not self.owners


@dataclass(frozen=True)
class CompiledPattern:
    head: str
    arg_types: tuple  # per argument: TypeUnion, or ("=", constant)
    result: tuple | None
    recipients: frozenset | None


@dataclass
class AgentModel:
    id: int
    name: str
    domains: dict  # var id -> visible values (D^i_v)
    actions: tuple
    init: frozenset
    share_patterns: tuple
    private_goals: tuple
    global_goals: tuple
    types: TypeTable
    table: VariableTable
    display: dict = field(default_factory=dict)

    @property
    def variables(self) -> frozenset:
        return frozenset(self.domains)

    def sees(self, f: Fluent) -> bool:
        dom = self.domains.get(f.var)
        return dom is not None and f.value in dom

    def sees_effect(self, e: Effect) -> bool:
        dom = self.domains.get(e.var)
        return dom is not None and e.value in dom


# ---------------------------------------------------------------- state semantics

def _is_bool_domain(domain: Sequence[str]) -> bool:
    return len(domain) == 2 and set(domain) == set(BOOLEAN)


def check_consistent(state: Iterable[Fluent]) -> None:
    positive: dict[int, str] = {}
    negative: set[tuple[int, str]] = set()
    for f in state:
        if f.positive:
            if positive.setdefault(f.var, f.value) != f.value:
                raise InconsistentState(f"variable {f.var} has two values")
        else:
            negative.add((f.var, f.value))
    for var, value in positive.items():
        if (var, value) in negative:
            raise InconsistentState(f"variable {var} both is and is not {value}")


def negative_closure(state: Iterable[Fluent], domains: Mapping[int, Sequence[str]]) -> frozenset:
    """Add <v, not d'> for every other visible value d' of each positive <v, d>."""
    out = set(state)
    for f in list(out):
        if f.positive:
            dom = domains.get(f.var, ())
            if _is_bool_domain(dom):
                continue
            out.update(Fluent(f.var, d, False) for d in dom if d != f.value)
    check_consistent(out)
    return frozenset(out)


def holds(f: Fluent, closed_state: frozenset) -> bool:
    return f in closed_state


def apply_effects(state: Iterable[Fluent], action: GroundAction, domains: Mapping[int, Sequence[str]]) -> frozenset:
    """Successor state under open-world semantics; raises PreconditionViolated."""
    closed = negative_closure(state, domains)
    for p in action.pre:
        if p not in closed:
            raise PreconditionViolated(f"{action.label}: precondition {p} does not hold")
    out = set(closed)
    for e in action.effects:
        dom = domains.get(e.var, ())
        if e.assign:
            out = {f for f in out if f.var != e.var}
            out.add(Fluent(e.var, e.value, True))
            if not _is_bool_domain(dom):
                out.update(Fluent(e.var, d, False) for d in dom if d != e.value)
        elif _is_bool_domain(dom):
            other = FALSE if e.value == TRUE else TRUE
            out = {f for f in out if f.var != e.var}
            out.add(Fluent(e.var, other, True))
        else:
            if Fluent(e.var, e.value, True) in out:
                out = {f for f in out if f.var != e.var}
            out.add(Fluent(e.var, e.value, False))
    check_consistent(out)
    return frozenset(out)


def relaxed_effects(action: GroundAction, domains: Mapping[int, Sequence[str]]) -> Iterator[Fluent]:
    """Fluents an action makes true, including the negatives implied by assignments."""
    for e in action.effects:
        dom = domains.get(e.var, ())
        if _is_bool_domain(dom):
            value = e.value if e.assign else (FALSE if e.value == TRUE else TRUE)
            yield Fluent(e.var, value, True)
        elif e.assign:
            yield Fluent(e.var, e.value, True)
            for d in dom:
                if d != e.value:
                    yield Fluent(e.var, d, False)
        else:
            yield Fluent(e.var, e.value, False)


def supports(e: Effect, f: Fluent, is_boolean: bool) -> bool:
    """Whether effect ``e`` can be the producer of a causal link on ``f``."""
    if e.var != f.var:
        return False
    if is_boolean:
        produced = e.value if e.assign else (FALSE if e.value == TRUE else TRUE)
        return produced == f.value
    if f.positive:
        return e.assign and e.value == f.value
    return (not e.assign and e.value == f.value) or (e.assign and e.value != f.value)


def clobbers(e: Effect, f: Fluent, is_boolean: bool) -> bool:
    """Whether effect ``e`` destroys fluent ``f`` (the threat condition)."""
    if e.var != f.var:
        return False
    if is_boolean:
        produced = e.value if e.assign else (FALSE if e.value == TRUE else TRUE)
        return produced != f.value
    if f.positive:
        return (e.assign and e.value != f.value) or (not e.assign and e.value == f.value)
    return e.assign and e.value == f.value


# ---------------------------------------------------------------- sharing

def compile_pattern(p: SharePattern) -> CompiledPattern:
    arg_types = tuple(("=", name) if not name.startswith("?") else t for name, t in p.params)
    return CompiledPattern(p.name, arg_types, p.result,
                           None if p.recipients is None else frozenset(p.recipients))


def pattern_matches_term(pattern: CompiledPattern, var: Variable, types: TypeTable) -> bool:
    """Match the variable term only, ignoring the value."""
    if pattern.head != var.head:
        return False
    args = var.args
    if pattern.result is not None and var.is_boolean and len(args) == len(pattern.arg_types) + 1:
        args = args[:-1]  # boolean expansion of a multi-function
    if len(args) != len(pattern.arg_types):
        return False
    for spec, arg in zip(pattern.arg_types, args):
        if spec[0] == "=" and len(spec) == 2 and spec[1] == arg:
            continue
        if spec[0] == "=" or not types.satisfies(arg, spec):
            return False
    return True


def _pattern_matches(pattern: CompiledPattern, var: Variable, value: str, types: TypeTable) -> bool:
    if not pattern_matches_term(pattern, var, types):
        return False
    if pattern.result is None:
        return var.is_boolean
    if var.is_boolean and len(var.args) == len(pattern.arg_types) + 1:
        return types.satisfies(var.args[-1], pattern.result)
    return types.satisfies(value, pattern.result)


def is_shareable(fluent: Fluent, sender: AgentModel, to: str) -> bool:
    """True iff one of the sender's share patterns covers the fluent for recipient ``to``."""
    if to == sender.name or fluent.var not in sender.domains:
        return False
    var = sender.table[fluent.var]
    for pattern in sender.share_patterns:
        if pattern.recipients is not None and to not in pattern.recipients:
            continue
        if _pattern_matches(pattern, var, fluent.value, sender.types):
            return True
    return False


# ---------------------------------------------------------------- grounding

class ObjectTable:
    """Objects of every agent with their types and original spellings."""

    def __init__(self) -> None:
        self.types: dict[str, str] = {}
        self.display: dict[str, str] = {}

    def add(self, name: str, type_name: str, display: str | None = None) -> None:
        if self.types.setdefault(name, type_name) != type_name:
            raise GroundingError(f"object '{name}' declared with types '{self.types[name]}' and '{type_name}'")
        self.display.setdefault(name, display or name)

    def show(self, name: str) -> str:
        return self.display.get(name, name)


def _term_values(inp: ValidatedAgentInput) -> Iterator[tuple[str, tuple, tuple]]:
    """All (head, args, visible values) state variables of one agent."""
    dom, types = inp.domain, inp.types

    def tuples(params):
        return itertools.product(*[types.members(t) for _, t in params])

    for p in dom.predicates:
        for args in tuples(p.params):
            yield p.name, args, BOOLEAN
    for f in dom.functions:
        values = tuple(types.members(f.result))
        for args in tuples(f.params):
            yield f.name, args, values
    for f in dom.multi_functions:
        for args in tuples(f.params):
            for member in types.members(f.result):
                yield f.name, args + (member,), BOOLEAN


def public_terms(inputs: Sequence[ValidatedAgentInput]) -> set[tuple[str, tuple]]:
    """Terms matched by at least one agent's share pattern toward some other agent."""
    out: set[tuple[str, tuple]] = set()
    names = [inp.problem.name for inp in inputs]
    for inp in inputs:
        patterns = [compile_pattern(p) for p in inp.problem.shared_data]
        patterns = [p for p in patterns
                    if p.recipients is None or any(r != inp.problem.name for r in p.recipients)]
        if not patterns or len(names) < 2:
            continue
        for head, args, values in _term_values(inp):
            var = Variable(-1, head, args, values)
            if any(pattern_matches_term(p, var, inp.types) for p in patterns):
                out.add((head, args))
    return out


def ground(inp: ValidatedAgentInput, objects: ObjectTable, table: VariableTable | None = None,
           public: Callable[[str, tuple], bool] | None = None, agent_id: int = 0) -> AgentModel:
    """Ground one agent's validated input against the shared variable table."""
    table = table if table is not None else VariableTable()
    is_public = public or (lambda head, args: False)
    name = inp.problem.name
    for obj, t in inp.types.objects.items():
        objects.add(obj, t, inp.problem.display.get(obj))

    domains: dict[int, tuple] = {}
    terms: dict[tuple, int] = {}
    for head, args, values in _term_values(inp):
        scope = None if is_public(head, args) else name
        vid = table.intern(head, args, scope, values)
        domains[vid] = values
        terms[(head, args)] = vid
    for vid, values in domains.items():
        if not values:
            raise GroundingError(f"{name}: variable {table.term(vid)} has an empty value domain")

    def var_of(head: str, args: tuple) -> int:
        vid = terms.get((head, tuple(args)))
        if vid is None:
            raise GroundingError(f"{name}: unknown state variable {head}({','.join(args)})")
        return vid

    init: set[Fluent] = set()
    for lit in inp.problem.init:
        if lit.kind == "predicate":
            init.add(Fluent(var_of(lit.name, lit.args), FALSE if lit.negated else TRUE))
        elif lit.kind == "function":
            vid = var_of(lit.name, lit.args)
            if lit.value not in domains[vid]:
                raise GroundingError(f"{name}: value '{lit.value}' outside the domain of {table.term(vid)}")
            init.add(table.fluent(vid, lit.value, not lit.negated))
        else:
            for member in lit.value:
                init.add(Fluent(var_of(lit.name, lit.args + (member,)), FALSE if lit.negated else TRUE))
    try:
        check_consistent(negative_closure(init, domains))
    except InconsistentState as exc:
        raise GroundingError(f"{name}: inconsistent initial state ({exc})") from exc

    closed_init = negative_closure(init, domains)
    static_heads = _static_heads(inp.domain)
    actions = []
    for schema in inp.domain.action_schemas:
        actions.extend(_ground_schema(schema, inp, table, var_of, domains, static_heads, closed_init))

    goals = _goal_fluents(inp.problem.global_goal, table, var_of, name)
    private = _goal_fluents(inp.problem.private_goal, table, var_of, name)
    display = dict(inp.problem.display)
    return AgentModel(
        id=agent_id, name=name, domains=domains, actions=tuple(actions), init=frozenset(init),
        share_patterns=tuple(compile_pattern(p) for p in inp.problem.shared_data),
        private_goals=tuple(private), global_goals=tuple(goals), types=inp.types, table=table,
        display=display)


def _static_heads(domain: DomainModel) -> set[str]:
    assigned: set[str] = set()

    def walk(f):
        if not isinstance(f, tuple) or not f:
            return
        if f[0] in ("and", "not"):
            for sub in f[1:]:
                walk(sub)
        elif f[0] in ("assign", "="):
            if isinstance(f[1], tuple):
                assigned.add(f[1][0])
        else:
            assigned.add(f[0])

    for schema in domain.action_schemas:
        walk(schema.effect)
    heads = {p.name for p in domain.predicates} | {f.name for f in domain.functions + domain.multi_functions}
    return heads - assigned


def _conjuncts(f: Formula) -> list:
    if not f:
        return []
    if f[0] == "and":
        out = []
        for sub in f[1:]:
            out.extend(_conjuncts(sub))
        return out
    return [f]


def _ground_schema(schema, inp: ValidatedAgentInput, table: VariableTable, var_of, domains, static_heads,
                   closed_init) -> Iterator[GroundAction]:
    types = inp.types
    params = [p for p, _ in schema.params]
    candidates = [types.members(t) for _, t in schema.params]
    pre_lits = _conjuncts(schema.precondition)
    eff_lits = _conjuncts(schema.effect)
    for lit in pre_lits + eff_lits:
        if lit[0] == "or":
            raise GroundingError(f"action '{schema.name}': disjunctive conditions are not supported")

    def lit_vars(lit) -> set[str]:
        out = set()

        def walk(x):
            if isinstance(x, str):
                if x.startswith("?"):
                    out.add(x)
            else:
                for y in x:
                    walk(y)
        walk(lit)
        return out

    # static literals are checked as soon as their parameters are bound
    checks: list[list] = [[] for _ in params]
    static_lits: list = []
    for lit in pre_lits:
        core = lit[1] if lit[0] == "not" else lit
        static = core[0] == "=" and not isinstance(core[1], tuple)  # parameter (in)equality
        if not static:
            head = core[1][0] if core[0] in ("=", "member") else core[0]
            static = head in static_heads
        if static:
            static_lits.append(lit)
            needed = lit_vars(lit)
            if params:
                checks[max((params.index(v) for v in needed), default=0)].append(lit)

    def subst(x, binding):
        if isinstance(x, str):
            return binding.get(x, x)
        return tuple(subst(y, binding) for y in x)

    def to_fluent(lit, binding) -> Fluent | None | bool:
        """Fluent for a precondition literal; True/False for equality tests; None if ill-typed."""
        negated = lit[0] == "not"
        core = subst(lit[1] if negated else lit, binding)
        if core[0] == "=" and not isinstance(core[1], tuple):
            return (core[1] == core[2]) != negated
        if core[0] == "=":
            vid = var_of(core[1][0], core[1][1:])
            if core[2] not in domains[vid]:
                return None
            return table.fluent(vid, core[2], not negated)
        if core[0] == "member":
            key = core[1][1:] + (core[2],)
            try:
                vid = var_of(core[1][0], key)
            except GroundingError:
                return None
            return Fluent(vid, FALSE if negated else TRUE)
        vid = var_of(core[0], core[1:])
        return Fluent(vid, FALSE if negated else TRUE)

    def static_ok(lit, binding) -> bool:
        f = to_fluent(lit, binding)
        if isinstance(f, bool):
            return f
        return f is not None and f in closed_init

    def bindings(i: int, binding: dict) -> Iterator[dict]:
        if i == len(params):
            yield dict(binding)
            return
        for obj in candidates[i]:
            binding[params[i]] = obj
            if all(static_ok(lit, binding) for lit in checks[i]):
                yield from bindings(i + 1, binding)
            del binding[params[i]]

    for binding in bindings(0, {}):
        pre: list[Fluent] = []
        ok = True
        for lit in pre_lits:
            f = to_fluent(lit, binding)
            if f is None or f is False:
                ok = False
                break
            if f is True:
                continue
            if f not in pre:
                pre.append(f)
        if not ok or not all(static_ok(lit, binding) for lit in static_lits):
            continue
        effects: list[Effect] = []
        assigned: set[int] = set()
        for lit in eff_lits:
            eff = _to_effect(subst(lit, binding), var_of, domains)
            if eff is None:
                ok = False
                break
            if eff.assign:
                if eff.var in assigned:
                    ok = False
                    break
                assigned.add(eff.var)
            effects.append(eff)
        if not ok:
            continue
        name = (schema.name,) + tuple(binding[p] for p in params)
        yield GroundAction(-1, name, tuple(pre), tuple(effects), frozenset({inp.problem.name}))


def _to_effect(lit, var_of, domains) -> Effect | None:
    negated = lit[0] == "not"
    core = lit[1] if negated else lit
    if core[0] in ("assign", "="):
        vid = var_of(core[1][0], core[1][1:])
        if core[2] not in domains[vid]:
            return None
        if negated:
            return Effect(vid, core[2], False)
        return Effect(vid, core[2], True)
    vid = var_of(core[0], core[1:])
    return Effect(vid, FALSE if negated else TRUE, True)


def _goal_fluents(goal: Formula | None, table: VariableTable, var_of, agent: str) -> list[Fluent]:
    if goal is None:
        return []
    if goal[0] == "or" or any(isinstance(g, tuple) and g and g[0] == "or" for g in goal[1:]):
        raise GroundingError(f"{agent}: disjunctive goals are not supported: {format_formula(goal)}")
    atoms = list(goal[1:]) if goal[0] == "and" else [goal]
    out: list[Fluent] = []
    for atom in atoms:
        negated = atom[0] == "not"
        core = atom[1] if negated else atom
        if core[0] == "=":
            f = table.fluent(var_of(core[1][0], core[1][1:]), core[2], not negated)
        elif core[0] == "member":
            f = Fluent(var_of(core[1][0], core[1][1:] + (core[2],)), FALSE if negated else TRUE)
        else:
            f = Fluent(var_of(core[0], core[1:]), FALSE if negated else TRUE)
        if f not in out:
            out.append(f)
    return out


# ---------------------------------------------------------------- task

@dataclass
class MapTask:
    """All agents of a task with a shared variable and action table."""

    agents: list
    objects: ObjectTable
    goals: tuple
    table: VariableTable
    actions: list  # every distinct ground action, owners merged
    _private: dict = field(default_factory=dict, repr=False, compare=False)
    _clobberers: dict = field(default_factory=dict, repr=False, compare=False)

    def agent(self, key: int | str) -> AgentModel:
        if isinstance(key, int):
            return self.agents[key]
        return next(a for a in self.agents if a.name == key)

    @property
    def init(self) -> frozenset:
        out: set[Fluent] = set()
        for a in self.agents:
            out |= a.init
        return frozenset(out)

    def watchers(self, f: Fluent) -> list[int]:
        return [a.id for a in self.agents if a.sees(f)]

    def is_public_var(self, vid: int) -> bool:
        return sum(1 for a in self.agents if vid in a.domains) > 1

    def is_private_to(self, f: Fluent, agent: AgentModel) -> bool:
        """Only ``agent`` knows the variable, or only ``agent`` knows the value."""
        key = (f.var, f.value, agent.id)
        hit = self._private.get(key)
        if hit is None:
            others = [a for a in self.agents if a.id != agent.id]
            hit = self._private[key] = agent.sees(f) and (
                all(f.var not in a.domains for a in others) or
                all(f.value not in a.domains.get(f.var, ()) for a in others))
        return hit

    def shared_visible(self, owners_a: frozenset, owners_b: frozenset) -> Callable[[int, str], bool]:
        """(v, d) pairs visible to some owner of each action (V^i & V^j, D^i & D^j)."""
        pairs = [(self.agent(i), self.agent(j)) for i in owners_a for j in owners_b]

        def visible(var: int, value: str) -> bool:
            return any(value in a.domains.get(var, ()) and value in b.domains.get(var, ())
                       for a, b in pairs)
        return visible

    def format(self, f: Fluent) -> str:
        return self.table.format(f, self.objects.display)

    def action_label(self, action: GroundAction) -> str:
        return " ".join(self.objects.show(x) for x in action.name)

    def is_boolean(self, vid: int) -> bool:
        return self.table.is_boolean(vid)


def build_task(inputs: Sequence[ValidatedAgentInput]) -> MapTask:
    """Ground every agent into one task; private terms are kept apart per agent."""
    names = [inp.problem.name for inp in inputs]
    if len(set(names)) != len(names):
        raise GroundingError("duplicate agent names: " + ", ".join(sorted({n for n in names if names.count(n) > 1})))
    table = VariableTable()
    objects = ObjectTable()
    public = public_terms(inputs)
    agents = [ground(inp, objects, table, lambda h, a: (h, a) in public, i) for i, inp in enumerate(inputs)]

    merged: dict[tuple, GroundAction] = {}
    for agent in agents:
        for act in agent.actions:
            key = (act.name, act.pre, act.effects)
            prev = merged.get(key)
            merged[key] = GroundAction(-1, act.name, act.pre, act.effects,
                                       (prev.owners if prev else frozenset()) | {agent.id})
    actions = []
    by_key: dict[tuple, GroundAction] = {}
    for i, (key, act) in enumerate(merged.items()):
        ga = GroundAction(i, act.name, act.pre, act.effects, act.owners)
        actions.append(ga)
        by_key[key] = ga
    for agent in agents:
        agent.actions = tuple(by_key[(a.name, a.pre, a.effects)] for a in agent.actions)

    goals: list[Fluent] = []
    for agent in agents:
        for g in agent.global_goals:
            if g not in goals:
                goals.append(g)
    full = {v.id: v.domain for v in table}
    try:
        negative_closure(set().union(*(a.init for a in agents)) if agents else set(), full)
    except InconsistentState as exc:
        raise GroundingError(f"agents disagree about the initial state ({exc})") from exc
    return MapTask(agents, objects, tuple(goals), table, actions)


def dump_agent(agent: AgentModel, objects: ObjectTable | None = None) -> str:
    """One record per line: variables with visible domains, then actions with PRE/EFF."""
    show = objects.show if objects else (lambda s: s)
    lines = []
    for vid in sorted(agent.domains):
        var = agent.table[vid]
        scope = "private" if var.scope else "public"
        lines.append(f"var {vid} {agent.table.term(vid)} {scope} {{{' '.join(map(show, agent.domains[vid]))}}}")
    for act in agent.actions:
        pre = " ".join(agent.table.format(p) for p in act.pre)
        eff = " ".join(f"{agent.table.term(e.var)}{':=' if e.assign else '!='}{e.value}" for e in act.effects)
        lines.append(f"action {act.id} {' '.join(map(show, act.name))} pre[{pre}] eff[{eff}]")
    for f in sorted(agent.init):
        lines.append(f"init {agent.table.format(f)}")
    return "\n".join(lines) + "\n"


def load_task(pairs: Sequence[tuple[str, str]]) -> MapTask:
    """Build a task from (domain path, problem path) pairs, one per agent."""
    from .lang_parser import load_agent
    return build_task([load_agent(d, p) for d, p in pairs])
