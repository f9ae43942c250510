"""Parser for the multi-agent PDDL dialect: one domain and one problem file per agent.

Formulas are kept as nested tuples of lower-cased strings, e.g.
``("and", ("=", ("at", "?t"), "?c"), ("empty", "?c"))``.  Positions of the
parsed elements are recorded on the side so validation errors can point at
the offending text.
"""
from __future__ import annotations

import sys
from dataclasses import dataclass, field
from typing import Iterable, Iterator, TextIO

KNOWN_REQUIREMENTS = {
    ":strips", ":typing", ":equality", ":fluents", ":object-fluents",
    ":negative-preconditions", ":disjunctive-preconditions", ":adl",
    ":multi-agent", ":shared-data",
}

Formula = tuple  # nested tuples of str
TypeUnion = tuple  # tuple[str, ...]


# ---------------------------------------------------------------- diagnostics

@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" or "warning"
    line: int
    col: int
    message: str
    source: str = "<input>"

    def __str__(self) -> str:
        return f"{self.source}:{self.line}:{self.col}: {self.severity}: {self.message}"


class ParseError(Exception):
    """Raised when a file cannot be parsed or validated; carries diagnostics."""

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = diagnostics
        super().__init__("\n".join(str(d) for d in diagnostics))


def report(diagnostics: Iterable[Diagnostic], stream: TextIO | None = None) -> None:
    """Write diagnostics to ``stream`` (stderr by default), one per line."""
    out = stream if stream is not None else sys.stderr
    for diag in diagnostics:
        print(diag, file=out)


# ---------------------------------------------------------------- s-expressions

class Sym(str):
    """An atom token that remembers where it came from."""

    line: int
    col: int

    def __new__(cls, text: str, line: int, col: int) -> "Sym":
        obj = super().__new__(cls, text.lower())
        obj.line = line
        obj.col = col
        obj.raw = text
        return obj


class SList(list):
    """A parenthesised list; ``braces`` marks a ``{...}`` object set."""

    def __init__(self, line: int, col: int, braces: bool = False):
        super().__init__()
        self.line = line
        self.col = col
        self.braces = braces


def _tokens(text: str, source: str) -> Iterator[tuple[str, int, int]]:
    line, col, i, n = 1, 1, 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line, col, i = line + 1, 1, i + 1
        elif ch.isspace():
            col, i = col + 1, i + 1
        elif ch == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif ch in "(){}":
            yield ch, line, col
            col, i = col + 1, i + 1
        else:
            start, start_col = i, col
            while i < n and not text[i].isspace() and text[i] not in "(){};":
                i += 1
            col += i - start
            yield text[start:i], line, start_col


def read_sexpr(text: str, source: str = "<input>") -> SList:
    """Parse exactly one top-level s-expression."""
    stack: list[SList] = []
    result: SList | None = None
    closers = {")": "(", "}": "{"}
    for tok, line, col in _tokens(text, source):
        if tok in "({":
            node = SList(line, col, braces=tok == "{")
            if stack:
                stack[-1].append(node)
            elif result is not None:
                raise ParseError([Diagnostic("error", line, col, "unexpected text after end of definition", source)])
            stack.append(node)
        elif tok in ")}":
            if not stack:
                raise ParseError([Diagnostic("error", line, col, f"unbalanced '{tok}'", source)])
            node = stack.pop()
            if (node.braces and tok != "}") or (not node.braces and tok != ")"):
                want = "}" if node.braces else ")"
                raise ParseError([Diagnostic("error", line, col, f"expected '{want}' but found '{tok}'", source)])
            if not stack:
                result = node
        else:
            if not stack:
                raise ParseError([Diagnostic("error", line, col, f"unexpected token '{tok}' outside parentheses", source)])
            stack[-1].append(Sym(tok, line, col))
    if stack:
        node = stack[-1]
        raise ParseError([Diagnostic("error", node.line, node.col, "unclosed '('", source)])
    if result is None:
        raise ParseError([Diagnostic("error", 1, 1, "empty input", source)])
    return result


def to_formula(node) -> Formula | str:
    if isinstance(node, SList):
        if node.braces:
            return ("{}",) + tuple(to_formula(x) for x in node)
        return tuple(to_formula(x) for x in node)
    return str(node)


def _pos(node) -> tuple[int, int]:
    return (getattr(node, "line", 0), getattr(node, "col", 0))


# ---------------------------------------------------------------- models

@dataclass(frozen=True)
class PredicateDecl:
    name: str
    params: tuple  # ((var, TypeUnion), ...)

    @property
    def arity(self) -> int:
        return len(self.params)


@dataclass(frozen=True)
class FunctionDecl:
    name: str
    params: tuple
    result: TypeUnion
    multi: bool = False

    @property
    def arity(self) -> int:
        return len(self.params)


@dataclass(frozen=True)
class ActionSchema:
    name: str
    params: tuple
    precondition: Formula
    effect: Formula


@dataclass
class DomainModel:
    name: str
    requirements: tuple = ()
    type_hierarchy: dict = field(default_factory=dict)  # child -> parent
    constants: dict = field(default_factory=dict)
    predicates: list = field(default_factory=list)
    functions: list = field(default_factory=list)
    multi_functions: list = field(default_factory=list)
    action_schemas: list = field(default_factory=list)
    diagnostics: list = field(default_factory=list, compare=False)

    def predicate(self, name: str) -> PredicateDecl | None:
        return next((p for p in self.predicates if p.name == name), None)

    def function(self, name: str) -> FunctionDecl | None:
        return next((f for f in self.functions + self.multi_functions if f.name == name), None)


@dataclass(frozen=True)
class SharePattern:
    """Which fluents an agent may transmit, and to whom (``None`` = all agents)."""

    name: str
    params: tuple
    result: TypeUnion | None = None  # None for predicate patterns
    recipients: tuple | None = None

    @property
    def is_function(self) -> bool:
        return self.result is not None


@dataclass(frozen=True)
class InitLiteral:
    kind: str  # "predicate", "function" or "set"
    name: str
    args: tuple
    value: str | tuple | None = None
    negated: bool = False


@dataclass
class ProblemModel:
    name: str
    domain_name: str
    objects: dict = field(default_factory=dict)  # object -> type
    shared_data: list = field(default_factory=list)
    init: list = field(default_factory=list)
    global_goal: Formula | None = None
    private_goal: Formula | None = None
    display: dict = field(default_factory=dict, compare=False)
    positions: dict = field(default_factory=dict, compare=False)
    diagnostics: list = field(default_factory=list, compare=False)


# ---------------------------------------------------------------- helpers

class _Reader:
    def __init__(self, source: str):
        self.source = source

    def fail(self, node, message: str) -> ParseError:
        line, col = _pos(node)
        return ParseError([Diagnostic("error", line, col, message, self.source)])

    def expect_list(self, node, what: str) -> SList:
        if not isinstance(node, SList) or node.braces:
            raise self.fail(node, f"expected a list for {what}")
        return node

    def expect_sym(self, node, what: str) -> Sym:
        if not isinstance(node, Sym):
            raise self.fail(node, f"expected a name for {what}")
        return node

    def type_ref(self, node) -> TypeUnion:
        if isinstance(node, Sym):
            return (str(node),)
        node = self.expect_list(node, "type")
        if not node or node[0] != "either" or len(node) < 2:
            raise self.fail(node, "malformed type, expected a name or (either ...)")
        return tuple(str(self.expect_sym(x, "type")) for x in node[1:])

    def typed_list(self, items, default: str = "object") -> list[tuple[Sym, TypeUnion]]:
        out: list[tuple[Sym, TypeUnion]] = []
        pending: list[Sym] = []
        i = 0
        while i < len(items):
            item = items[i]
            if item == "-":
                if i + 1 >= len(items):
                    raise self.fail(item, "missing type after '-'")
                if not pending:
                    raise self.fail(item, "type given without names")
                t = self.type_ref(items[i + 1])
                out.extend((name, t) for name in pending)
                pending = []
                i += 2
                continue
            pending.append(self.expect_sym(item, "typed name"))
            i += 1
        out.extend((name, (default,)) for name in pending)
        return out


def _params(reader: _Reader, items) -> tuple:
    params = reader.typed_list(items)
    seen = set()
    for name, _ in params:
        if not name.startswith("?"):
            raise reader.fail(name, f"parameter '{name}' must start with '?'")
        if name in seen:
            raise reader.fail(name, f"duplicate parameter '{name}'")
        seen.add(name)
    return tuple((str(n), t) for n, t in params)


# ---------------------------------------------------------------- domain

DOMAIN_SECTIONS = {":requirements", ":types", ":constants", ":predicates", ":functions",
                   ":multi-functions", ":action"}


def parse_domain(text: str, source: str = "<domain>") -> DomainModel:
    """Parse a domain file into a DomainModel; raises ParseError on failure."""
    reader = _Reader(source)
    root = read_sexpr(text, source)
    if len(root) < 2 or root[0] != "define":
        raise reader.fail(root, "expected (define (domain NAME) ...)")
    head = reader.expect_list(root[1], "domain header")
    if len(head) != 2 or head[0] != "domain":
        raise reader.fail(head, "expected (domain NAME)")
    model = DomainModel(name=str(reader.expect_sym(head[1], "domain name")))
    declared_types = {"object"}
    used_types: list[tuple[Sym | SList, TypeUnion]] = []

    for section in root[2:]:
        section = reader.expect_list(section, "domain section")
        if not section or not isinstance(section[0], Sym):
            raise reader.fail(section, "empty section")
        key = section[0]
        if key not in DOMAIN_SECTIONS:
            raise reader.fail(key, f"unknown section '{key.raw}'")
        body = section[1:]
        if key == ":requirements":
            reqs = []
            for r in body:
                r = reader.expect_sym(r, "requirement")
                if r not in KNOWN_REQUIREMENTS:
                    model.diagnostics.append(
                        Diagnostic("warning", r.line, r.col, f"unknown requirement '{r.raw}' ignored", source))
                reqs.append(str(r))
            model.requirements = tuple(reqs)
        elif key == ":types":
            for name, parent in reader.typed_list(body):
                if len(parent) != 1:
                    raise reader.fail(name, "a type cannot have an (either ...) parent")
                model.type_hierarchy[str(name)] = parent[0]
                declared_types.add(str(name))
                if parent[0] != "object":
                    used_types.append((name, parent))
        elif key == ":constants":
            for name, t in reader.typed_list(body):
                model.constants[str(name)] = t[0]
                used_types.append((name, t))
        elif key == ":predicates":
            for atom in body:
                atom = reader.expect_list(atom, "predicate")
                name = reader.expect_sym(atom[0], "predicate name") if atom else None
                if name is None:
                    raise reader.fail(atom, "empty predicate")
                params = _params(reader, atom[1:])
                used_types.extend((atom, t) for _, t in params)
                model.predicates.append(PredicateDecl(str(name), params))
        elif key in (":functions", ":multi-functions"):
            i = 0
            while i < len(body):
                atom = reader.expect_list(body[i], "function")
                if not atom:
                    raise reader.fail(atom, "empty function")
                name = reader.expect_sym(atom[0], "function name")
                if i + 2 >= len(body) or body[i + 1] != "-":
                    raise reader.fail(atom, f"function '{name.raw}' needs an object result type ('- type')")
                result = reader.type_ref(body[i + 2])
                params = _params(reader, atom[1:])
                used_types.extend((atom, t) for _, t in params)
                used_types.append((atom, result))
                decl = FunctionDecl(str(name), params, result, multi=key == ":multi-functions")
                (model.multi_functions if decl.multi else model.functions).append(decl)
                i += 3
        elif key == ":action":
            model.action_schemas.append(_parse_action(reader, section, used_types))

    for node, union in used_types:
        for t in union:
            if t not in declared_types:
                raise reader.fail(node, f"undeclared type '{t}'")
    for schema in model.action_schemas:
        _check_effect(reader, schema.effect, schema)
    return model


def _parse_action(reader: _Reader, section: SList, used_types: list) -> ActionSchema:
    if len(section) < 2:
        raise reader.fail(section, "action without a name")
    name = reader.expect_sym(section[1], "action name")
    params: tuple = ()
    pre: Formula = ("and",)
    eff: Formula = ("and",)
    i = 2
    while i < len(section):
        key = section[i]
        if i + 1 >= len(section):
            raise reader.fail(key, f"missing value for '{key}'")
        value = section[i + 1]
        if key == ":parameters":
            params = _params(reader, reader.expect_list(value, "parameters"))
            used_types.extend((value, t) for _, t in params)
        elif key == ":precondition":
            pre = to_formula(value)
        elif key == ":effect":
            eff = to_formula(value)
        else:
            raise reader.fail(key, f"unknown action field '{key}'")
        i += 2
    return ActionSchema(str(name), params, pre, eff)


def _check_effect(reader: _Reader, eff, schema: ActionSchema) -> None:
    parts = eff[1:] if eff and eff[0] == "and" else (eff,)
    for part in parts:
        if not isinstance(part, tuple) or not part:
            raise ParseError([Diagnostic("error", 0, 0, f"malformed effect in action '{schema.name}'", reader.source)])
        if part[0] in ("or", "and", "forall", "when", "imply", "exists"):
            raise ParseError([Diagnostic(
                "error", 0, 0, f"effect of action '{schema.name}' may only contain assignments and literals",
                reader.source)])


# ---------------------------------------------------------------- problem

PROBLEM_SECTIONS = {":domain", ":objects", ":shared-data", ":init", ":global-goal", ":goal",
                    ":private-goal", ":requirements"}


def parse_problem(text: str, source: str = "<problem>") -> ProblemModel:
    """Parse a problem file into a ProblemModel; raises ParseError on failure."""
    reader = _Reader(source)
    root = read_sexpr(text, source)
    if len(root) < 2 or root[0] != "define":
        raise reader.fail(root, "expected (define (problem NAME) ...)")
    head = reader.expect_list(root[1], "problem header")
    if len(head) != 2 or head[0] != "problem":
        raise reader.fail(head, "expected (problem NAME)")
    name = reader.expect_sym(head[1], "problem name")
    model = ProblemModel(name=str(name), domain_name="")
    model.display[str(name)] = name.raw
    goal_nodes: list = []

    for section in root[2:]:
        section = reader.expect_list(section, "problem section")
        if not section or not isinstance(section[0], Sym):
            raise reader.fail(section, "empty section")
        key = section[0]
        if key not in PROBLEM_SECTIONS:
            raise reader.fail(key, f"unknown section '{key.raw}'")
        body = section[1:]
        if key == ":domain":
            dom = reader.expect_sym(body[0] if body else section, "domain name")
            model.domain_name = str(dom)
        elif key == ":requirements":
            for r in body:
                r = reader.expect_sym(r, "requirement")
                if r not in KNOWN_REQUIREMENTS:
                    model.diagnostics.append(
                        Diagnostic("warning", r.line, r.col, f"unknown requirement '{r.raw}' ignored", source))
        elif key == ":objects":
            for obj, t in reader.typed_list(body):
                if len(t) != 1:
                    raise reader.fail(obj, "an object needs a single type")
                if obj in model.objects:
                    raise reader.fail(obj, f"object '{obj.raw}' declared twice")
                model.objects[str(obj)] = t[0]
                model.display[str(obj)] = obj.raw
        elif key == ":shared-data":
            model.shared_data = _parse_shared(reader, body, model)
        elif key == ":init":
            for lit in body:
                parsed = _parse_init(reader, lit)
                model.positions[("init", len(model.init))] = _pos(lit)
                model.init.append(parsed)
        elif key in (":global-goal", ":goal", ":private-goal"):
            if len(body) != 1:
                raise reader.fail(section, f"'{key}' takes exactly one formula")
            formula = to_formula(body[0])
            _check_goal_shape(reader, body[0])
            goal_nodes.append(body[0])
            if key == ":private-goal":
                model.private_goal = formula
            else:
                model.global_goal = formula

    if not model.domain_name:
        raise reader.fail(root, "missing (:domain NAME)")
    for node in goal_nodes:
        for sym in _goal_constants(node):
            if sym not in model.objects:
                raise reader.fail(sym, f"goal references undeclared object '{sym.raw}'")
    for pattern_index, pattern in enumerate(model.shared_data):
        for agent in pattern.recipients or ():
            if agent not in model.objects:
                line, col = model.positions.get(("share", pattern_index), (0, 0))
                raise ParseError([Diagnostic("error", line, col,
                                             f"share recipient '{agent}' is not a declared object", source)])
    return model


def _parse_shared(reader: _Reader, body, model: ProblemModel) -> list[SharePattern]:
    patterns: list[SharePattern] = []
    i = 0
    while i < len(body):
        item = reader.expect_list(body[i], "share pattern")
        if not item:
            raise reader.fail(item, "empty share pattern")
        if isinstance(item[0], SList):
            # ((f ?x - t) - result)
            atom = item[0]
            if len(item) != 3 or item[1] != "-":
                raise reader.fail(item, "function pattern must be ((name params) - type)")
            name = reader.expect_sym(atom[0], "function name")
            params = _params(reader, atom[1:])
            result = reader.type_ref(item[2])
        else:
            name = reader.expect_sym(item[0], "predicate name")
            params = _params(reader, item[1:])
            result = None
        recipients = None
        i += 1
        if i < len(body) and body[i] == "-":
            if i + 1 >= len(body):
                raise reader.fail(body[i], "missing agent after '-'")
            recipients = reader.type_ref(body[i + 1])
            i += 2
        model.positions[("share", len(patterns))] = _pos(item)
        patterns.append(SharePattern(str(name), params, result, recipients))
    return patterns


def _parse_init(reader: _Reader, node) -> InitLiteral:
    node = reader.expect_list(node, "init literal")
    negated = False
    if node and node[0] == "not":
        if len(node) != 2:
            raise reader.fail(node, "(not ...) takes one literal")
        negated = True
        node = reader.expect_list(node[1], "init literal")
    if not node:
        raise reader.fail(node, "empty init literal")
    if node[0] == "=":
        if len(node) != 3:
            raise reader.fail(node, "(= (f args) value) expected")
        term = reader.expect_list(node[1], "function term")
        if not term:
            raise reader.fail(term, "empty function term")
        fname = reader.expect_sym(term[0], "function name")
        args = tuple(str(reader.expect_sym(a, "object")) for a in term[1:])
        value = node[2]
        if isinstance(value, SList):
            if not value.braces:
                raise reader.fail(value, "value must be an object or a {set}")
            members = tuple(str(reader.expect_sym(v, "object")) for v in value)
            return InitLiteral("set", str(fname), args, members, negated)
        return InitLiteral("function", str(fname), args, str(value), negated)
    pname = reader.expect_sym(node[0], "predicate name")
    args = tuple(str(reader.expect_sym(a, "object")) for a in node[1:])
    return InitLiteral("predicate", str(pname), args, None, negated)


def _check_goal_shape(reader: _Reader, node) -> None:
    node = reader.expect_list(node, "goal")
    if node and node[0] in ("and", "or"):
        for sub in node[1:]:
            _check_goal_shape(reader, sub)
    elif node and node[0] == "not":
        _check_goal_shape(reader, node[1])


def _goal_constants(node) -> Iterator[Sym]:
    if isinstance(node, Sym):
        if not node.startswith("?"):
            yield node
        return
    if not node:
        return
    head = node[0]
    if head in ("and", "or", "not"):
        for sub in node[1:]:
            yield from _goal_constants(sub)
    elif head in ("=", "member"):
        term = node[1]
        if isinstance(term, SList):
            for a in term[1:]:
                yield from _goal_constants(a)
        for v in node[2:]:
            yield from _goal_constants(v)
    else:
        for a in node[1:]:
            yield from _goal_constants(a)


# ---------------------------------------------------------------- types

class TypeTable:
    """Type hierarchy plus the typed object universe of one agent."""

    def __init__(self, hierarchy: dict, objects: dict):
        self.parent = dict(hierarchy)
        self.objects = dict(objects)

    def is_subtype(self, t: str, ancestor: str) -> bool:
        seen = set()
        while t not in seen:
            if t == ancestor or ancestor == "object":
                return True
            seen.add(t)
            if t not in self.parent:
                return False
            t = self.parent[t]
        return False

    def known(self, t: str) -> bool:
        return t == "object" or t in self.parent

    def satisfies(self, obj: str, union: TypeUnion) -> bool:
        t = self.objects.get(obj)
        if t is None:
            return obj in ("true", "false") and "boolean" in union
        return any(self.is_subtype(t, u) for u in union)

    def members(self, union: TypeUnion) -> list[str]:
        return [o for o in self.objects if self.satisfies(o, union)]


@dataclass
class ValidatedAgentInput:
    domain: DomainModel
    problem: ProblemModel
    types: TypeTable
    source: str = ""
    diagnostics: list = field(default_factory=list)


def validate_pair(domain: DomainModel, problem: ProblemModel, source: str = "<problem>") -> ValidatedAgentInput:
    """Cross-check a problem against its domain; raises ParseError listing every problem found."""
    errors: list[Diagnostic] = []

    def err(key, message: str) -> None:
        line, col = problem.positions.get(key, (0, 0))
        errors.append(Diagnostic("error", line, col, message, source))

    if problem.domain_name != domain.name:
        err(None, f"problem is for domain '{problem.domain_name}' but domain is '{domain.name}'")
    objects = dict(domain.constants)
    objects.update(problem.objects)
    types = TypeTable(domain.type_hierarchy, objects)
    for obj, t in problem.objects.items():
        if not types.known(t):
            err(None, f"object '{obj}' has unknown type '{t}'")

    def check_args(key, what: str, params: tuple, args: tuple) -> bool:
        if len(params) != len(args):
            err(key, f"arity mismatch for '{what}': expected {len(params)} arguments, got {len(args)}")
            return False
        ok = True
        for (pname, union), arg in zip(params, args):
            if arg.startswith("?"):
                continue
            if arg not in objects:
                err(key, f"undeclared object '{arg}' in '{what}'")
                ok = False
            elif not types.satisfies(arg, union):
                err(key, f"type mismatch in '{what}': '{arg}' is not a {'/'.join(union)}")
                ok = False
        return ok

    def check_value(key, what: str, union: TypeUnion, value: str) -> None:
        if value.startswith("?"):
            return
        if value not in objects:
            err(key, f"undeclared object '{value}' in '{what}'")
        elif not types.satisfies(value, union):
            err(key, f"type mismatch in '{what}': value '{value}' is not a {'/'.join(union)}")

    for index, lit in enumerate(problem.init):
        key = ("init", index)
        if lit.kind == "predicate":
            decl = domain.predicate(lit.name)
            if decl is None:
                err(key, f"unknown predicate '{lit.name}'")
                continue
            check_args(key, lit.name, decl.params, lit.args)
        else:
            decl = domain.function(lit.name)
            if decl is None:
                err(key, f"unknown function '{lit.name}'")
                continue
            if lit.kind == "set" and not decl.multi:
                err(key, f"'{lit.name}' is not a multi-function and cannot take a set")
            check_args(key, lit.name, decl.params, lit.args)
            values = lit.value if lit.kind == "set" else (lit.value,)
            for v in values:
                check_value(key, lit.name, decl.result, v)

    for goal in (problem.global_goal, problem.private_goal):
        if goal is not None:
            for atom in _goal_atoms(goal):
                _check_atom(domain, atom, check_args, check_value, err)

    for index, pattern in enumerate(problem.shared_data):
        key = ("share", index)
        if pattern.is_function:
            decl = domain.function(pattern.name)
        else:
            decl = domain.predicate(pattern.name)
        if decl is None or decl.arity != len(pattern.params):
            err(key, f"share pattern '{pattern.name}' matches no declared predicate or function")
            continue
        for t in [t for _, union in pattern.params for t in union] + list(pattern.result or ()):
            if not types.known(t):
                err(key, f"share pattern '{pattern.name}' uses unknown type '{t}'")
        for agent in pattern.recipients or ():
            if not types.satisfies(agent, ("agent",)):
                err(key, f"share recipient '{agent}' is not an agent")

    if errors:
        raise ParseError(errors)
    return ValidatedAgentInput(domain, problem, types, source, [])


def _goal_atoms(goal: Formula) -> Iterator[Formula]:
    if goal and goal[0] in ("and", "or"):
        for sub in goal[1:]:
            yield from _goal_atoms(sub)
    else:
        yield goal


def _check_atom(domain: DomainModel, atom: Formula, check_args, check_value, err) -> None:
    if atom and atom[0] == "not":
        atom = atom[1]
    if atom and atom[0] in ("=", "member") and isinstance(atom[1], tuple):
        decl = domain.function(atom[1][0])
        if decl is None:
            err(None, f"unknown function '{atom[1][0]}' in goal")
            return
        if check_args(None, decl.name, decl.params, atom[1][1:]):
            check_value(None, decl.name, decl.result, atom[2])
    else:
        decl = domain.predicate(atom[0])
        if decl is None:
            err(None, f"unknown predicate '{atom[0]}' in goal")
            return
        check_args(None, decl.name, decl.params, atom[1:])


# ---------------------------------------------------------------- printing

def format_formula(f) -> str:
    if isinstance(f, str):
        return f
    if f and f[0] == "{}":
        return "{" + " ".join(format_formula(x) for x in f[1:]) + "}"
    return "(" + " ".join(format_formula(x) for x in f) + ")"


def _format_type(union: TypeUnion) -> str:
    return union[0] if len(union) == 1 else "(either " + " ".join(union) + ")"


def _format_typed(params: tuple) -> str:
    return " ".join(f"{name} - {_format_type(t)}" for name, t in params)


def _decl(name: str, params: tuple) -> str:
    inner = _format_typed(params)
    return f"({name}{' ' + inner if inner else ''})"


def format_domain(model: DomainModel) -> str:
    """Pretty-print a DomainModel; the output re-parses to an equal model."""
    lines = [f"(define (domain {model.name})"]
    if model.requirements:
        lines.append(" (:requirements " + " ".join(model.requirements) + ")")
    if model.type_hierarchy:
        lines.append(" (:types " + " ".join(f"{c} - {p}" for c, p in model.type_hierarchy.items()) + ")")
    if model.constants:
        lines.append(" (:constants " + " ".join(f"{c} - {t}" for c, t in model.constants.items()) + ")")
    lines.append(" (:predicates " + " ".join(_decl(p.name, p.params) for p in model.predicates) + ")")
    for key, decls in ((":functions", model.functions), (":multi-functions", model.multi_functions)):
        if decls:
            body = " ".join(f"{_decl(f.name, f.params)} - {_format_type(f.result)}" for f in decls)
            lines.append(f" ({key} {body})")
    for a in model.action_schemas:
        lines.append(f" (:action {a.name}")
        lines.append(f"  :parameters ({_format_typed(a.params)})")
        lines.append(f"  :precondition {format_formula(a.precondition)}")
        lines.append(f"  :effect {format_formula(a.effect)})")
    lines.append(")")
    return "\n".join(lines) + "\n"


def format_init(lit: InitLiteral) -> str:
    if lit.kind == "predicate":
        text = "(" + " ".join((lit.name,) + lit.args) + ")"
    else:
        term = "(" + " ".join((lit.name,) + lit.args) + ")"
        value = "{" + " ".join(lit.value) + "}" if lit.kind == "set" else lit.value
        text = f"(= {term} {value})"
    return f"(not {text})" if lit.negated else text


def format_problem(model: ProblemModel) -> str:
    """Pretty-print a ProblemModel; the output re-parses to an equal model."""
    lines = [f"(define (problem {model.name})", f" (:domain {model.domain_name})"]
    lines.append(" (:objects " + " ".join(f"{o} - {t}" for o, t in model.objects.items()) + ")")
    if model.shared_data:
        parts = []
        for p in model.shared_data:
            atom = _decl(p.name, p.params)
            if p.is_function:
                atom = f"({atom} - {_format_type(p.result)})"
            if p.recipients is not None:
                atom += f" - {_format_type(p.recipients)}"
            parts.append(atom)
        lines.append(" (:shared-data " + " ".join(parts) + ")")
    lines.append(" (:init " + " ".join(format_init(lit) for lit in model.init) + ")")
    if model.global_goal is not None:
        lines.append(f" (:global-goal {format_formula(model.global_goal)})")
    if model.private_goal is not None:
        lines.append(f" (:private-goal {format_formula(model.private_goal)})")
    lines.append(")")
    return "\n".join(lines) + "\n"


def load_agent(domain_path: str, problem_path: str) -> ValidatedAgentInput:
    """Read, parse and validate one agent's domain/problem file pair."""
    with open(domain_path, encoding="utf-8") as fh:
        domain = parse_domain(fh.read(), str(domain_path))
    with open(problem_path, encoding="utf-8") as fh:
        problem = parse_problem(fh.read(), str(problem_path))
    return validate_pair(domain, problem, str(problem_path))
