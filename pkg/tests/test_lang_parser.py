import io
from pathlib import Path

import pytest

from mapop.fixtures import path
from mapop.lang_parser import (ParseError, format_domain, format_problem, parse_domain, parse_problem, report,
                               validate_pair)

TRANSPORT = Path(path("transport.pddl")).read_text()
WAREHOUSE = Path(path("warehouse.pddl")).read_text()
AG1 = Path(path("ag1.pddl")).read_text()

WAREHOUSE_SKETCH = """
(define (domain Warehouse)
 (:requirements :typing :equality :fluents)
 (:types package agent city table hoist - object
         raw-material final-product - package)
 (:predicates (empty ?c - city)
              (clear ?p - (either package table hoist))
              (exchange-city ?c - city)
 )
 (:functions (pos ?p - package) - (either city package table hoist))
 (:action acquire
  :parameters (?p - raw-material ?c - city ?h - hoist)
  :precondition (and (= (pos ?p) ?c)(clear ?h)(exchange-city ?c))
  :effect (and (assign (pos ?p) ?h)(not (clear ?h))(empty ?c))
 )
)
"""


def conjuncts(formula):
    return list(formula[1:]) if formula[0] == "and" else [formula]


def test_transport_domain_sections():
    d = parse_domain(TRANSPORT)
    assert [a.name for a in d.action_schemas] == ["load", "unload", "drive"]
    assert len(d.predicates) == 1
    assert len(d.functions) == 2
    assert len(d.multi_functions) == 2
    assert all(f.multi for f in d.multi_functions)
    assert d.function("pos").result == ("city", "truck")
    assert d.type_hierarchy["raw-material"] == "package"
    assert d.diagnostics == []


def test_minimal_domain():
    d = parse_domain("(define (domain D) (:types) (:predicates) )")
    assert d.name == "d"
    assert d.predicates == [] and d.functions == [] and d.action_schemas == []


def test_warehouse_sketch_acquire():
    d = parse_domain(WAREHOUSE_SKETCH)
    acquire = d.action_schemas[0]
    assert acquire.name == "acquire"
    assert len(conjuncts(acquire.precondition)) == 3
    assert len(conjuncts(acquire.effect)) == 3


def test_completed_warehouse_domain():
    d = parse_domain(WAREHOUSE)
    assert {a.name for a in d.action_schemas} == {"acquire", "deliver", "stack", "unstack"}


def test_ag1_problem():
    p = parse_problem(AG1)
    assert len(p.objects) == 13  # 3 agents, 1 truck, 6 cities, 3 packages
    assert len(p.shared_data) == 4
    assert p.global_goal[0] == "and" and len(p.global_goal) == 3
    assert p.private_goal is None
    assert p.diagnostics == []


def test_share_pattern_without_recipients_goes_to_all():
    p = parse_problem("""(define (problem P) (:domain Transport)
        (:objects t1 - truck cA - city)
        (:shared-data ((at ?t - truck) - city))
        (:init (= (at t1) cA)))""")
    (pattern,) = p.shared_data
    assert pattern.name == "at" and pattern.recipients is None


def test_ag1_recipients():
    p = parse_problem(AG1)
    assert p.shared_data[0].recipients == ("ag2", "ag3")
    assert p.shared_data[2].recipients == ("ag2",)


def test_goal_with_undeclared_object():
    text = AG1.replace("(= (pos p1) cA)", "(= (pos p9) cA)")
    with pytest.raises(ParseError, match="p9"):
        parse_problem(text)


def test_syntax_error_has_position():
    with pytest.raises(ParseError) as err:
        parse_domain("(define (domain D)\n  (:predicates (p ?x)")
    (diag,) = err.value.diagnostics[:1]
    assert diag.line >= 1 and diag.severity == "error"


def test_unknown_section_keyword():
    with pytest.raises(ParseError, match="bogus"):
        parse_domain("(define (domain D) (:bogus x))")


def test_undeclared_type_in_signature():
    with pytest.raises(ParseError, match="vehicle"):
        parse_domain("(define (domain D) (:types city) (:predicates (at ?v - vehicle)))")


def test_unknown_requirement_is_a_warning():
    d = parse_domain("(define (domain D) (:requirements :typing :made-up) (:types))")
    assert [x.severity for x in d.diagnostics] == ["warning"]


def test_validate_transport_ag1():
    v = validate_pair(parse_domain(TRANSPORT), parse_problem(AG1))
    assert v.diagnostics == []


def test_validate_type_mismatch():
    text = AG1.replace("(= (at t1) cA)", "(= (at t1) p3)")
    with pytest.raises(ParseError, match="p3"):
        validate_pair(parse_domain(TRANSPORT), parse_problem(text))


def test_validate_unmatched_share_pattern():
    text = AG1.replace("((at ?t - truck) - city)", "(speed ?t - truck)")
    with pytest.raises(ParseError, match="speed"):
        validate_pair(parse_domain(TRANSPORT), parse_problem(text))


def test_validate_arity_mismatch():
    text = AG1.replace("(empty cB)", "(empty cB cC)")
    with pytest.raises(ParseError, match="empty"):
        validate_pair(parse_domain(TRANSPORT), parse_problem(text))


def test_validate_domain_name():
    text = AG1.replace("(:domain Transport)", "(:domain Other)")
    with pytest.raises(ParseError, match="other"):
        validate_pair(parse_domain(TRANSPORT), parse_problem(text))


@pytest.mark.parametrize("text", [TRANSPORT, WAREHOUSE, WAREHOUSE_SKETCH])
def test_domain_round_trip(text):
    d = parse_domain(text)
    assert parse_domain(format_domain(d)) == d


@pytest.mark.parametrize("name", ["ag1.pddl", "ag2.pddl", "ag3.pddl", "picture2/w1.pddl"])
def test_problem_round_trip(name):
    p = parse_problem(Path(path(name)).read_text())
    assert parse_problem(format_problem(p)) == p


def test_identifiers_are_case_insensitive():
    p = parse_problem(AG1)
    assert "ca" in p.objects and p.display["ca"] == "cA"


def test_report_one_line_per_diagnostic():
    with pytest.raises(ParseError) as err:
        parse_domain("(define (domain D) (:bogus x) (:other y))", "d.pddl")
    out = io.StringIO()
    report(err.value.diagnostics, out)
    lines = out.getvalue().splitlines()
    assert lines and all(line.startswith("d.pddl:") for line in lines)
