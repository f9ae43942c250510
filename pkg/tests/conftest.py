import pytest

from mapop.dis_rpg import run_fixpoint
from mapop.fixtures import transport_pairs
from mapop.map_core import load_task


@pytest.fixture(scope="session")
def transport():
    return load_task(transport_pairs())


@pytest.fixture(scope="session")
def transport_rpgs(transport):
    return run_fixpoint(transport.agents)


def fluent(task, text):
    """Look up a fluent by its printed form, e.g. 'pos(p1)=cA' or 'at(t1)!=cB'."""
    from mapop.partial_plan import parse_fluent_key
    return parse_fluent_key(task, text)


def action(task, label):
    """The ground action with the given label, e.g. 'drive t1 ca cb'."""
    return next(a for a in task.actions if a.label == label)


@pytest.fixture(scope="session")
def transport_run():
    """One full solve of the three-agent scenario, shared by every test that needs it."""
    from mapop.agent_runtime import RunConfig, run, spawn
    pool = spawn(RunConfig(transport_pairs(), verbosity=1))
    report = run(pool)
    return pool, report


ACCEPTANCE: list = []  # (criterion, passed, detail), filled by test_acceptance


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n, ok, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
