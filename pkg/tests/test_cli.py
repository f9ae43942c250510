import json
import subprocess
import sys

import pytest

from mapop.cli import REPORT_KEYS, CliReport, main, parse_report
from mapop.fixtures import PICTURE2_PLAN, path, table4_pairs, transport_pairs
from mapop.map_core import load_task
from mapop.partial_plan import from_structured, makespan_and_parallelism


def _args(pairs):
    out = []
    for d, p in pairs:
        out += ["--agent", d, p]
    return out


@pytest.fixture(scope="module")
def picture2(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("pic2")
    dot, plan = tmp / "plan.dot", tmp / "plan.json"
    proc = subprocess.run([sys.executable, "-m", "mapop.cli", *_args(table4_pairs("Picture2")),
                           "--out-dot", str(dot), "--out-plan", str(plan)], capture_output=True, text=True)
    return proc, dot, plan


def test_help():
    proc = subprocess.run([sys.executable, "-m", "mapop.cli", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "--agent" in proc.stdout


def test_missing_file(capsys):
    assert main(["--agent", path("transport.pddl"), "nope.pddl"]) == 1
    assert "nope.pddl" in capsys.readouterr().err


def test_bad_weights():
    with pytest.raises(SystemExit) as exc:
        main([*_args(transport_pairs()), "--weights", "1,2"])
    assert exc.value.code == 2


def test_picture2_report(picture2):
    proc, _, _ = picture2
    assert proc.returncode == 0
    report = parse_report(proc.stdout)
    assert list(report) == list(REPORT_KEYS)
    assert report["status"] == "solved" and report["agents"] == 2
    assert (report["actions"], report["time_steps"], report["parallelism"]) == (12, 8, 2)
    assert proc.stdout.startswith("plan:\n")


def test_exported_plan_matches_report(picture2):
    proc, _, plan_file = picture2
    report = parse_report(proc.stdout)
    plan = from_structured(plan_file.read_text(), load_task(table4_pairs("Picture2")))
    assert len(plan.real_steps) == report["actions"]
    assert makespan_and_parallelism(plan) == (report["time_steps"], report["parallelism"])


def test_dot_has_a_shape_per_agent(picture2):
    _, dot, _ = picture2
    text = dot.read_text()
    assert text.startswith("digraph")
    shapes = {l.split("shape=")[1].split(",")[0].split("]")[0] for l in text.splitlines()
              if "shape=" in l and "tooltip" in l}
    assert len(shapes) == 2


def test_check_stored_plan(capsys):
    code = main([*_args(table4_pairs("Picture2")), "--plan", path(PICTURE2_PLAN), "--quiet"])
    out = capsys.readouterr().out
    assert code == 0
    report = parse_report(out)
    assert (report["status"], report["actions"], report["time_steps"], report["parallelism"]) == ("solved", 12, 8, 2)
    assert report["messages"] == 0


def test_check_rejects_partial_plan(tmp_path, capsys):
    data = json.loads(open(path(PICTURE2_PLAN)).read())
    data["steps"] = data["steps"][:-1]
    keep = {tuple(s["id"]) for s in data["steps"]} | {(-1, 0), (-1, 1)}
    data["links"] = [l for l in data["links"] if tuple(l["producer"]) in keep and tuple(l["consumer"]) in keep]
    data["orderings"] = [o for o in data["orderings"] if tuple(o[0]) in keep and tuple(o[1]) in keep]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(data))
    assert main([*_args(table4_pairs("Picture2")), "--plan", str(bad), "--quiet"]) == 2
    assert parse_report(capsys.readouterr().out)["status"] == "no-solution"


def test_no_solution_exit_code(tmp_path, capsys):
    text = open(path("transportation3/tb.pddl")).read()
    text = text.replace("(= (link b1) {b0 b2}) (= (link b2) {b1})", "(= (link b1) {b0}) (= (link b2) {b2})")
    prob = tmp_path / "tb.pddl"
    prob.write_text(text)
    assert main(["--agent", path("transport.pddl"), str(prob), "--quiet"]) == 2
    assert parse_report(capsys.readouterr().out)["status"] == "no-solution"


def test_report_format_round_trip():
    r = CliReport("solved", 13, 11, 2, 3, 14722, 20000)
    text = r.format()
    assert text == ("status=solved\nactions=13\ntime_steps=11\nparallelism=2\n"
                    "agents=3\nmessages=14722\nruntime_ms=20000\n")
    assert parse_report("noise\n" + text) == vars(r)
