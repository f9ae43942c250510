"""Bundled domain and problem files."""
from __future__ import annotations

from pathlib import Path

ROOT = Path(__file__).resolve().parent

# problem name -> (domain file, problem file) per agent
TABLE4 = {
    "Transportation1": [("transport.pddl", "transportation1/ta.pddl"),
                        ("transport.pddl", "transportation1/tb.pddl")],
    "Transportation2": [("transport.pddl", "transportation2/tr.pddl"),
                        ("warehouse.pddl", "transportation2/wh.pddl")],
    "Transportation3": [("transport.pddl", "transportation3/ta.pddl"),
                        ("transport.pddl", "transportation3/tb.pddl"),
                        ("warehouse.pddl", "transportation3/wh.pddl")],
    "Picture1": [("picture.pddl", "picture1/w1.pddl"), ("picture.pddl", "picture1/w2.pddl")],
    "Picture2": [("picture.pddl", "picture2/w1.pddl"), ("picture.pddl", "picture2/w2.pddl")],
    "Picture3": [("picture.pddl", "picture3/w1.pddl"), ("picture.pddl", "picture3/w2.pddl"),
                 ("picture.pddl", "picture3/w3.pddl")],
}
PICTURE2_PLAN = "picture2/plan.json"
MAX_TRANSPORT_AGENTS = 5


def path(name: str) -> str:
    return str(ROOT / name)


def transport_pairs() -> list[tuple[str, str]]:
    """The three-agent transportation scenario."""
    return [(path("transport.pddl"), path("ag1.pddl")),
            (path("transport.pddl"), path("ag2.pddl")),
            (path("warehouse.pddl"), path("ag3.pddl"))]


def table4_pairs(name: str) -> list[tuple[str, str]]:
    return [(path(d), path(p)) for d, p in TABLE4[name]]


def scalability_pairs(k: int) -> list[tuple[str, str]]:
    """One warehouse agent plus ``k`` identical transport agents sharing truck t1."""
    if not 1 <= k <= MAX_TRANSPORT_AGENTS:
        raise ValueError(f"k must be between 1 and {MAX_TRANSPORT_AGENTS}")
    return [(path("warehouse.pddl"), path("scalability/wh.pddl"))] + \
        [(path("transport.pddl"), path(f"scalability/t{i}.pddl")) for i in range(1, k + 1)]
