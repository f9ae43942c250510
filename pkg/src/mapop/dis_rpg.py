"""Per-agent relaxed planning graphs and the fixpoint exchange of shareable fluents.

Each agent expands its graph from seeds: its own closed initial state at level 0 plus
every fluent received from a peer at the advertised level.  Expansion is a
Dijkstra-style sweep where an action's level is the maximum level of its
preconditions and each of its relaxed effects lands one level higher.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, NamedTuple, Sequence

from .map_core import TRUE, AgentModel, Fluent, GroundAction, is_shareable, negative_closure, relaxed_effects


class ProtocolError(Exception):
    pass


class FluentAdvert(NamedTuple):
    fluent: Fluent
    level: int
    achievers: frozenset


@dataclass
class Rpg:
    fluent_level: dict = field(default_factory=dict)  # Fluent -> level
    fluent_achievers: dict = field(default_factory=dict)  # Fluent -> frozenset of agent ids
    action_level: dict = field(default_factory=dict)  # GroundAction -> level
    received: dict = field(default_factory=dict, compare=False)  # Fluent -> (level, achievers)
    sent: dict = field(default_factory=dict, compare=False)  # peer name -> {Fluent: (level, achievers)}

    @property
    def depth(self) -> int:
        return max(self.fluent_level.values(), default=0)

    def layer(self, level: int) -> list:
        return sorted(f for f, l in self.fluent_level.items() if l == level)

    def actions_at(self, level: int) -> list:
        return sorted((a for a, l in self.action_level.items() if l == level), key=lambda a: a.name)


def _expand(agent: AgentModel, received: Mapping[Fluent, tuple]) -> Rpg:
    seeds: dict[Fluent, int] = {f: 0 for f in negative_closure(agent.init, agent.domains)}
    for f, (level, _) in received.items():
        if level < seeds.get(f, level + 1):
            seeds[f] = level

    waiting: dict[GroundAction, int] = {}
    needs: dict[Fluent, list] = {}
    ready: list[GroundAction] = []
    for act in agent.actions:
        pres = set(act.pre)
        waiting[act] = len(pres)
        if not pres:
            ready.append(act)
        for p in pres:
            needs.setdefault(p, []).append(act)

    level: dict[Fluent, int] = {}
    action_level: dict[GroundAction, int] = {}
    heap = [(l, f) for f, l in seeds.items()]
    heapq.heapify(heap)

    def fire(act: GroundAction, at: int) -> None:
        action_level[act] = at
        for g in relaxed_effects(act, agent.domains):
            if g not in level:
                heapq.heappush(heap, (at + 1, g))

    for act in ready:
        fire(act, 0)
    while heap:
        l, f = heapq.heappop(heap)
        if f in level:
            continue
        level[f] = l
        for act in needs.get(f, ()):
            waiting[act] -= 1
            if waiting[act] == 0:
                fire(act, l)

    own = set(negative_closure(agent.init, agent.domains))
    for act in action_level:
        own.update(relaxed_effects(act, agent.domains))
    achievers = {}
    for f in level:
        label = frozenset({agent.id}) if f in own else frozenset()
        if f in received:
            label |= received[f][1]
        achievers[f] = label
    return Rpg(level, achievers, action_level, dict(received))


def build_initial_rpg(agent: AgentModel) -> Rpg:
    """Relaxed expansion of the agent's own model, before any exchange."""
    return _expand(agent, {})


def exchange_round(agent: AgentModel, rpg: Rpg, inbox: Iterable[FluentAdvert],
                   peers: Sequence[AgentModel] = ()) -> tuple[Rpg, dict, bool]:
    """Absorb received adverts, re-expand, and collect per-peer adverts that changed."""
    received = dict(rpg.received)
    for ad in inbox:
        if not agent.sees(ad.fluent):
            raise ProtocolError(f"{agent.name} received an advert outside its vocabulary: "
                                f"{agent.table.format(ad.fluent)}")
        if ad.level < 0 or not ad.achievers:
            raise ProtocolError(f"malformed advert for {agent.table.format(ad.fluent)}")
        old = received.get(ad.fluent)
        if old is None:
            received[ad.fluent] = (ad.level, frozenset(ad.achievers))
        else:
            received[ad.fluent] = (min(old[0], ad.level), old[1] | ad.achievers)

    new = _expand(agent, received) if received != rpg.received else \
        Rpg(rpg.fluent_level, rpg.fluent_achievers, rpg.action_level, received)
    changed = (new.fluent_level != rpg.fluent_level or new.fluent_achievers != rpg.fluent_achievers
               or new.action_level.keys() != rpg.action_level.keys())

    new.sent = {name: dict(s) for name, s in rpg.sent.items()}
    outbox: dict[str, list] = {}
    for peer in peers:
        if peer.name == agent.name:
            continue
        last = new.sent.setdefault(peer.name, {})
        ads = []
        for f in sorted(new.fluent_level):
            if not peer.sees(f) or not is_shareable(f, agent, peer.name):
                continue
            entry = (new.fluent_level[f], new.fluent_achievers[f])
            if last.get(f) != entry:
                last[f] = entry
                ads.append(FluentAdvert(f, *entry))
        if ads:
            outbox[peer.name] = ads
    return new, outbox, changed


# Callback used to route a batch: (sender, receiver, adverts) -> adverts as delivered.
Transport = Callable[[str, str, list], list]


def run_fixpoint(agents: Sequence[AgentModel], bus: Transport | None = None,
                 max_rounds: int | None = None) -> dict:
    """Synchronous rounds of exchange until no agent receives anything new."""
    rpgs = {a.id: build_initial_rpg(a) for a in agents}
    inbox: dict[str, list] = {a.name: [] for a in agents}
    limit = max_rounds if max_rounds is not None else \
        max(1, sum(len(r.fluent_level) for r in rpgs.values())) * max(1, len(agents)) + 1
    for _ in range(limit):
        outgoing: dict[str, list] = {a.name: [] for a in agents}
        for agent in agents:
            rpg, outbox, _ = exchange_round(agent, rpgs[agent.id], inbox[agent.name], agents)
            rpgs[agent.id] = rpg
            for to, ads in outbox.items():
                outgoing[to].extend(bus(agent.name, to, ads) if bus else ads)
        if not any(outgoing.values()):
            break
        inbox = outgoing
    return rpgs


def heuristic_cost(rpg: Rpg, fluent: Fluent) -> int | None:
    """Level of the fluent, or None when it is unreachable."""
    return rpg.fluent_level.get(fluent)


def achievers(rpg: Rpg, fluent: Fluent) -> frozenset:
    try:
        return rpg.fluent_achievers[fluent]
    except KeyError:
        raise KeyError(f"fluent {fluent} is not in the graph") from None


def dump(rpg: Rpg, agent: AgentModel, names: Mapping[int, str] | None = None) -> str:
    """Per level one line per fluent: ``[achiever,...] (term) value``."""
    show = agent.display.get if agent.display else None
    names = names or {}
    lines = []
    for lvl in range(rpg.depth + 1):
        lines.append(f"F{lvl}")
        for f in rpg.layer(lvl):
            var = agent.table[f.var]
            args = " ".join((show(a, a) if show else a) for a in var.args)
            if var.is_boolean:
                value = "T" if f.value == TRUE else "F"
            else:
                value = (show(f.value, f.value) if show else f.value)
                if not f.positive:
                    value = "not " + value
            label = ",".join(names.get(i, str(i)) for i in sorted(rpg.fluent_achievers[f]))
            lines.append(f"[{label}] ({var.head} {args}) {value}".replace(" )", ")"))
        acts = rpg.actions_at(lvl)
        if acts:
            lines.append(f"A{lvl}")
            lines.extend("  " + " ".join((show(x, x) if show else x) for x in a.name) for a in acts)
    return "\n".join(lines) + "\n"
