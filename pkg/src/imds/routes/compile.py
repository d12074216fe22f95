"""Translate route plans into IMDS source using a try/ok/take chamber handoff.

For a move along plan step ``e`` from chamber C to chamber N, robot ``r``:

1. sends ``try_r_e`` to N, which stays pending until N has room;
2. N reserves room and answers ``ok_r_e`` to C;
3. C releases the robot and sends ``take_r_e`` to N, which marks it occupied
   and forwards the robot's next ``try`` (or terminates the robot).

If the robot stands at a branching point and N is full, N answers
``busy_r_e`` instead, and C re-sends a ``try`` for any of the alternatives.
A single-robot chamber has states ``free``, ``res`` and ``occ``; any other
chamber counts its robots in states ``c0`` .. ``cM``.
"""

from __future__ import annotations

import keyword
import re
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from ..core import Lts
from ..lang.parser import KEYWORDS
from .plans import RoutePlan, chamber_of, validate_plan
from .topology import EnvGraph

KINDS = ("start", "try", "ok", "take", "busy")
_IDENT = re.compile(r"[A-Za-z][A-Za-z0-9]*(\[[0-9]+\])?$")


class NameCollision(ValueError):
    pass


class CapacityUnderflow(AssertionError):
    pass


class CapacityExceeded(ValueError):
    pass


def service_name(kind: str, robot: str, edge: Optional[int] = None) -> str:
    return f"{kind}_{robot}" if edge is None else f"{kind}_{robot}_{edge}"


def parse_service(name: str) -> tuple[str, str, Optional[int]]:
    """Inverse of :func:`service_name`: ``(kind, robot, edge or None)``."""
    kind, _, rest = name.partition("_")
    if kind == "start":
        return kind, rest, None
    robot, _, edge = rest.rpartition("_")
    return kind, robot, int(edge)


def _limit(g: EnvGraph, chamber: str, robots: int) -> int:
    cap = g.chamber(chamber).capacity
    return robots if cap is None else min(cap, robots)


@dataclass(frozen=True)
class _Move:
    robot: str
    edge: int
    src: str  # label
    dst: str  # label

    @property
    def cur(self) -> str:
        return chamber_of(self.src)

    @property
    def nxt(self) -> str:
        return chamber_of(self.dst)


def _check_names(g: EnvGraph, plans: Sequence[RoutePlan]) -> None:
    names = [p.robot for p in plans]
    if len(set(names)) != len(names):
        raise NameCollision("robot names must be distinct")
    taken = set(g.names)
    for n in names + g.names:
        if not _IDENT.match(n) or n in KEYWORDS or keyword.iskeyword(n) or "_" in n:
            raise NameCollision(f"{n!r} cannot be used as an IMDS name")
    for n in names:
        if n in taken:
            raise NameCollision(f"robot {n} has the same name as a chamber")


class _Emitter:
    def __init__(self, g: EnvGraph, plans: Sequence[RoutePlan]):
        self.g = g
        self.plans = list(plans)
        self.robots = [p.robot for p in plans]
        self.moves: dict[str, list[_Move]] = {}
        for p in plans:
            self.moves[p.robot] = [_Move(p.robot, i, a, b) for i, (a, b) in enumerate(p.steps)]
        self.services: dict[str, list[str]] = {c: [] for c in g.names}
        self.actions: dict[str, list[str]] = {c: [] for c in g.names}

    def limit(self, chamber: str) -> int:
        return _limit(self.g, chamber, len(self.robots))

    def single(self, chamber: str) -> bool:
        return self.limit(chamber) == 1

    def states(self, chamber: str) -> list[str]:
        if self.single(chamber):
            return ["free", "res", "occ"]
        return [f"c{k}" for k in range(self.limit(chamber) + 1)]

    def holding(self, chamber: str) -> list[str]:
        """States in which a robot may be standing in ``chamber``."""
        if self.single(chamber):
            return ["occ"]
        return [f"c{k}" for k in range(1, self.limit(chamber) + 1)]

    def admitting(self, chamber: str) -> list[tuple[str, str]]:
        """(before, after) state pairs for a reservation."""
        if self.single(chamber):
            return [("free", "res")]
        return [(f"c{k}", f"c{k + 1}") for k in range(self.limit(chamber))]

    def refusing(self, chamber: str) -> list[str]:
        if self.single(chamber):
            return ["res", "occ"]
        return [f"c{self.limit(chamber)}"]

    def releasing(self, chamber: str) -> list[tuple[str, str]]:
        if self.single(chamber):
            return [("occ", "free")]
        pairs = []
        for k in range(1, self.limit(chamber) + 1):
            if k - 1 < 0:
                raise CapacityUnderflow(f"release below zero in {chamber}")
            pairs.append((f"c{k}", f"c{k - 1}"))
        return pairs

    def entering(self, chamber: str) -> list[tuple[str, str]]:
        if self.single(chamber):
            return [("res", "occ")]
        return [(s, s) for s in self.holding(chamber)]

    def service(self, chamber: str, name: str) -> None:
        if name not in self.services[chamber]:
            self.services[chamber].append(name)

    def action(self, chamber: str, robot: str, svc: str, state: str, out: Optional[tuple[str, str]], new: str):
        self.service(chamber, svc)
        lhs = f"{{{robot}.{chamber}.{svc}, {chamber}.{state}}}"
        if out is None:
            rhs = f"{{{chamber}.{new}}}"
        else:
            rhs = f"{{{robot}.{out[0]}.{out[1]}, {chamber}.{new}}}"
        self.actions[chamber].append(f"{lhs} -> {rhs},")

    def next_tries(self, plan: RoutePlan, label: str) -> list[tuple[str, str]]:
        return [
            (m.nxt, service_name("try", plan.robot, m.edge))
            for m in self.moves[plan.robot]
            if m.src == label
        ]

    def emit_plan(self, plan: RoutePlan) -> None:
        r = plan.robot
        s = chamber_of(plan.start)
        start = service_name("start", r)
        self.service(s, start)
        for st in self.holding(s):
            for out in self.next_tries(plan, plan.start):
                self.action(s, r, start, st, out, st)
        for m in self.moves[r]:
            branching = len(plan.successors(m.src)) > 1
            t = service_name("try", r, m.edge)
            ok = service_name("ok", r, m.edge)
            take = service_name("take", r, m.edge)
            busy = service_name("busy", r, m.edge)
            for before, after in self.admitting(m.nxt):
                self.action(m.nxt, r, t, before, (m.cur, ok), after)
            if branching:
                for st in self.refusing(m.nxt):
                    self.action(m.nxt, r, t, st, (m.cur, busy), st)
                for st in self.holding(m.cur):
                    for out in self.next_tries(plan, m.src):
                        self.action(m.cur, r, busy, st, out, st)
            for before, after in self.releasing(m.cur):
                self.action(m.cur, r, ok, before, (m.nxt, take), after)
            for before, after in self.entering(m.nxt):
                for out in self.next_tries(plan, m.dst):
                    self.action(m.nxt, r, take, before, out, after)
                if m.dst in plan.terminators:
                    self.action(m.nxt, r, take, before, None, after)

    def initial_state(self, chamber: str) -> str:
        here = sum(1 for p in self.plans if chamber_of(p.start) == chamber)
        if here > self.limit(chamber):
            raise CapacityExceeded(f"{here} robots start in {chamber}, which holds {self.limit(chamber)}")
        if self.single(chamber):
            return "occ" if here else "free"
        return f"c{here}"

    def render(self) -> str:
        for p in self.plans:
            self.emit_plan(p)
        agents = ", ".join(self.robots)
        out = []
        for c in self.g.names:
            formals = f"agents {agents}"
            nbrs = self.g.neighbors(c)
            if nbrs:
                formals += f"; servers {', '.join(nbrs)}"
            out.append(f"server: {c}({formals}),")
            out.append(f"services {{{', '.join(self.services[c])}}},")
            out.append(f"states {{{', '.join(self.states(c))}}},")
            out.append("actions {")
            out += self.actions[c]
            out.append("}")
            out.append("")
        out.append(f"servers {', '.join(self.g.names)};")
        out.append(f"agents {agents};")
        out.append("")
        out.append("init -> {")
        for c in self.g.names:
            actuals = ", ".join(self.robots + self.g.neighbors(c))
            out.append(f"{c}({actuals}).{self.initial_state(c)},")
        for p in self.plans:
            out.append(f"{p.robot}.{chamber_of(p.start)}.{service_name('start', p.robot)},")
        out.append("}.")
        return "\n".join(out) + "\n"


def compile_to_imds(g: EnvGraph, plans: Sequence[RoutePlan]) -> str:
    """IMDS source for ``plans`` moving on ``g``; one server per chamber, one agent per robot.

    Raises:
        NameCollision: duplicate robots, or names unusable as identifiers
            (underscores are reserved as service-name separators).
        PlanError: a step that is not a door, or a route end that does not terminate.
        CapacityExceeded: more robots start in a chamber than it holds.
    """
    if not plans:
        raise ValueError("nothing to compile")
    _check_names(g, plans)
    for p in plans:
        validate_plan(g, p)
    return _Emitter(g, plans).render()


# -- protocol safety ---------------------------------------------------------------


def attribution(g: EnvGraph, plans: Sequence[RoutePlan], service: str, at: str) -> list[str]:
    """Chambers a robot is accounted to while ``service`` is pending at chamber ``at``."""
    kind, robot, edge = parse_service(service)
    if kind == "start":
        return [at]
    plan = next(p for p in plans if p.robot == robot)
    src, dst = (chamber_of(x) for x in plan.steps[edge])
    if kind in ("try", "busy"):
        return [src]
    if kind == "ok":
        return [src, dst]
    return [dst]


def check_protocol_safety(lts: Lts, g: EnvGraph, plans: Sequence[RoutePlan]) -> list[str]:
    """Check occupancy bookkeeping on every reachable configuration.

    A single-robot chamber never has more than one robot accounted to it, and
    is not ``free`` while one is; a counting chamber's count covers the
    robots accounted to it and stays within bounds. Every moving robot is
    accounted somewhere. Returns a description of each violation.
    """
    limits = {c: _limit(g, c, len(plans)) for c in g.names}
    problems = []
    for n in range(lts.num_nodes):
        c = lts.config(n)
        inside = {ch: 0 for ch in g.names}
        for agent, msg in c.pending.items():
            where = attribution(g, plans, msg.service, msg.server)
            if not where:
                problems.append(f"node {n}: {agent} is in no chamber")
            for ch in where:
                inside[ch] += 1
        for ch in g.names:
            st = c.states[ch]
            if limits[ch] == 1:
                if inside[ch] > 1:
                    problems.append(f"node {n}: {inside[ch]} robots in {ch}")
                if inside[ch] and st == "free":
                    problems.append(f"node {n}: {ch} is free but holds a robot")
            else:
                k = int(st[1:])
                if not inside[ch] <= k <= limits[ch]:
                    problems.append(f"node {n}: {ch} counts {k} with {inside[ch]} robots inside")
    return problems


def occupied_chambers(lts: Lts, node: int, g: EnvGraph) -> list[str]:
    """Single-robot chambers in state ``occ`` at ``node``."""
    c = lts.config(node)
    return sorted(ch for ch in g.names if c.states[ch] == "occ")
