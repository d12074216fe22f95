"""Robot route plans: representation, file format, generation and partitioning.

A plan is a directed graph over *labels*. A label is a chamber name,
optionally followed by ``@tag`` so that one chamber can appear at several
points of a route (``QNE`` and ``QNE@2`` are both the chamber QNE).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from typing import Iterable, Optional, Sequence, Union

from .topology import (
    EnvGraph,
    NoAutomorphism,
    quadrant_topology,
    require_quadrant,
    rotation_between,
)


class PlanError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


class NoRouteExists(ValueError):
    pass


class DiscontinuousFragments(ValueError):
    pass


class UnanchorableCycle(ValueError):
    pass


def chamber_of(label: str) -> str:
    return label.split("@", 1)[0]


@dataclass(frozen=True)
class RoutePlan:
    robot: str
    start: str
    steps: tuple[tuple[str, str], ...]
    terminators: frozenset[str] = frozenset()

    @classmethod
    def linear(
        cls, robot: str, chambers: Sequence[str], cyclic: bool = False, terminate: bool = True
    ) -> "RoutePlan":
        """A plan walking ``chambers`` in order; repeated chambers get fresh tags.

        A cyclic plan steps from the last chamber back to the first and has
        no terminators.
        """
        if not chambers:
            raise PlanError("a route needs at least one chamber")
        labels, count = [], {}
        for c in chambers:
            count[c] = count.get(c, 0) + 1
            labels.append(c if count[c] == 1 else f"{c}@{count[c]}")
        steps = list(zip(labels, labels[1:]))
        if cyclic:
            if len(labels) < 2:
                raise PlanError("a cyclic route needs at least two chambers")
            steps.append((labels[-1], labels[0]))
        ends = frozenset() if cyclic or not terminate else frozenset([labels[-1]])
        return cls(robot, labels[0], tuple(steps), ends)

    @property
    def labels(self) -> list[str]:
        out = [self.start]
        for a, b in self.steps:
            for x in (a, b):
                if x not in out:
                    out.append(x)
        return out

    def successors(self, label: str) -> list[str]:
        return [b for a, b in self.steps if a == label]

    @property
    def ends(self) -> list[str]:
        return [x for x in self.labels if not self.successors(x)]

    @property
    def cyclic(self) -> bool:
        color: dict[str, int] = {}
        for root in self.labels:
            if root in color:
                continue
            stack = [(root, iter(self.successors(root)))]
            color[root] = 1
            while stack:
                n, it = stack[-1]
                nxt = next(it, None)
                if nxt is None:
                    color[n] = 2
                    stack.pop()
                elif color.get(nxt) == 1:
                    return True
                elif nxt not in color:
                    color[nxt] = 1
                    stack.append((nxt, iter(self.successors(nxt))))
        return False

    @property
    def is_linear(self) -> bool:
        return all(len(self.successors(x)) <= 1 for x in self.labels)

    def chamber_sequence(self) -> list[str]:
        """Chambers visited by a linear plan, starting chamber first, each label once."""
        if not self.is_linear:
            raise PlanError(f"plan of {self.robot} branches")
        seq, label, seen = [], self.start, set()
        while label is not None and label not in seen:
            seen.add(label)
            seq.append(chamber_of(label))
            nxt = self.successors(label)
            label = nxt[0] if nxt else None
        return seq

    def chambers(self) -> set[str]:
        return {chamber_of(x) for x in self.labels}

    def renamed(self, robot: str) -> "RoutePlan":
        return replace(self, robot=robot)

    def mapped(self, table: dict[str, str]) -> "RoutePlan":
        """Apply a chamber renaming, keeping tags."""

        def m(label: str) -> str:
            c, sep, tag = label.partition("@")
            return table[c] + sep + tag

        return RoutePlan(
            self.robot,
            m(self.start),
            tuple((m(a), m(b)) for a, b in self.steps),
            frozenset(m(t) for t in self.terminators),
        )


def validate_plan(g: EnvGraph, plan: RoutePlan) -> None:
    """Raise :class:`PlanError` unless every step is a door and ends are terminators."""
    for label in plan.labels:
        if chamber_of(label) not in g:
            raise PlanError(f"plan of {plan.robot} visits unknown chamber {chamber_of(label)}")
    for a, b in plan.steps:
        if not g.has_door(chamber_of(a), chamber_of(b)):
            raise PlanError(f"plan of {plan.robot}: no door between {chamber_of(a)} and {chamber_of(b)}")
    if len(set(plan.steps)) != len(plan.steps):
        raise PlanError(f"plan of {plan.robot} repeats a step")
    for t in plan.terminators:
        if t not in plan.labels:
            raise PlanError(f"plan of {plan.robot}: terminator {t} is not on the route")
    for e in plan.ends:
        if e not in plan.terminators:
            raise PlanError(f"plan of {plan.robot}: route ends at {e} without terminating")
    if not plan.cyclic:
        _check_simple_paths(plan)


def _check_simple_paths(plan: RoutePlan) -> None:
    def walk(label: str, seen: frozenset[str]) -> None:
        for nxt in plan.successors(label):
            c = chamber_of(nxt)
            if c in seen:
                raise PlanError(f"acyclic plan of {plan.robot} revisits chamber {c}")
            walk(nxt, seen | {c})

    walk(plan.start, frozenset([chamber_of(plan.start)]))


# -- plan files ---------------------------------------------------------------------

_ROBOT_RE = re.compile(r"robot\s+(\S+)\s+start\s+(\S+)$")
_STEP_RE = re.compile(r"step\s+(\S+)\s+(\S+)$")
_END_RE = re.compile(r"end\s+(\S+)$")


def load_plans(text: str) -> list[RoutePlan]:
    """Read ``robot``/``step``/``end`` blocks; several robots may share a file."""
    plans: list[RoutePlan] = []
    current: Optional[dict] = None

    def flush():
        if current is not None:
            plans.append(
                RoutePlan(current["robot"], current["start"], tuple(current["steps"]), frozenset(current["ends"]))
            )

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if m := _ROBOT_RE.match(line):
            flush()
            current = {"robot": m.group(1), "start": m.group(2), "steps": [], "ends": []}
            continue
        if current is None:
            raise PlanError("expected a robot line first", lineno)
        if m := _STEP_RE.match(line):
            current["steps"].append((m.group(1), m.group(2)))
        elif m := _END_RE.match(line):
            current["ends"].append(m.group(1))
        else:
            raise PlanError(f"cannot parse {line!r}", lineno)
    flush()
    if not plans:
        raise PlanError("no robot declared")
    return plans


def dump_plans(plans: Iterable[RoutePlan]) -> str:
    out = []
    for p in plans:
        out.append(f"robot {p.robot} start {p.start}")
        out += [f"step {a} {b}" for a, b in p.steps]
        out += [f"end {t}" for t in sorted(p.terminators)]
    return "\n".join(out) + "\n"


# -- generation -------------------------------------------------------------------------


def generate_similar_behavior(plan: RoutePlan, start: str) -> RoutePlan:
    """Rotate the quadrant-topology plan so that it starts at ``start``; turns are kept."""
    require_quadrant(plan.chambers())
    require_quadrant([start])
    return plan.mapped(rotation_between(chamber_of(plan.start), start))


def generate_identical_fleet(plan: RoutePlan, count: int, prefix: str = "ROBOT") -> list[RoutePlan]:
    if count < 1:
        raise ValueError("fleet size must be at least 1")
    return [plan.renamed(f"{prefix}{i}") for i in range(1, count + 1)]


def _simple_paths(
    g: EnvGraph,
    start: str,
    stop: callable,
    forbidden: frozenset[tuple[str, str]] = frozenset(),
) -> list[list[str]]:
    """Simple paths from ``start`` that end at the first chamber satisfying ``stop``.

    Interior chambers never satisfy ``stop``. Paths come out in
    lexicographic order of neighbour names.
    """
    out: list[list[str]] = []

    def walk(path: list[str]) -> None:
        for nxt in g.neighbors(path[-1]):
            if nxt in path or (path[-1], nxt) in forbidden:
                continue
            if stop(nxt):
                out.append(path + [nxt])
            elif g.is_central(nxt):
                walk(path + [nxt])

    walk([start])
    return out


def generate_all_behaviors(g: EnvGraph, start: str, robot: str = "ROBOT") -> list[RoutePlan]:
    """Every simple route from ``start`` through central chambers to a side chamber."""
    if start not in g:
        raise KeyError(start)
    paths = _simple_paths(g, start, g.is_side)
    return [RoutePlan.linear(robot, p) for p in sorted(paths)]


def generate_many_behaviors(
    g: EnvGraph,
    start: str,
    targets: Iterable[str],
    restrictions: Iterable[tuple[str, str]] = (),
    robot: str = "ROBOT",
    reverse: bool = False,
) -> RoutePlan:
    """One branching plan holding every simple route from ``start`` to a target.

    The plan is the union of the steps of those routes, one label per
    chamber, so it may contain cycles (a robot can drift around the ring).
    Which branch is taken is left open. With ``reverse`` every union step
    into a non-target chamber may also be walked backwards, unless that
    backward step is itself restricted.

    Raises:
        NoRouteExists: if the restrictions cut off every target.
    """
    targets = frozenset(targets)
    if not targets:
        raise ValueError("targets must be non-empty")
    forbidden = frozenset(restrictions)
    paths = _simple_paths(g, start, targets.__contains__, forbidden)
    if not paths:
        raise NoRouteExists(f"no route from {start} to {', '.join(sorted(targets))}")
    steps: list[tuple[str, str]] = []
    for p in sorted(paths):
        for step in zip(p, p[1:]):
            if step not in steps:
                steps.append(step)
    if reverse:
        for a, b in list(steps):
            back = (b, a)
            if b not in targets and back not in forbidden and back not in steps:
                steps.append(back)
    return RoutePlan(robot, start, tuple(steps), targets & {b for _, b in steps})


# -- composition and partitioning ---------------------------------------------------------


@dataclass(frozen=True)
class SubRoute:
    parent: str
    steps: tuple[str, ...]
    starts_at_side: bool
    ends_at_side: bool

    def to_plan(self, robot: Optional[str] = None) -> RoutePlan:
        return RoutePlan.linear(robot or self.parent, self.steps)


Fragment = Union[RoutePlan, SubRoute, Sequence[str]]


def _fragment_chambers(f: Fragment) -> list[str]:
    if isinstance(f, RoutePlan):
        return f.chamber_sequence()
    if isinstance(f, SubRoute):
        return list(f.steps)
    return list(f)


def compose_subroutes(
    parts: Sequence[Fragment],
    mode: str = "identical",
    start: Optional[str] = None,
    robot: str = "ROBOT",
    cyclic: bool = False,
) -> RoutePlan:
    """Concatenate route fragments end to start.

    In ``similar`` mode the first fragment is rotated onto ``start`` and every
    later fragment is rotated so that it begins where the previous one ended.
    A cyclic result must end where it began; the closing chamber is dropped.

    Raises:
        DiscontinuousFragments: if a fragment does not begin where the
            previous one ended (or cannot be rotated to).
    """
    if not parts:
        raise ValueError("nothing to compose")
    if mode not in ("identical", "similar"):
        raise ValueError(f"unknown mode {mode}")
    seq: list[str] = []
    for i, part in enumerate(parts):
        chambers = _fragment_chambers(part)
        anchor = start if i == 0 else (seq[-1] if seq else None)
        if mode == "similar" and anchor is not None:
            require_quadrant(chambers)
            try:
                table = rotation_between(chambers[0], anchor)
            except NoAutomorphism as exc:
                raise DiscontinuousFragments(str(exc)) from None
            chambers = [table[c] for c in chambers]
        if seq:
            if chambers[0] != seq[-1]:
                raise DiscontinuousFragments(
                    f"fragment {i} starts at {chambers[0]} but the route is at {seq[-1]}"
                )
            chambers = chambers[1:]
        seq.extend(chambers)
    if cyclic:
        if len(seq) < 3 or seq[-1] != seq[0]:
            raise DiscontinuousFragments("a cyclic route must end where it starts")
        seq = seq[:-1]
    return RoutePlan.linear(robot, seq, cyclic=cyclic)


def _closed_walk(plan: RoutePlan) -> list[str]:
    seq = plan.chamber_sequence()
    return seq + [seq[0]] if plan.cyclic else seq


def _split(walk: list[str], cut: callable) -> list[list[str]]:
    pieces, cur = [], [walk[0]]
    for c in walk[1:]:
        cur.append(c)
        if cut(c):
            pieces.append(cur)
            cur = [c]
    if len(cur) > 1:
        pieces.append(cur)
    return pieces


def _rotate_to(walk: list[str], is_anchor: callable) -> list[str]:
    """Restart a closed walk (first == last) at its first anchor chamber."""
    body = walk[:-1]
    k = next((i for i, c in enumerate(body) if is_anchor(c)), None)
    if k is None:
        return walk
    body = body[k:] + body[:k]
    return body + [body[0]]


def partition_route(
    plan: RoutePlan,
    method: str = "side-anchored",
    g: Optional[EnvGraph] = None,
    break_at: Optional[str] = None,
) -> list[SubRoute]:
    """Cut a linear plan into acyclic sub-routes.

    ``side-anchored`` cuts at every side-chamber visit. ``cycle-break`` also
    cuts at ``break_at`` and then extends each piece that starts or ends in a
    central chamber by a shortest path to the nearest side chamber not
    already on the piece (ties broken by name).

    Raises:
        UnanchorableCycle: if a piece would still repeat a chamber, i.e. the
            plan has a cycle with no side chamber on it.
    """
    g = g or quadrant_topology()
    if method == "side-anchored":
        cut = g.is_side
    elif method == "cycle-break":
        if break_at is None or not g.is_central(break_at):
            raise ValueError("cycle-break needs a central chamber to break at")
        cut = lambda c: g.is_side(c) or c == break_at  # noqa: E731
    else:
        raise ValueError(f"unknown partition method {method}")

    walk = _closed_walk(plan)
    if plan.cyclic:
        if not any(cut(c) for c in walk):
            raise UnanchorableCycle(f"cycle of {plan.robot} never visits a side chamber")
        walk = _rotate_to(walk, cut)
    pieces = _split(walk, cut) if len(walk) > 1 else [walk]
    if method == "cycle-break":
        pieces = [_extend(g, p) for p in pieces]
    out = []
    for p in pieces:
        if len(set(p)) != len(p):
            raise UnanchorableCycle(f"sub-route {'->'.join(p)} of {plan.robot} repeats a chamber")
        out.append(SubRoute(plan.robot, tuple(p), g.is_side(p[0]), g.is_side(p[-1])))
    return out


def _nearest_side(g: EnvGraph, frm: str, avoid: set[str]) -> list[str]:
    best: Optional[list[str]] = None
    for c in sorted(g.names):
        if not g.is_side(c) or c in avoid:
            continue
        path = g.shortest_path(frm, c)
        if path and (best is None or len(path) < len(best)):
            best = path
    if best is None:
        raise NoRouteExists(f"no side chamber reachable from {frm}")
    return best


def _extend(g: EnvGraph, piece: list[str]) -> list[str]:
    if g.is_central(piece[-1]):
        tail = _nearest_side(g, piece[-1], set(piece))
        piece = piece + tail[1:]
    if g.is_central(piece[0]):
        head = _nearest_side(g, piece[0], set(piece))
        piece = head[::-1][:-1] + piece
    return piece


def stage_plans(plans: Sequence[RoutePlan], k: int, g: Optional[EnvGraph] = None) -> list[RoutePlan]:
    """Stage ``k``: each robot runs its ``k``-th side-anchored sub-route (cyclically) and terminates."""
    out = []
    for p in plans:
        subs = partition_route(p, "side-anchored", g)
        out.append(subs[k % len(subs)].to_plan(p.robot))
    return out
