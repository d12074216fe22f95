"""Chamber graphs: construction, text format, and the quadrant rotation."""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Optional

SIDE = "side"
CENTRAL = "central"


class TopologyError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


class UnsupportedTopology(ValueError):
    pass


class NoAutomorphism(ValueError):
    pass


@dataclass(frozen=True)
class Chamber:
    name: str
    capacity: Optional[int]  # None = unbounded
    kind: str

    @classmethod
    def make(cls, name: str, capacity: Optional[int]) -> "Chamber":
        if capacity is not None and capacity < 1:
            raise TopologyError(f"chamber {name} has non-positive capacity {capacity}")
        return cls(name, capacity, CENTRAL if capacity == 1 else SIDE)


def _door(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a <= b else (b, a)


@dataclass(frozen=True)
class EnvGraph:
    chambers: tuple[Chamber, ...]
    doors: frozenset[tuple[str, str]]

    def __post_init__(self):
        names = [c.name for c in self.chambers]
        seen = set()
        for n in names:
            if n in seen:
                raise TopologyError(f"duplicate chamber {n}")
            seen.add(n)
        for a, b in self.doors:
            for end in (a, b):
                if end not in seen:
                    raise TopologyError(f"door {a}-{b} names undeclared chamber {end}")
            if a == b:
                raise TopologyError(f"door from {a} to itself")
        if names:
            reached = {names[0]}
            queue = deque([names[0]])
            while queue:
                for m in self.neighbors(queue.popleft()):
                    if m not in reached:
                        reached.add(m)
                        queue.append(m)
            if len(reached) != len(names):
                missing = sorted(seen - reached)
                raise TopologyError(f"graph is disconnected: {', '.join(missing)} unreachable")

    @classmethod
    def build(cls, chambers: Iterable[tuple[str, Optional[int]]], doors: Iterable[tuple[str, str]]):
        return cls(
            tuple(Chamber.make(n, c) for n, c in chambers),
            frozenset(_door(a, b) for a, b in doors),
        )

    @property
    def names(self) -> list[str]:
        return [c.name for c in self.chambers]

    def chamber(self, name: str) -> Chamber:
        for c in self.chambers:
            if c.name == name:
                return c
        raise KeyError(name)

    def __contains__(self, name: str) -> bool:
        return any(c.name == name for c in self.chambers)

    def is_side(self, name: str) -> bool:
        return self.chamber(name).kind == SIDE

    def is_central(self, name: str) -> bool:
        return self.chamber(name).kind == CENTRAL

    def has_door(self, a: str, b: str) -> bool:
        return _door(a, b) in self.doors

    def neighbors(self, name: str) -> list[str]:
        out = [b if a == name else a for a, b in self.doors if name in (a, b)]
        return sorted(out)

    def degree(self, name: str) -> int:
        return len(self.neighbors(name))

    def shortest_path(self, src: str, dst: str) -> Optional[list[str]]:
        parent = {src: None}
        queue = deque([src])
        while queue:
            n = queue.popleft()
            if n == dst:
                path = []
                while n is not None:
                    path.append(n)
                    n = parent[n]
                return path[::-1]
            for m in self.neighbors(n):
                if m not in parent:
                    parent[m] = n
                    queue.append(m)
        return None


SIDE_RING = ("AW", "AN", "AE", "AS")
CENTRAL_RING = ("QNW", "QNE", "QSE", "QSW")


def quadrant_topology() -> EnvGraph:
    """Four unbounded side chambers around a ring of four single-robot chambers.

    Each central chamber opens to its two ring neighbours and to the two
    side chambers it touches: QNW to AW and AN, QNE to AN and AE, and so on.
    """
    doors = [
        ("QNW", "QNE"),
        ("QNE", "QSE"),
        ("QSE", "QSW"),
        ("QSW", "QNW"),
        ("QNW", "AW"),
        ("QNW", "AN"),
        ("QNE", "AN"),
        ("QNE", "AE"),
        ("QSE", "AE"),
        ("QSE", "AS"),
        ("QSW", "AS"),
        ("QSW", "AW"),
    ]
    chambers = [(n, None) for n in SIDE_RING] + [(n, 1) for n in ("QNW", "QNE", "QSW", "QSE")]
    return EnvGraph.build(chambers, doors)


def rotation(k: int) -> dict[str, str]:
    """Quarter-turn ``k`` times clockwise: AW->AN->AE->AS and QNW->QNE->QSE->QSW."""
    k %= 4
    out = {}
    for ring in (SIDE_RING, CENTRAL_RING):
        for i, name in enumerate(ring):
            out[name] = ring[(i + k) % 4]
    return out


def rotation_between(src: str, dst: str) -> dict[str, str]:
    """The quadrant rotation that maps chamber ``src`` onto ``dst``.

    Raises:
        NoAutomorphism: if the chambers are of different kinds or unknown.
    """
    for ring in (SIDE_RING, CENTRAL_RING):
        if src in ring and dst in ring:
            return rotation(ring.index(dst) - ring.index(src))
    raise NoAutomorphism(f"no rotation of the quadrant topology maps {src} to {dst}")


def require_quadrant(chambers: Iterable[str]) -> None:
    known = set(SIDE_RING) | set(CENTRAL_RING)
    stray = sorted(set(chambers) - known)
    if stray:
        raise UnsupportedTopology(f"chambers outside the quadrant topology: {', '.join(stray)}")


_LINE_RE = {
    "chamber": re.compile(r"chamber\s+(\S+)\s+capacity\s+(\d+|inf)$"),
    "door": re.compile(r"door\s+(\S+)\s+(\S+)$"),
}


def load_env_graph(text: str) -> EnvGraph:
    """Parse ``chamber <name> capacity <n|inf>`` and ``door <a> <b>`` lines.

    Raises:
        TopologyError: with a line number for malformed lines or duplicate
            chambers; without one for undeclared door ends or disconnection.
    """
    chambers: list[tuple[str, Optional[int]]] = []
    doors: list[tuple[str, str]] = []
    seen: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _LINE_RE["chamber"].match(line)
        if m:
            name, cap = m.group(1), m.group(2)
            if name in seen:
                raise TopologyError(f"duplicate chamber {name}", lineno)
            seen.add(name)
            capacity = None if cap == "inf" else int(cap)
            if capacity == 0:
                raise TopologyError(f"chamber {name} has capacity 0", lineno)
            chambers.append((name, capacity))
            continue
        m = _LINE_RE["door"].match(line)
        if m:
            doors.append((m.group(1), m.group(2)))
            continue
        raise TopologyError(f"cannot parse {line!r}", lineno)
    if not chambers:
        raise TopologyError("no chambers declared")
    return EnvGraph.build(chambers, doors)


def dump_env_graph(g: EnvGraph) -> str:
    lines = [
        f"chamber {c.name} capacity {'inf' if c.capacity is None else c.capacity}" for c in g.chambers
    ]
    lines += [f"door {a} {b}" for a, b in sorted(g.doors)]
    return "\n".join(lines) + "\n"
