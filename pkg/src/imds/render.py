"""Plain-text sequence diagrams of counterexample traces."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .model import GroundAction, SystemSpec
from .report import InvalidTrace, replay_actions

CYCLE_START = "-- cycle --"
CYCLE_REPEATS = "-- cycle repeats --"


@dataclass(frozen=True)
class Event:
    index: int
    agent: str
    server: str
    service: str
    change: str  # "old->new"
    terminates: bool


@dataclass(frozen=True)
class SequenceDiagram:
    lanes: tuple[str, ...]
    events: tuple[Event, ...]
    cycle_from: int  # index into events where the cycle starts, or -1
    ending: tuple[str, ...]  # annotation lines after the last event

    def text(self) -> str:
        return _layout(self)


def render_sequence_diagram(
    sys: SystemSpec, prefix: Sequence[GroundAction], cycle: Sequence[GroundAction] = ()
) -> SequenceDiagram:
    """Replay the trace and lay it out with one lane per agent, then per server.

    Raises:
        InvalidTrace: if the trace cannot be replayed on ``sys``.
    """
    actions = list(prefix) + list(cycle)
    configs = replay_actions(sys, actions)
    if cycle and configs[len(prefix)] != configs[-1]:
        raise InvalidTrace("cycle does not return to its entry configuration")
    lanes = tuple(sys.agents) + tuple(s.name for s in sys.servers)
    events = tuple(
        Event(i, a.agent, a.server, a.in_msg.service, f"{a.in_state.state}->{a.out_state.state}", a.terminating)
        for i, a in enumerate(actions, 1)
    )
    end = configs[-1]
    ending = []
    if cycle:
        ending.append(CYCLE_REPEATS)
    waiting = [f"{ag} waits at {m.server}.{m.service}" for ag, m in sorted(end.pending.items())]
    enabled = any(
        end.pending.get(a.agent) == a.in_msg and end.states[a.server] == a.in_state.state for a in sys.actions
    )
    if not cycle:
        if not enabled and waiting:
            ending.append("** deadlock: " + "; ".join(waiting) + " **")
        elif not enabled:
            ending.append("** all agents terminated **")
        elif waiting:
            ending.append("end of trace: " + "; ".join(waiting))
    if end.terminated:
        ending.append("terminated: " + ", ".join(sorted(end.terminated)))
    return SequenceDiagram(lanes, events, len(prefix) if cycle else -1, tuple(ending))


def _layout(d: SequenceDiagram) -> str:
    width = max([12] + [len(l) + 2 for l in d.lanes])
    centers = {lane: i * width + width // 2 for i, lane in enumerate(d.lanes)}
    total = width * len(d.lanes)

    def lifelines() -> list[str]:
        row = [" "] * total
        for c in centers.values():
            row[c] = "|"
        return row

    head = "".join(lane.center(width) for lane in d.lanes).rstrip()
    out = [head, "".join(lifelines()).rstrip()]
    for k, e in enumerate(d.events):
        if k == d.cycle_from:
            out.append(CYCLE_START)
        row = lifelines()
        a, s = centers[e.agent], centers[e.server]
        lo, hi = min(a, s), max(a, s)
        for x in range(lo + 1, hi):
            row[x] = "-"
        row[hi - 1 if s > a else lo + 1] = ">" if s > a else "<"
        label = f" {e.service} "
        start = lo + 2
        if len(label) <= hi - lo - 3:
            row[start : start + len(label)] = label
        line = "".join(row).rstrip()
        note = f"{e.index:>3}. {e.change}" + (" (terminates)" if e.terminates else "")
        if len(label) > hi - lo - 3:
            note += f" [{e.service}]"
        out.append(f"{line}   {note}")
    out.extend(d.ending)
    return "\n".join(out) + "\n"
