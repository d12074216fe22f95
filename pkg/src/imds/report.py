"""Versioned verification reports (``imds-report/1``) in JSON and text form.

A witness step is stored by content rather than node number, so a saved
witness can be replayed against the system it came from::

    {"agent": ..., "server": ..., "service": ..., "from": ..., "to": ...,
     "sends": "server.service" or null}
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .core import Configuration, apply_action, initial_configuration
from .model import GroundAction, SystemSpec
from .verify import Counterexample, Verdict

SCHEMA = "imds-report/1"
WITNESS_SCHEMA = "imds-witness/1"


class InvalidTrace(ValueError):
    pass


def step_record(a: GroundAction) -> dict:
    return {
        "agent": a.agent,
        "server": a.server,
        "service": a.in_msg.service,
        "from": a.in_state.state,
        "to": a.out_state.state,
        "sends": None if a.out_msg is None else f"{a.out_msg.server}.{a.out_msg.service}",
    }


def step_text(a: GroundAction) -> str:
    r = step_record(a)
    sends = "terminates" if r["sends"] is None else f"sends {r['sends']}"
    return f"{r['agent']} {r['server']}.{r['service']} {r['from']}->{r['to']} {sends}"


def witness_record(property: str, cex: Counterexample) -> dict:
    out = {
        "schema": WITNESS_SCHEMA,
        "property": property,
        "kind": cex.kind,
        "prefix": [step_record(s.action) for s in cex.prefix],
        "cycle": [step_record(s.action) for s in cex.cycle],
    }
    if cex.blocked_agents is not None:
        out["blocked"] = sorted(cex.blocked_agents)
    if cex.classification is not None:
        out["classification"] = cex.classification
    if cex.degenerate:
        out["degenerate"] = True
    return out


@dataclass
class Report:
    spec: str
    nodes: int
    edges: int
    verdicts: list[Verdict]
    warnings: list[str] = field(default_factory=list)
    informational: frozenset[str] = frozenset()

    @property
    def exit_status(self) -> int:
        return 0 if all(v.holds for v in self.verdicts if v.property not in self.informational) else 1

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "spec": self.spec,
            "nodes": self.nodes,
            "edges": self.edges,
            "warnings": list(self.warnings),
            "verdicts": [
                {
                    "property": v.property,
                    "holds": v.holds,
                    "informational": v.property in self.informational,
                    "summary": v.summary,
                    "witnesses": [witness_record(v.property, w) for w in v.witnesses],
                }
                for v in self.verdicts
            ],
        }

    def dumps_json(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"

    def dumps_text(self) -> str:
        lines = [SCHEMA, f"spec: {self.spec}", f"nodes: {self.nodes}", f"edges: {self.edges}"]
        lines.append(f"warnings: {len(self.warnings)}")
        lines += [f"  {w}" for w in self.warnings]
        for v in self.verdicts:
            status = "holds" if v.holds else "VIOLATED"
            note = " (informational)" if v.property in self.informational else ""
            lines.append(f"property {v.property}: {status}{note}")
            for key in sorted(v.summary):
                lines.append(f"  {key}: {_scalar(v.summary[key])}")
            for i, w in enumerate(v.witnesses, 1):
                head = f"  witness {i} ({w.kind}, {len(w.prefix)} steps"
                if w.cycle:
                    head += f" + cycle of {len(w.cycle)}"
                head += ")"
                if w.blocked_agents is not None:
                    head += f" blocked: {', '.join(sorted(w.blocked_agents))}"
                if w.classification:
                    head += f" [{w.classification}]"
                if w.degenerate:
                    head += " [all non-terminated agents]"
                lines.append(head)
                for k, s in enumerate(w.prefix, 1):
                    lines.append(f"    {k}. {step_text(s.action)}")
                if w.cycle:
                    lines.append("    cycle:")
                    for k, s in enumerate(w.cycle, 1):
                        lines.append(f"    {k}. {step_text(s.action)}")
        return "\n".join(lines) + "\n"


def _scalar(value) -> str:
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_scalar(v) for v in value) + "]"
    return str(value)


@dataclass(frozen=True)
class LoadedWitness:
    property: str
    kind: str
    prefix: tuple[GroundAction, ...]
    cycle: tuple[GroundAction, ...]


def _match(sys: SystemSpec, rec: dict) -> GroundAction:
    for a in sys.actions:
        if step_record(a) == {k: rec.get(k) for k in ("agent", "server", "service", "from", "to", "sends")}:
            return a
    raise InvalidTrace(f"no action of the system matches step {rec}")


def load_witness(data: dict, sys: SystemSpec, index: int = 0, property: Optional[str] = None) -> LoadedWitness:
    """Pick a witness from a report or witness document and bind it to ``sys``'s actions.

    Raises:
        InvalidTrace: unknown schema, missing witness, or unmatched steps.
    """
    schema = data.get("schema")
    if schema == WITNESS_SCHEMA:
        records = [data]
    elif schema == SCHEMA:
        records = [
            w
            for v in data["verdicts"]
            if property is None or v["property"] == property
            for w in v["witnesses"]
        ]
    else:
        raise InvalidTrace(f"unknown document schema {schema!r}")
    if not 0 <= index < len(records):
        raise InvalidTrace(f"witness {index} not found ({len(records)} available)")
    rec = records[index]
    return LoadedWitness(
        rec["property"],
        rec["kind"],
        tuple(_match(sys, s) for s in rec["prefix"]),
        tuple(_match(sys, s) for s in rec.get("cycle", [])),
    )


def replay_actions(sys: SystemSpec, actions: Sequence[GroundAction]) -> list[Configuration]:
    """Configurations visited by firing ``actions`` from the initial one.

    Raises:
        InvalidTrace: if some action is not enabled when its turn comes.
    """
    c = initial_configuration(sys)
    out = [c]
    for i, a in enumerate(actions, 1):
        if c.pending.get(a.agent) != a.in_msg or c.states.get(a.server) != a.in_state.state:
            raise InvalidTrace(f"step {i} ({a}) is not enabled")
        c = apply_action(c, a)
        out.append(c)
    return out
