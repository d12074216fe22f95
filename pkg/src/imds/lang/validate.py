"""Static checks over an expanded :class:`SystemSpec`."""

from __future__ import annotations

from collections import Counter, defaultdict

from ..model import Message, SystemSpec
from .diagnostics import Diagnostics


def _reachable_messages(sys: SystemSpec, start: Message) -> set[Message]:
    """Messages an agent could syntactically produce from ``start``, ignoring server states."""
    by_input: dict[Message, list] = defaultdict(list)
    for a in sys.actions:
        by_input[a.in_msg].append(a)
    seen = {start}
    stack = [start]
    while stack:
        m = stack.pop()
        for a in by_input.get(m, ()):
            if a.out_msg is not None and a.out_msg not in seen:
                seen.add(a.out_msg)
                stack.append(a.out_msg)
    return seen


def validate_spec(sys: SystemSpec) -> Diagnostics:
    """Report structural errors and suspicious-but-legal constructs.

    Errors: undeclared services or states in ground actions or in the init
    block, and agents/servers without exactly one initial message/state.
    Warnings: services never sent or never consumed, syntactically
    unreachable states, and agents with no reachable terminating action.
    """
    diags = Diagnostics()
    services = {s.name: set(s.services) for s in sys.servers}
    states = {s.name: set(s.states) for s in sys.servers}

    for i, a in enumerate(sys.actions):
        here = a.server
        loc = sys.action_loc(i)
        if a.in_msg.service not in services[here]:
            diags.error(f"action {a} consumes undeclared service {a.in_msg.service} of {here}", *loc)
        for st in (a.in_state, a.out_state):
            if st.state not in states[here]:
                diags.error(f"action {a} uses undeclared state {st.state} of {here}", *loc)
        if a.out_msg is not None and a.out_msg.service not in services[a.out_msg.server]:
            diags.error(
                f"action {a} sends undeclared service {a.out_msg.service} of {a.out_msg.server}", *loc
            )

    init_count = Counter(st.server for st in sys.initial_states)
    for s in sys.servers:
        n = init_count[s.name]
        if n != 1:
            diags.error(f"server {s.name} has {n} initial states, expected 1")
    for st in sys.initial_states:
        if st.state not in states[st.server]:
            diags.error(f"initial state {st.state} is not declared for server {st.server}")

    msg_count = Counter(m.agent for m in sys.initial_messages)
    for agent in sys.agents:
        n = msg_count[agent]
        if n != 1:
            diags.error(f"agent {agent} has {n} initial messages, expected 1")
    for m in sys.initial_messages:
        if m.service not in services[m.server]:
            diags.error(f"initial message {m} uses undeclared service {m.service} of {m.server}")

    sent = {(m.server, m.service) for m in sys.initial_messages}
    sent |= {(a.out_msg.server, a.out_msg.service) for a in sys.actions if a.out_msg is not None}
    consumed = {(a.server, a.in_msg.service) for a in sys.actions}
    produced = {(st.server, st.state) for st in sys.initial_states}
    produced |= {(a.server, a.out_state.state) for a in sys.actions}
    for s in sys.servers:
        for svc in s.services:
            if (s.name, svc) not in consumed:
                diags.warning(f"service {svc} of {s.name} is never consumed by any action", *s.loc)
            if (s.name, svc) not in sent:
                diags.warning(f"service {svc} of {s.name} is never sent", *s.loc)
        for st in s.states:
            if (s.name, st) not in produced:
                diags.warning(f"state {st} of {s.name} is never reachable", *s.loc)

    terminating_inputs = {a.in_msg for a in sys.actions if a.terminating}
    first_msg = {}
    for m in sys.initial_messages:
        first_msg.setdefault(m.agent, m)
    for agent in sys.agents:
        if agent not in first_msg:
            continue
        if not (_reachable_messages(sys, first_msg[agent]) & terminating_inputs):
            diags.warning(f"agent {agent} can never terminate")
    return diags
