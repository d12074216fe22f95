"""IMDS execution semantics and reachability-graph construction.

A configuration holds one state per server and, for every agent, either its
single pending message or its membership in the terminated set. Exactly one
action fires per transition.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Optional

from .model import GroundAction, Message, SystemSpec

log = logging.getLogger(__name__)

DEFAULT_LIMIT = 5_000_000


class ContractViolation(AssertionError):
    """An operation was called outside its precondition."""


class Configuration:
    """A global state: server states, pending messages, terminated agents.

    Equality and hashing are extensional: two configurations built from the
    same mappings in different insertion orders are equal.
    """

    __slots__ = ("states", "pending", "terminated", "_hash")

    def __init__(
        self,
        states: Mapping[str, str],
        pending: Mapping[str, Message],
        terminated: Iterable[str] = (),
    ):
        self.states = dict(states)
        self.pending = dict(pending)
        self.terminated = frozenset(terminated)
        overlap = self.terminated & self.pending.keys()
        if overlap:
            raise ContractViolation(f"agents both pending and terminated: {sorted(overlap)}")
        self._hash = hash(
            (frozenset(self.states.items()), frozenset(self.pending.items()), self.terminated)
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, Configuration):
            return NotImplemented
        return (
            self.states == other.states
            and self.pending == other.pending
            and self.terminated == other.terminated
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        states = ", ".join(f"{k}={v}" for k, v in self.states.items())
        pending = ", ".join(str(m) for m in self.pending.values())
        return f"Configuration({states}; pending {pending}; terminated {sorted(self.terminated)})"

    def is_partition_of(self, agents: Iterable[str]) -> bool:
        agents = set(agents)
        return (
            self.pending.keys() | self.terminated == agents
            and not (self.pending.keys() & self.terminated)
            and all(m.agent == a for a, m in self.pending.items())
        )


def initial_configuration(sys: SystemSpec) -> Configuration:
    """The configuration given by the init block (``sys`` must be validated)."""
    return Configuration(
        {st.server: st.state for st in sys.initial_states},
        {m.agent: m for m in sys.initial_messages},
    )


def enabled_actions(sys: SystemSpec, c: Configuration) -> list[GroundAction]:
    """Actions whose input message is pending and whose input state is current.

    Ordered by agent, then server (both in declaration order), then action
    index within ``sys.actions``.
    """
    agent_rank = {a: i for i, a in enumerate(sys.agents)}
    server_rank = {s.name: i for i, s in enumerate(sys.servers)}
    pending = set(c.pending.values())
    found = [
        (agent_rank[a.agent], server_rank[a.server], i, a)
        for i, a in enumerate(sys.actions)
        if a.in_msg in pending and c.states.get(a.server) == a.in_state.state
    ]
    found.sort(key=lambda t: t[:3])
    return [t[3] for t in found]


def apply_action(c: Configuration, a: GroundAction) -> Configuration:
    """Fire ``a`` in ``c``. ``a`` must be enabled in ``c``."""
    if c.pending.get(a.agent) != a.in_msg or c.states.get(a.server) != a.in_state.state:
        raise ContractViolation(f"action {a} is not enabled")
    states = dict(c.states)
    states[a.server] = a.out_state.state
    pending = dict(c.pending)
    terminated = c.terminated
    if a.out_msg is None:
        del pending[a.agent]
        terminated = terminated | {a.agent}
    else:
        pending[a.agent] = a.out_msg
    return Configuration(states, pending, terminated)


class Model:
    """Integer-indexed view of a :class:`SystemSpec` for fast exploration.

    A configuration is encoded as a flat tuple: one state index per server
    (declaration order) followed by one message id per agent, ``-1`` marking
    a terminated agent.
    """

    def __init__(self, sys: SystemSpec):
        self.sys = sys
        self.server_names = [s.name for s in sys.servers]
        self.server_index = {n: i for i, n in enumerate(self.server_names)}
        self.state_names = [list(s.states) for s in sys.servers]
        self.state_index = [{st: k for k, st in enumerate(s.states)} for s in sys.servers]
        self.agents = list(sys.agents)
        self.agent_index = {a: i for i, a in enumerate(self.agents)}
        self.nservers = len(self.server_names)
        self.nagents = len(self.agents)

        self.messages: list[Message] = []
        self.msg_index: dict[Message, int] = {}
        for m in sys.initial_messages:
            self._msg_id(m)
        for a in sys.actions:
            self._msg_id(a.in_msg)
            if a.out_msg is not None:
                self._msg_id(a.out_msg)
        self.msg_server = [self.server_index[m.server] for m in self.messages]
        self.msg_agent = [self.agent_index[m.agent] for m in self.messages]

        n = len(sys.actions)
        self.act_server = [0] * n
        self.act_agent = [0] * n
        self.act_out_state = [0] * n
        self.act_out_msg = [-1] * n
        self.table: dict[tuple[int, int], list[int]] = {}
        for i, a in enumerate(sys.actions):
            srv = self.server_index[a.server]
            self.act_server[i] = srv
            self.act_agent[i] = self.agent_index[a.agent]
            self.act_out_state[i] = self.state_index[srv][a.out_state.state]
            if a.out_msg is not None:
                self.act_out_msg[i] = self.msg_index[a.out_msg]
            key = (self.msg_index[a.in_msg], self.state_index[srv][a.in_state.state])
            self.table.setdefault(key, []).append(i)

    def _msg_id(self, m: Message) -> int:
        if m not in self.msg_index:
            self.msg_index[m] = len(self.messages)
            self.messages.append(m)
        return self.msg_index[m]

    def encode(self, c: Configuration) -> tuple[int, ...]:
        states = [self.state_index[i][c.states[name]] for i, name in enumerate(self.server_names)]
        pending = [
            self.msg_index[c.pending[a]] if a in c.pending else -1 for a in self.agents
        ]
        return tuple(states + pending)

    def decode(self, key: tuple[int, ...]) -> Configuration:
        S = self.nservers
        states = {name: self.state_names[i][key[i]] for i, name in enumerate(self.server_names)}
        pending = {}
        terminated = []
        for j, a in enumerate(self.agents):
            m = key[S + j]
            if m < 0:
                terminated.append(a)
            else:
                pending[a] = self.messages[m]
        return Configuration(states, pending, terminated)

    def initial_key(self) -> tuple[int, ...]:
        return self.encode(initial_configuration(self.sys))

    def successors(self, key: tuple[int, ...]) -> list[tuple[int, tuple[int, ...]]]:
        """``(action index, successor key)`` pairs in canonical order."""
        S = self.nservers
        out = []
        table = self.table
        for j in range(self.nagents):
            m = key[S + j]
            if m < 0:
                continue
            srv = self.msg_server[m]
            acts = table.get((m, key[srv]))
            if not acts:
                continue
            for act in acts:
                new = list(key)
                new[srv] = self.act_out_state[act]
                new[S + j] = self.act_out_msg[act]
                out.append((act, tuple(new)))
        return out

    def terminated_mask(self, key: tuple[int, ...]) -> int:
        S = self.nservers
        mask = 0
        for j in range(self.nagents):
            if key[S + j] < 0:
                mask |= 1 << j
        return mask


@dataclass(frozen=True)
class LtsStats:
    nodes: int
    edges: int
    frontier_peak: int


class Lts:
    """Reachability graph over configurations, nodes numbered in BFS order.

    Node 0 is the initial configuration. Out-edges of each node are stored
    contiguously in canonical action order.
    """

    def __init__(self, model: Model):
        self.model = model
        self.keys: list[tuple[int, ...]] = []
        self.index: dict[tuple[int, ...], int] = {}
        self.edge_src: list[int] = []
        self.edge_act: list[int] = []
        self.edge_dst: list[int] = []
        self.out_start: list[int] = [0]
        self.truncated = False
        self.frontier_peak = 0

    initial = 0

    @property
    def sys(self) -> SystemSpec:
        return self.model.sys

    @property
    def num_nodes(self) -> int:
        return len(self.keys)

    @property
    def num_edges(self) -> int:
        return len(self.edge_src)

    @property
    def stats(self) -> LtsStats:
        return LtsStats(self.num_nodes, self.num_edges, self.frontier_peak)

    def config(self, node: int) -> Configuration:
        return self.model.decode(self.keys[node])

    @property
    def nodes(self) -> list[Configuration]:
        return [self.config(n) for n in range(self.num_nodes)]

    def node_of(self, c: Configuration) -> Optional[int]:
        return self.index.get(self.model.encode(c))

    def action(self, index: int) -> GroundAction:
        return self.model.sys.actions[index]

    def expanded(self, node: int) -> bool:
        return node < len(self.out_start) - 1

    def out_edges(self, node: int) -> list[tuple[int, int]]:
        """``(action index, target node)`` pairs leaving ``node``."""
        if not self.expanded(node):
            return []
        lo, hi = self.out_start[node], self.out_start[node + 1]
        return list(zip(self.edge_act[lo:hi], self.edge_dst[lo:hi]))

    def successors(self, node: int) -> list[int]:
        if not self.expanded(node):
            return []
        return self.edge_dst[self.out_start[node] : self.out_start[node + 1]]

    def out_degree(self, node: int) -> int:
        if not self.expanded(node):
            return 0
        return self.out_start[node + 1] - self.out_start[node]

    def edges(self) -> Iterator[tuple[int, GroundAction, int]]:
        acts = self.model.sys.actions
        for s, a, d in zip(self.edge_src, self.edge_act, self.edge_dst):
            yield s, acts[a], d

    def terminated_mask(self, node: int) -> int:
        return self.model.terminated_mask(self.keys[node])

    def sinks(self) -> list[int]:
        return [n for n in range(self.num_nodes) if self.out_degree(n) == 0]

    def predecessors(self) -> list[list[int]]:
        preds: list[list[int]] = [[] for _ in range(self.num_nodes)]
        for s, d in zip(self.edge_src, self.edge_dst):
            preds[d].append(s)
        return preds


class StateSpaceExceeded(Exception):
    """Exploration discovered more configurations than the node limit allows."""

    def __init__(self, limit: int, lts: Lts):
        self.limit = limit
        self.lts = lts
        self.nodes = lts.num_nodes
        self.frontier = lts.num_nodes - (len(lts.out_start) - 1)
        super().__init__(
            f"state space exceeds limit of {limit} nodes "
            f"({self.nodes} discovered, frontier {self.frontier})"
        )


def build_lts(sys: SystemSpec, limit: int = DEFAULT_LIMIT) -> Lts:
    """Explore every reachable configuration of ``sys`` breadth-first.

    Raises:
        StateSpaceExceeded: when more than ``limit`` distinct configurations
            are discovered. The exception carries the truncated graph.
    """
    model = Model(sys)
    lts = Lts(model)
    keys, index = lts.keys, lts.index
    src, act, dst, out_start = lts.edge_src, lts.edge_act, lts.edge_dst, lts.out_start

    init = model.initial_key()
    keys.append(init)
    index[init] = 0
    head = 0
    peak = 1
    while head < len(keys):
        for a, succ in model.successors(keys[head]):
            target = index.get(succ)
            if target is None:
                if len(keys) >= limit:
                    lts.truncated = True
                    lts.frontier_peak = max(peak, len(keys) - head)
                    # drop the half-recorded edges of the node being expanded
                    del src[out_start[-1] :], act[out_start[-1] :], dst[out_start[-1] :]
                    raise StateSpaceExceeded(limit, lts)
                target = len(keys)
                index[succ] = target
                keys.append(succ)
            src.append(head)
            act.append(a)
            dst.append(target)
        out_start.append(len(src))
        head += 1
        frontier = len(keys) - head
        if frontier > peak:
            peak = frontier
    lts.frontier_peak = peak
    log.debug("built LTS: %d nodes, %d edges", lts.num_nodes, lts.num_edges)
    return lts


def dump_lts(lts: Lts) -> str:
    """Line-oriented text dump with stable ordering."""
    lines = []
    sys = lts.sys
    for n in range(lts.num_nodes):
        c = lts.config(n)
        states = " ".join(f"{s}={c.states[s]}" for s in sys.server_names)
        pending = " ".join(
            f"{a}:{c.pending[a].server}.{c.pending[a].service}" for a in sys.agents if a in c.pending
        )
        terminated = " ".join(a for a in sys.agents if a in c.terminated)
        lines.append(f"node {n}: {states}; pending {pending}; terminated {terminated}".rstrip())
    for s, a, d in lts.edges():
        lines.append(f"edge {s} {d} {a.in_msg}")
    return "\n".join(lines) + "\n"
