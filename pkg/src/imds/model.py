"""Ground IMDS entities shared by the language front-end and the engine."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional


@dataclass(frozen=True, order=True)
class ServerState:
    server: str
    state: str

    def __str__(self) -> str:
        return f"{self.server}.{self.state}"


@dataclass(frozen=True, order=True)
class Message:
    agent: str
    server: str
    service: str

    def __str__(self) -> str:
        return f"{self.agent}.{self.server}.{self.service}"


@dataclass(frozen=True)
class GroundAction:
    """One element of the action relation: ``(m, p) -> (m', p')`` or ``(m, p) -> p'``."""

    in_msg: Message
    in_state: ServerState
    out_msg: Optional[Message]
    out_state: ServerState

    def __post_init__(self):
        if not (self.in_state.server == self.out_state.server == self.in_msg.server):
            raise ValueError(f"action must stay at server {self.in_msg.server}: {self}")
        if self.out_msg is not None and self.out_msg.agent != self.in_msg.agent:
            raise ValueError(f"action must keep its agent {self.in_msg.agent}: {self}")

    @property
    def terminating(self) -> bool:
        return self.out_msg is None

    @property
    def agent(self) -> str:
        return self.in_msg.agent

    @property
    def server(self) -> str:
        return self.in_msg.server

    def __str__(self) -> str:
        rhs = str(self.out_state) if self.out_msg is None else f"{self.out_msg}, {self.out_state}"
        return f"{{{self.in_msg}, {self.in_state}}} -> {{{rhs}}}"


@dataclass(frozen=True)
class ServerInstance:
    name: str
    definition: str
    services: tuple[str, ...]
    states: tuple[str, ...]
    loc: tuple[int, int] = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class SystemSpec:
    """A fully instantiated system: servers, agents, ground actions, initial setup.

    ``initial_states`` and ``initial_messages`` keep every init-block entry, so
    duplicates and omissions survive until :func:`validate_spec` reports them.
    """

    servers: tuple[ServerInstance, ...]
    agents: tuple[str, ...]
    actions: tuple[GroundAction, ...]
    initial_states: tuple[ServerState, ...]
    initial_messages: tuple[Message, ...]
    # (line, column) of the template each action came from, parallel to ``actions``
    action_locs: tuple[tuple[int, int], ...] = field(default=(), compare=False, repr=False)

    def action_loc(self, index: int) -> tuple[int, int]:
        return self.action_locs[index] if index < len(self.action_locs) else (0, 0)

    def server(self, name: str) -> ServerInstance:
        for s in self.servers:
            if s.name == name:
                return s
        raise KeyError(name)

    @property
    def server_names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.servers)
