"""Macro expansion: turn a parsed :class:`RawSpec` into a ground :class:`SystemSpec`."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence, Union

from ..model import GroundAction, Message, ServerInstance, ServerState, SystemSpec
from .ast import (
    ActionTemplate,
    BinOp,
    Decl,
    Expr,
    IndexList,
    IndexRange,
    Loc,
    MessageInit,
    Num,
    Quantifier,
    RawSpec,
    Ref,
    ServerDef,
    ServerInit,
    Var,
)
from .diagnostics import SpecError

MAX_SIZE = 64


def _fail(message: str, loc: Optional[Loc] = None) -> SpecError:
    loc = loc or Loc(0, 0)
    return SpecError.single(message, loc.line, loc.column)


def eval_expr(e: Expr, env: dict[str, int]) -> int:
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Var):
        if e.name not in env:
            raise _fail(f"undefined constant or variable {e.name}", e.loc)
        return env[e.name]
    if isinstance(e, BinOp):
        left, right = eval_expr(e.left, env), eval_expr(e.right, env)
        return left + right if e.op == "+" else left - right
    raise TypeError(e)


def ground_name(name: str, index: Optional[int]) -> str:
    return name if index is None else f"{name}[{index}]"


def _size(decl: Decl, env: dict[str, int], what: str) -> Optional[int]:
    if decl.size is None:
        return None
    n = eval_expr(decl.size, env)
    if n < 1:
        raise _fail(f"{what} {decl.name} has non-positive size {n}", decl.loc)
    if n > MAX_SIZE:
        raise _fail(f"{what} {decl.name} size {n} exceeds the maximum of {MAX_SIZE}", decl.loc)
    return n


def _expand_decls(decls: Sequence[Decl], env: dict[str, int], what: str) -> list[str]:
    names: list[str] = []
    for d in decls:
        n = _size(d, env, what)
        if n is None:
            names.append(d.name)
        else:
            names.extend(ground_name(d.name, k) for k in range(1, n + 1))
    return names


def quantifier_assignments(
    quants: Sequence[Quantifier], env: dict[str, int]
) -> Iterator[dict[str, int]]:
    """Cartesian product of quantifier ranges, leftmost varying slowest."""
    ranges = []
    for q in quants:
        if q.var in env:
            raise _fail(f"quantifier variable {q.var} shadows an existing name", q.loc)
        lo, hi = eval_expr(q.lo, env), eval_expr(q.hi, env)
        if hi < lo:
            raise _fail(f"empty or reversed quantifier range {q.var}={lo}..{hi}", q.loc)
        ranges.append(range(lo, hi + 1))
    names = [q.var for q in quants]
    if len(set(names)) != len(names):
        raise _fail("repeated quantifier variable", quants[0].loc)
    for values in itertools.product(*ranges):
        yield {**env, **dict(zip(names, values))}


@dataclass
class _Binding:
    """Formal parameter name -> actual instance(s) for one server instance."""

    agents: dict[str, Union[str, list[str]]] = field(default_factory=dict)
    servers: dict[str, Union[str, list[str]]] = field(default_factory=dict)


def _resolve(
    ref: Ref, table: dict[str, Union[str, list[str]]], env: dict[str, int], what: str
) -> str:
    if ref.name not in table:
        raise _fail(f"unknown {what} {ref.name}", ref.loc)
    bound = table[ref.name]
    if isinstance(bound, list):
        if ref.index is None:
            raise _fail(f"{what} array {ref.name} used without an index", ref.loc)
        k = eval_expr(ref.index, env)
        if not 1 <= k <= len(bound):
            raise _fail(f"index {k} out of bounds for {ref.name}[1..{len(bound)}]", ref.loc)
        return bound[k - 1]
    if ref.index is not None:
        raise _fail(f"{what} {ref.name} is not an array", ref.loc)
    return bound


def _symbol(ref: Ref, env: dict[str, int]) -> str:
    """A service or state name; declared-ness is checked by validation."""
    return ground_name(ref.name, None if ref.index is None else eval_expr(ref.index, env))


def _instance(ref: Ref, env: dict[str, int], declared: dict[str, object], what: str) -> str:
    name = _symbol(ref, env)
    if name not in declared:
        raise _fail(f"unknown {what} instance {name}", ref.loc)
    return name


class _Expander:
    def __init__(self, raw: RawSpec):
        self.raw = raw
        self.env: dict[str, int] = {}
        for d in raw.defines:
            if d.value > MAX_SIZE:
                raise _fail(f"#DEFINE {d.name} {d.value} exceeds the maximum of {MAX_SIZE}", d.loc)
            self.env[d.name] = d.value
        self.defs: dict[str, ServerDef] = {sd.name: sd for sd in raw.server_defs}

        # server instance -> definition, in declaration order
        self.server_def_of: dict[str, ServerDef] = {}
        for decl in raw.global_servers:
            if decl.name not in self.defs:
                raise _fail(f"unknown server type {decl.name}", decl.loc)
            for inst in _expand_decls([decl], self.env, "server"):
                if inst in self.server_def_of:
                    raise _fail(f"duplicate server instance {inst}", decl.loc)
                self.server_def_of[inst] = self.defs[decl.name]
        self.agents: dict[str, None] = {}
        for inst in _expand_decls(raw.global_agents, self.env, "agent"):
            if inst in self.agents or inst in self.server_def_of:
                raise _fail(f"duplicate instance name {inst}")
            self.agents[inst] = None

        self.bindings: dict[str, _Binding] = {}
        self.initial_states: list[ServerState] = []
        self.initial_messages: list[Message] = []

    # -- init block -----------------------------------------------------------

    def _actuals(self, item: ServerInit, env: dict[str, int]) -> list[str]:
        names: list[str] = []
        for a in item.actuals:
            if a.index is None:
                names.append(a.name)
            elif isinstance(a.index, IndexRange):
                lo, hi = eval_expr(a.index.lo, env), eval_expr(a.index.hi, env)
                if hi < lo:
                    raise _fail(f"empty or reversed range in actual {a.name}", a.loc)
                names.extend(ground_name(a.name, k) for k in range(lo, hi + 1))
            else:
                assert isinstance(a.index, IndexList)
                names.extend(ground_name(a.name, eval_expr(e, env)) for e in a.index.items)
        return names

    def _bind(self, sdef: ServerDef, actuals: list[str], item: ServerInit) -> _Binding:
        binding = _Binding()
        formals = [(d, "agent") for d in sdef.formal_agents] + [
            (d, "server") for d in sdef.formal_servers
        ]
        sizes = [_size(d, self.env, f"formal {kind}") for d, kind in formals]
        expected = sum(1 if n is None else n for n in sizes)
        if expected != len(actuals):
            raise _fail(
                f"arity mismatch instantiating {sdef.name}: expected {expected} actuals, got {len(actuals)}",
                item.loc,
            )
        pos = 0
        for (decl, kind), n in zip(formals, sizes):
            chunk = actuals[pos : pos + (1 if n is None else n)]
            pos += len(chunk)
            known = self.agents if kind == "agent" else self.server_def_of
            for name in chunk:
                if name not in known:
                    raise _fail(f"actual {name} for formal {decl.name} is not a declared {kind}", item.loc)
            table = binding.agents if kind == "agent" else binding.servers
            if decl.name in table:
                raise _fail(f"duplicate formal parameter {decl.name} in {sdef.name}", decl.loc)
            table[decl.name] = chunk[0] if n is None else list(chunk)
        return binding

    def expand_init(self) -> None:
        for item in self.raw.init_block:
            for env in quantifier_assignments(item.quantifiers, self.env):
                if isinstance(item, ServerInit):
                    inst = _instance(item.server, env, self.server_def_of, "server")
                    sdef = self.server_def_of[inst]
                    actuals = self._actuals(item, env)
                    binding = self._bind(sdef, actuals, item)
                    self.bindings.setdefault(inst, binding)
                    self.initial_states.append(ServerState(inst, _symbol(item.state, env)))
                else:
                    assert isinstance(item, MessageInit)
                    agent = _instance(item.agent, env, self.agents, "agent")
                    server = _instance(item.server, env, self.server_def_of, "server")
                    self.initial_messages.append(Message(agent, server, _symbol(item.service, env)))

    # -- actions --------------------------------------------------------------

    def _server(self, ref: Ref, inst: str, sdef: ServerDef, binding: _Binding, env) -> str:
        if ref.name == sdef.name and ref.name not in binding.servers:
            if ref.index is not None:
                raise _fail(f"self reference {ref.name} cannot be indexed", ref.loc)
            return inst
        return _resolve(ref, binding.servers, env, "server")

    def ground(self, inst: str, sdef: ServerDef, tpl: ActionTemplate, env) -> GroundAction:
        binding = self.bindings.get(inst, _Binding())

        def own(ref: Ref, role: str) -> str:
            server = self._server(ref, inst, sdef, binding, env)
            if server != inst:
                raise _fail(f"{role} must refer to the defining server {sdef.name}", ref.loc)
            return server

        agent = _resolve(tpl.in_msg.agent, binding.agents, env, "agent")
        in_msg = Message(agent, own(tpl.in_msg.server, "input message"), _symbol(tpl.in_msg.service, env))
        in_state = ServerState(own(tpl.in_state.server, "input state"), _symbol(tpl.in_state.state, env))
        out_state = ServerState(own(tpl.out_state.server, "output state"), _symbol(tpl.out_state.state, env))
        out_msg = None
        if tpl.out_msg is not None:
            out_agent = _resolve(tpl.out_msg.agent, binding.agents, env, "agent")
            if out_agent != agent:
                raise _fail("an action must keep the agent of its input message", tpl.out_msg.agent.loc)
            out_msg = Message(
                out_agent,
                self._server(tpl.out_msg.server, inst, sdef, binding, env),
                _symbol(tpl.out_msg.service, env),
            )
        return GroundAction(in_msg, in_state, out_msg, out_state)

    def expand(self) -> SystemSpec:
        self.expand_init()
        servers: list[ServerInstance] = []
        actions: list[GroundAction] = []
        locs: list[tuple[int, int]] = []
        for inst, sdef in self.server_def_of.items():
            servers.append(
                ServerInstance(
                    inst,
                    sdef.name,
                    tuple(_expand_decls(sdef.services, self.env, "service")),
                    tuple(_expand_decls(sdef.states, self.env, "state")),
                    (sdef.loc.line, sdef.loc.column),
                )
            )
            has_formals = bool(sdef.formal_agents or sdef.formal_servers)
            if has_formals and inst not in self.bindings:
                continue  # unbound instance; validation reports the missing initial state
            for tpl in sdef.actions:
                for env in quantifier_assignments(tpl.quantifiers, self.env):
                    actions.append(self.ground(inst, sdef, tpl, env))
                    locs.append((tpl.loc.line, tpl.loc.column))
        return SystemSpec(
            servers=tuple(servers),
            agents=tuple(self.agents),
            actions=tuple(actions),
            initial_states=tuple(self.initial_states),
            initial_messages=tuple(self.initial_messages),
            action_locs=tuple(locs),
        )


def expand_spec(raw: RawSpec) -> SystemSpec:
    """Substitute constants, unroll quantifiers and bind formals to actuals.

    Ground actions are ordered by server instance (declaration order), then
    template order, then quantifier values ascending with the leftmost
    quantifier varying slowest.

    Raises:
        SpecError: on undefined names, out-of-bounds indices, arity
            mismatches, empty quantifier ranges or oversized arrays.
    """
    return _Expander(raw).expand()
