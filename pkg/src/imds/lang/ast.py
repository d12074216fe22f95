"""Syntax tree for the IMDS specification language.

Nodes mirror the source structure one-to-one. Source locations are carried
along for diagnostics but excluded from equality, so a re-parsed pretty-print
compares equal to the original tree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union


@dataclass(frozen=True)
class Loc:
    line: int
    column: int


NOWHERE = Loc(0, 0)


# -- index expressions -------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: int
    loc: Loc = field(default=NOWHERE, compare=False, repr=False)


@dataclass(frozen=True)
class Var:
    name: str
    loc: Loc = field(default=NOWHERE, compare=False, repr=False)


@dataclass(frozen=True)
class BinOp:
    op: str  # "+" or "-"
    left: "Expr"
    right: "Expr"
    loc: Loc = field(default=NOWHERE, compare=False, repr=False)


Expr = Union[Num, Var, BinOp]


# -- references and declarations --------------------------------------------


@dataclass(frozen=True)
class Ref:
    """A possibly indexed name such as ``ROBOT[i]`` or ``occ``."""

    name: str
    index: Optional[Expr] = None
    loc: Loc = field(default=NOWHERE, compare=False, repr=False)


@dataclass(frozen=True)
class Decl:
    """A declared name with an optional array size: ``tryS[2]``."""

    name: str
    size: Optional[Expr] = None
    loc: Loc = field(default=NOWHERE, compare=False, repr=False)


@dataclass(frozen=True)
class Quantifier:
    var: str
    lo: Expr
    hi: Expr
    loc: Loc = field(default=NOWHERE, compare=False, repr=False)


@dataclass(frozen=True)
class MsgRef:
    agent: Ref
    server: Ref
    service: Ref


@dataclass(frozen=True)
class StateRef:
    server: Ref
    state: Ref


@dataclass(frozen=True)
class ActionTemplate:
    quantifiers: tuple[Quantifier, ...]
    in_msg: MsgRef
    in_state: StateRef
    out_msg: Optional[MsgRef]  # None for a terminating action
    out_state: StateRef
    loc: Loc = field(default=NOWHERE, compare=False, repr=False)

    @property
    def terminating(self) -> bool:
        return self.out_msg is None


@dataclass(frozen=True)
class ServerDef:
    name: str
    formal_agents: tuple[Decl, ...]
    formal_servers: tuple[Decl, ...]
    services: tuple[Decl, ...]
    states: tuple[Decl, ...]
    actions: tuple[ActionTemplate, ...]
    loc: Loc = field(default=NOWHERE, compare=False, repr=False)


# -- init block ---------------------------------------------------------------


@dataclass(frozen=True)
class IndexRange:
    lo: Expr
    hi: Expr


@dataclass(frozen=True)
class IndexList:
    items: tuple[Expr, ...]


@dataclass(frozen=True)
class Actual:
    """An actual parameter: ``CentralCh``, ``ROBOT[1..N]``, ``SideCh[1,2]``.

    A single-element IndexList stands for a plain indexed reference.
    """

    name: str
    index: Union[None, IndexRange, IndexList] = None
    loc: Loc = field(default=NOWHERE, compare=False, repr=False)


@dataclass(frozen=True)
class ServerInit:
    quantifiers: tuple[Quantifier, ...]
    server: Ref
    actuals: tuple[Actual, ...]
    state: Ref
    loc: Loc = field(default=NOWHERE, compare=False, repr=False)


@dataclass(frozen=True)
class MessageInit:
    quantifiers: tuple[Quantifier, ...]
    agent: Ref
    server: Ref
    service: Ref
    loc: Loc = field(default=NOWHERE, compare=False, repr=False)


InitItem = Union[ServerInit, MessageInit]


@dataclass(frozen=True)
class Define:
    name: str
    value: int
    loc: Loc = field(default=NOWHERE, compare=False, repr=False)


@dataclass(frozen=True)
class RawSpec:
    defines: tuple[Define, ...]
    server_defs: tuple[ServerDef, ...]
    global_servers: tuple[Decl, ...]
    global_agents: tuple[Decl, ...]
    init_block: tuple[InitItem, ...]
