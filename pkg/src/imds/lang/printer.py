"""Canonical pretty-printer for :class:`RawSpec` trees."""

from __future__ import annotations

from .ast import (
    Actual,
    ActionTemplate,
    BinOp,
    Decl,
    Expr,
    IndexList,
    IndexRange,
    MessageInit,
    MsgRef,
    Num,
    Quantifier,
    RawSpec,
    Ref,
    ServerDef,
    ServerInit,
    StateRef,
    Var,
)


def format_expr(e: Expr) -> str:
    if isinstance(e, Num):
        return str(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, BinOp):
        right = format_expr(e.right)
        # the grammar is left-associative, so a compound right operand needs parens
        if isinstance(e.right, BinOp):
            right = f"({right})"
        return f"{format_expr(e.left)}{e.op}{right}"
    raise TypeError(e)


def _indexed(name: str, index) -> str:
    return name if index is None else f"{name}[{format_expr(index)}]"


def format_ref(r: Ref) -> str:
    return _indexed(r.name, r.index)


def format_decl(d: Decl) -> str:
    return _indexed(d.name, d.size)


def _quants(qs: tuple[Quantifier, ...]) -> str:
    return "".join(f"<{q.var}={format_expr(q.lo)}..{format_expr(q.hi)}>" for q in qs)


def _msg(m: MsgRef) -> str:
    return f"{format_ref(m.agent)}.{format_ref(m.server)}.{format_ref(m.service)}"


def _state(s: StateRef) -> str:
    return f"{format_ref(s.server)}.{format_ref(s.state)}"


def format_action(a: ActionTemplate) -> str:
    lhs = f"{{{_msg(a.in_msg)}, {_state(a.in_state)}}}"
    if a.out_msg is None:
        rhs = f"{{{_state(a.out_state)}}}"
    else:
        rhs = f"{{{_msg(a.out_msg)}, {_state(a.out_state)}}}"
    q = _quants(a.quantifiers)
    return f"{q}{' ' if q else ''}{lhs} -> {rhs}"


def format_actual(a: Actual) -> str:
    if a.index is None:
        return a.name
    if isinstance(a.index, IndexRange):
        return f"{a.name}[{format_expr(a.index.lo)}..{format_expr(a.index.hi)}]"
    assert isinstance(a.index, IndexList)
    return f"{a.name}[{','.join(format_expr(e) for e in a.index.items)}]"


def _decls(ds) -> str:
    return ",".join(format_decl(d) for d in ds)


def format_server_def(sd: ServerDef) -> str:
    formals = []
    if sd.formal_agents:
        formals.append(f"agents {_decls(sd.formal_agents)}")
    if sd.formal_servers:
        formals.append(f"servers {_decls(sd.formal_servers)}")
    lines = [
        f"server: {sd.name}({';'.join(formals)}),",
        f"services {{{_decls(sd.services)}}},",
        f"states {{{_decls(sd.states)}}},",
        "actions{",
    ]
    lines.extend(f"  {format_action(a)}," for a in sd.actions)
    lines.append("}")
    return "\n".join(lines)


def format_spec(raw: RawSpec) -> str:
    """Render ``raw`` as source text that parses back to an equal tree."""
    out: list[str] = [f"#DEFINE {d.name} {d.value}" for d in raw.defines]
    if out:
        out.append("")
    for sd in raw.server_defs:
        out.append(format_server_def(sd))
        out.append("")
    out.append(f"servers {_decls(raw.global_servers)};")
    out.append(f"agents {_decls(raw.global_agents)};")
    out.append("")
    out.append("init -> {")
    for item in raw.init_block:
        q = _quants(item.quantifiers)
        if isinstance(item, ServerInit):
            actuals = ",".join(format_actual(a) for a in item.actuals)
            out.append(f"  {q}{format_ref(item.server)}({actuals}).{format_ref(item.state)},")
        else:
            assert isinstance(item, MessageInit)
            out.append(
                f"  {q}{format_ref(item.agent)}.{format_ref(item.server)}.{format_ref(item.service)},"
            )
    out.append("}.")
    return "\n".join(out) + "\n"
