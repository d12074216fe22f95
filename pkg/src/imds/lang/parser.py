"""Tokenizer and recursive-descent parser for IMDS specification text.

The accepted grammar, informally::

    spec        := define* serverdef* 'servers' decls ';' 'agents' decls ';'
                   'init' '->' '{' inititems '}' '.' '}'?
    define      := '#DEFINE' IDENT INT
    serverdef   := 'server' ':' IDENT '(' formals ')' ','?
                   'services' '{' decls '}' ','? 'states' '{' decls '}' ','?
                   'actions' '{' action* '}' ','?
    formals     := ('agents' decls)? ';'? ('servers' decls)?
    action      := quant* '{' msg ',' state '}' '->' '{' (msg ',')? state '}' ','?
    quant       := '<' IDENT '=' expr '..' expr '>'
    msg         := ref '.' ref '.' ref
    state       := ref '.' ref
    ref         := IDENT ('[' expr ']')?
    expr        := term (('+' | '-') term)*
    term        := INT | IDENT | '(' expr ')'
    inititem    := quant* (ref '(' actuals ')' '.' ref | ref '.' ref '.' ref)

Lists separated by commas may end with a trailing comma. ``//`` starts a
comment running to the end of the line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from .ast import (
    Actual,
    ActionTemplate,
    BinOp,
    Decl,
    Define,
    Expr,
    IndexList,
    IndexRange,
    InitItem,
    Loc,
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
from .diagnostics import SpecSyntaxError

KEYWORDS = {"server", "servers", "agents", "services", "states", "actions", "init"}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>//[^\n]*)
  | (?P<define>\#DEFINE\b)
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>->|\.\.|[{}()\[\]<>,;:.=+\-])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # "int", "ident", "kw", "define", "punct", "eof"
    text: str
    line: int
    column: int

    @property
    def loc(self) -> Loc:
        return Loc(self.line, self.column)

    def describe(self) -> str:
        return "end of input" if self.kind == "eof" else repr(self.text)


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            raise SpecSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        lexeme = m.group()
        if kind == "ident" and lexeme in KEYWORDS:
            kind = "kw"
        if kind not in ("ws", "comment"):
            tokens.append(Token(kind, lexeme, line, col))
        newlines = lexeme.count("\n")
        if newlines:
            line += newlines
            line_start = pos + lexeme.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.pos = 0

    # -- token helpers --------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, offset: int = 1) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def at(self, text: str) -> bool:
        return self.tok.text == text and self.tok.kind in ("punct", "kw", "define")

    def fail(self, expected: list[str], tok: Optional[Token] = None):
        tok = tok or self.tok
        if len(expected) == 1:
            want = expected[0]
        else:
            want = " or ".join(expected)
        raise SpecSyntaxError(
            f"expected {want}, found {tok.describe()}", tok.line, tok.column, expected
        )

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.fail([text])
        tok = self.tok
        self.pos += 1
        return tok

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.pos += 1
            return True
        return False

    def ident(self) -> Token:
        if self.tok.kind != "ident":
            self.fail(["identifier"])
        tok = self.tok
        self.pos += 1
        return tok

    # -- top level ------------------------------------------------------------

    def parse(self) -> RawSpec:
        defines: list[Define] = []
        seen_defines: set[str] = set()
        while self.at("#DEFINE"):
            start = self.tok
            self.pos += 1
            name = self.ident()
            if self.tok.kind != "int":
                self.fail(["integer"])
            value = int(self.tok.text)
            self.pos += 1
            if name.text in seen_defines:
                raise SpecSyntaxError(f"duplicate #DEFINE {name.text}", name.line, name.column)
            seen_defines.add(name.text)
            defines.append(Define(name.text, value, start.loc))

        server_defs: list[ServerDef] = []
        seen_defs: set[str] = set()
        while self.at("server"):
            sdef = self.server_def()
            if sdef.name in seen_defs:
                raise SpecSyntaxError(
                    f"duplicate server definition {sdef.name}", sdef.loc.line, sdef.loc.column
                )
            seen_defs.add(sdef.name)
            server_defs.append(sdef)

        if not self.at("servers"):
            if not defines and not server_defs:
                self.fail(["#DEFINE", "server", "servers"])
            self.fail(["server", "servers"])
        self.pos += 1
        global_servers = self.decl_list(";")
        self.expect(";")
        self.expect("agents")
        global_agents = self.decl_list(";")
        self.expect(";")
        init_block = self.init_block()
        # The reference listing closes with one extra brace after "}.".
        self.accept("}")
        if self.tok.kind != "eof":
            self.fail(["end of input"])
        return RawSpec(
            tuple(defines),
            tuple(server_defs),
            tuple(global_servers),
            tuple(global_agents),
            tuple(init_block),
        )

    def server_def(self) -> ServerDef:
        start = self.expect("server")
        self.expect(":")
        name = self.ident()
        self.expect("(")
        formal_agents: list[Decl] = []
        formal_servers: list[Decl] = []
        if self.accept("agents"):
            formal_agents = self.decl_list(";", ")")
        self.accept(";")
        if self.accept("servers"):
            formal_servers = self.decl_list(")")
        self.expect(")")
        self.accept(",")
        self.expect("services")
        self.expect("{")
        services = self.decl_list("}")
        self.expect("}")
        self.accept(",")
        self.expect("states")
        self.expect("{")
        states = self.decl_list("}")
        self.expect("}")
        self.accept(",")
        self.expect("actions")
        self.expect("{")
        actions: list[ActionTemplate] = []
        while not self.at("}"):
            if not (self.at("<") or self.at("{")):
                self.fail(["'<'", "'{'", "'}'"])
            actions.append(self.action())
            if not self.accept(","):
                break
        self.expect("}")
        self.accept(",")
        return ServerDef(
            name.text,
            tuple(formal_agents),
            tuple(formal_servers),
            tuple(services),
            tuple(states),
            tuple(actions),
            start.loc,
        )

    def decl_list(self, *closers: str) -> list[Decl]:
        """Comma-separated declarations, tolerating a trailing comma."""
        decls: list[Decl] = []
        while self.tok.kind == "ident":
            tok = self.ident()
            size = None
            if self.accept("["):
                size = self.expr()
                self.expect("]")
            decls.append(Decl(tok.text, size, tok.loc))
            if not self.accept(","):
                break
        if not any(self.at(c) for c in closers):
            self.fail(["identifier"] + [repr(c) for c in closers])
        return decls

    # -- actions --------------------------------------------------------------

    def quantifiers(self) -> list[Quantifier]:
        quants = []
        while self.at("<"):
            start = self.tok
            self.pos += 1
            var = self.ident()
            self.expect("=")
            lo = self.expr()
            self.expect("..")
            hi = self.expr()
            self.expect(">")
            quants.append(Quantifier(var.text, lo, hi, start.loc))
        return quants

    def action(self) -> ActionTemplate:
        start = self.tok
        quants = self.quantifiers()
        self.expect("{")
        in_msg = self.msg_ref()
        self.expect(",")
        in_state = self.state_ref()
        self.expect("}")
        self.expect("->")
        self.expect("{")
        first = self.pos
        a = self.ref()
        self.expect(".")
        b = self.ref()
        out_msg: Optional[MsgRef] = None
        if self.accept("."):
            c = self.ref()
            out_msg = MsgRef(a, b, c)
            self.expect(",")
            out_state = self.state_ref()
        else:
            out_state = StateRef(a, b)
        if self.pos == first:  # pragma: no cover - defensive
            self.fail(["message or state"])
        self.expect("}")
        return ActionTemplate(tuple(quants), in_msg, in_state, out_msg, out_state, start.loc)

    def msg_ref(self) -> MsgRef:
        agent = self.ref()
        self.expect(".")
        server = self.ref()
        self.expect(".")
        service = self.ref()
        return MsgRef(agent, server, service)

    def state_ref(self) -> StateRef:
        server = self.ref()
        self.expect(".")
        state = self.ref()
        return StateRef(server, state)

    def ref(self) -> Ref:
        tok = self.ident()
        index = None
        if self.accept("["):
            index = self.expr()
            self.expect("]")
        return Ref(tok.text, index, tok.loc)

    # -- expressions ----------------------------------------------------------

    def expr(self) -> Expr:
        left = self.term()
        while self.at("+") or self.at("-"):
            op = self.tok
            self.pos += 1
            right = self.term()
            left = BinOp(op.text, left, right, op.loc)
        return left

    def term(self) -> Expr:
        tok = self.tok
        if tok.kind == "int":
            self.pos += 1
            return Num(int(tok.text), tok.loc)
        if tok.kind == "ident":
            self.pos += 1
            return Var(tok.text, tok.loc)
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        self.fail(["integer", "identifier", "'('"])

    # -- init block -----------------------------------------------------------

    def init_block(self) -> list[InitItem]:
        self.expect("init")
        self.expect("->")
        self.expect("{")
        items: list[InitItem] = []
        while not self.at("}"):
            items.append(self.init_item())
            if not self.accept(","):
                break
        self.expect("}")
        self.expect(".")
        return items

    def init_item(self) -> InitItem:
        start = self.tok
        quants = self.quantifiers()
        head = self.ref()
        if self.accept("("):
            actuals: list[Actual] = []
            while self.tok.kind == "ident":
                actuals.append(self.actual())
                if not self.accept(","):
                    break
            self.expect(")")
            self.expect(".")
            state = self.ref()
            return ServerInit(tuple(quants), head, tuple(actuals), state, start.loc)
        self.expect(".")
        server = self.ref()
        self.expect(".")
        service = self.ref()
        return MessageInit(tuple(quants), head, server, service, start.loc)

    def actual(self) -> Actual:
        tok = self.ident()
        if not self.accept("["):
            return Actual(tok.text, None, tok.loc)
        first = self.expr()
        if self.accept(".."):
            hi = self.expr()
            index = IndexRange(first, hi)
        else:
            items = [first]
            while self.accept(","):
                items.append(self.expr())
            index = IndexList(tuple(items))
        self.expect("]")
        return Actual(tok.text, index, tok.loc)


def parse_spec(text: str) -> RawSpec:
    """Parse specification source into a :class:`RawSpec`.

    Raises:
        SpecSyntaxError: with the line/column of the offending token and the
            set of tokens that would have been accepted there.
    """
    return Parser(text).parse()
