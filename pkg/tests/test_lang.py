import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from imds.lang import (
    SpecError,
    SpecSyntaxError,
    expand_spec,
    format_spec,
    load_system,
    parse_spec,
    validate_spec,
)
from imds.lang.ast import (
    Actual,
    ActionTemplate,
    BinOp,
    Decl,
    Define,
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
from imds.model import GroundAction, Message, ServerState

from .conftest import CORPUS


def test_listing_parses_with_expected_shape(listing_text):
    raw = parse_spec(listing_text)
    assert [d.name for d in raw.defines] == ["N"]
    assert [sd.name for sd in raw.server_defs] == ["SideCh", "CentralCh"]
    assert [len(sd.actions) for sd in raw.server_defs] == [5, 4]
    assert len(raw.init_block) == 3


def test_empty_input_names_what_was_expected():
    with pytest.raises(SpecSyntaxError) as exc:
        parse_spec("")
    assert "expected #DEFINE or server or servers, found end of input" in str(exc.value.diagnostics.format())


def test_missing_arrow_reports_its_line(listing_text):
    lines = listing_text.splitlines()
    k = next(i for i, l in enumerate(lines) if l.strip().endswith("->"))
    lines[k] = lines[k].replace("->", "")
    with pytest.raises(SpecSyntaxError) as exc:
        parse_spec("\n".join(lines))
    assert exc.value.line == k + 2  # the next brace is where "->" was expected
    assert "->" in exc.value.expected


def test_comments_and_trailing_commas_are_ignored():
    text = """
    server: S(agents A), // a server
    services {go,}, states {on, off,},
    actions { {A.S.go, S.on} -> {S.off}, }
    servers S; agents A;
    init -> { S(A).on, A.S.go, }.
    """
    sys, diags = load_system(text)
    assert len(sys.actions) == 1 and sys.actions[0].terminating
    assert diags.ok


def _listing_actions_by_hand():
    """The 48 ground actions of the two-robot listing, written out with plain loops."""
    R = [f"ROBOT[{i}]" for i in (1, 2)]
    out = set()
    for j in (1, 2):
        s = f"SideCh[{j}]"
        for i in (1, 2):
            r = R[i - 1]
            out.add(GroundAction(Message(r, s, "start"), ServerState(s, "occ"),
                                 Message(r, "CentralCh", f"tryC[{i}]"), ServerState(s, "occ")))
            out.add(GroundAction(Message(r, s, "takeS"), ServerState(s, "resS"), None, ServerState(s, "end")))
            for k in (1, 2):
                out.add(GroundAction(Message(r, s, f"okS[{k}]"), ServerState(s, "occ"),
                                     Message(r, "CentralCh", f"takeC[{k}]"), ServerState(s, "free")))
                out.add(GroundAction(Message(r, s, f"tryS[{k}]"), ServerState(s, "free"),
                                     Message(r, "CentralCh", f"okC[{k}]"), ServerState(s, "resS")))
                out.add(GroundAction(Message(r, s, f"tryS[{k}]"), ServerState(s, "occ"),
                                     Message(r, "CentralCh", f"notC[{k}]"), ServerState(s, "occ")))
    c = "CentralCh"
    for r in R:
        for k in (1, 2):
            side = f"SideCh[{k}]"
            out.add(GroundAction(Message(r, c, f"tryC[{k}]"), ServerState(c, "free"),
                                 Message(r, side, f"okS[{k}]"), ServerState(c, f"resC[{k}]")))
            out.add(GroundAction(Message(r, c, f"takeC[{k}]"), ServerState(c, f"resC[{k}]"),
                                 Message(r, c, f"switch[{3 - k}]"), ServerState(c, "occ")))
            out.add(GroundAction(Message(r, c, f"switch[{k}]"), ServerState(c, "occ"),
                                 Message(r, side, f"tryS[{k}]"), ServerState(c, "occ")))
            out.add(GroundAction(Message(r, c, f"okC[{k}]"), ServerState(c, "occ"),
                                 Message(r, side, "takeS"), ServerState(c, "free")))
    return out


def test_listing_expansion_matches_hand_unrolling(listing_text):
    sys = expand_spec(parse_spec(listing_text))
    assert len(sys.actions) == 48
    assert set(sys.actions) == _listing_actions_by_hand()
    assert list(sys.server_names) == ["SideCh[1]", "SideCh[2]", "CentralCh"]
    assert sys.agents == ("ROBOT[1]", "ROBOT[2]")
    assert set(sys.initial_messages) == {
        Message("ROBOT[1]", "SideCh[1]", "start"),
        Message("ROBOT[2]", "SideCh[2]", "start"),
    }


def test_listing_validation_has_only_warnings(listing_text):
    diags = validate_spec(expand_spec(parse_spec(listing_text)))
    assert diags.ok
    texts = [d.message for d in diags.warnings]
    assert "service notC[1] of CentralCh is never consumed by any action" in texts
    assert "service notC[2] of CentralCh is never consumed by any action" in texts


BASE = """
server: S(agents A[2]),
services {go, stop}, states {on, off},
actions { <i=1..2> {A[i].S.go, S.on} -> {A[i].S.stop, S.off}, <i=1..2> {A[i].S.stop, S.off} -> {S.on}, }
servers S; agents A[2];
init -> { S(A[1..2]).on, A[1].S.go, A[2].S.go, }.
"""


@pytest.mark.parametrize(
    "edit, needle",
    [
        (("S.off} -> {S.on}", "S.off} -> {S.gone}"), "undeclared state gone"),
        (("A[2].S.go,", ""), "agent A[2] has 0 initial messages, expected 1"),
        (("S(A[1..2]).on,", ""), "server S has 0 initial states, expected 1"),
        (("A[1].S.go,", "A[1].S.jump,"), "undeclared service jump"),
    ],
)
def test_validation_errors(edit, needle):
    sys = expand_spec(parse_spec(BASE.replace(*edit)))
    diags = validate_spec(sys)
    assert not diags.ok
    assert any(needle in d.message for d in diags.errors)


def test_validation_warns_on_agent_that_cannot_terminate():
    text = BASE.replace("-> {S.on}", "-> {A[i].S.go, S.on}")
    diags = validate_spec(expand_spec(parse_spec(text)))
    assert diags.ok
    assert "agent A[1] can never terminate" in [d.message for d in diags.warnings]


@pytest.mark.parametrize(
    "edit, needle",
    [
        (("agents A[2];", "agents A[65];"), "exceeds the maximum of 64"),
        (("<i=1..2> {A[i].S.go", "<i=2..1> {A[i].S.go"), "reversed quantifier range"),
        (("S(A[1..2]).on", "S(A[1..2], A[1]).on"), "arity mismatch"),
        (("A[1].S.go,", "A[3].S.go,"), "unknown agent instance A[3]"),
    ],
)
def test_expansion_errors(edit, needle):
    with pytest.raises(SpecError) as exc:
        expand_spec(parse_spec(BASE.replace(*edit)))
    assert needle in exc.value.diagnostics.format()


def test_load_system_raises_on_validation_errors():
    with pytest.raises(SpecError):
        load_system(BASE.replace("S.off} -> {S.on}", "S.off} -> {S.gone}"))


@pytest.mark.parametrize("path", sorted(CORPUS.glob("*.imds")), ids=lambda p: p.stem)
def test_corpus_round_trips_through_printer(path):
    raw = parse_spec(path.read_text())
    again = parse_spec(format_spec(raw))
    assert again == raw
    assert format_spec(again) == format_spec(raw)


# -- generated round trips ------------------------------------------------------------

KEYWORDS = {"server", "servers", "agents", "services", "states", "actions", "init"}
names = st.from_regex(r"[A-Za-z][A-Za-z0-9_]{0,5}", fullmatch=True).filter(lambda s: s not in KEYWORDS)
ints = st.integers(0, 99)
exprs = st.recursive(
    st.one_of(ints.map(Num), names.map(Var)),
    lambda inner: st.builds(BinOp, st.sampled_from("+-"), inner, inner),
    max_leaves=4,
)
refs = st.builds(Ref, names, st.none() | exprs)
decls = st.builds(Decl, names, st.none() | exprs)
quants = st.lists(st.builds(Quantifier, names, exprs, exprs), max_size=2).map(tuple)
msgs = st.builds(MsgRef, refs, refs, refs)
states = st.builds(StateRef, refs, refs)
actions = st.builds(ActionTemplate, quants, msgs, states, st.none() | msgs, states)
tuples = lambda s, lo=0: st.lists(s, min_size=lo, max_size=3).map(tuple)  # noqa: E731
server_defs = st.builds(
    ServerDef, names, tuples(decls), tuples(decls), tuples(decls), tuples(decls), tuples(actions)
)
actuals = st.builds(
    Actual,
    names,
    st.none() | st.builds(IndexRange, exprs, exprs) | tuples(exprs, 1).map(IndexList),
)
init_items = st.one_of(
    st.builds(ServerInit, quants, refs, tuples(actuals), refs),
    st.builds(MessageInit, quants, refs, refs, refs),
)
specs = st.builds(
    RawSpec,
    st.lists(st.builds(Define, names, ints), max_size=2, unique_by=lambda d: d.name).map(tuple),
    st.lists(server_defs, max_size=2, unique_by=lambda d: d.name).map(tuple),
    tuples(decls, 1),
    tuples(decls, 1),
    tuples(init_items),
)


@settings(max_examples=100, deadline=None)
@given(specs)
def test_printed_specs_parse_back_to_the_same_tree(raw):
    assert parse_spec(format_spec(raw)) == raw
