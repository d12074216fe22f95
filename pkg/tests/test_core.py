import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from imds.core import (
    Configuration,
    ContractViolation,
    StateSpaceExceeded,
    apply_action,
    build_lts,
    dump_lts,
    enabled_actions,
    initial_configuration,
)
from imds.model import Message

from .conftest import corpus_lts, corpus_system
from .oracles import enumerate_naive

SMALL = [
    "two_robots.imds",
    "single_robot.imds",
    "twin_fleet.imds",
    "quadrant_patrol_stage1.imds",
    "quadrant_patrol_stage2.imds",
    "crossing_four.imds",
    "north_crossing.imds",
]


def test_listing_lts_size():
    lts = corpus_lts("two_robots.imds")
    assert (lts.num_nodes, lts.num_edges) == (24, 34)
    assert not lts.truncated


def test_listing_initial_configuration():
    c = initial_configuration(corpus_system("two_robots.imds"))
    assert c.states == {"SideCh[1]": "occ", "SideCh[2]": "occ", "CentralCh": "free"}
    assert c.pending == {
        "ROBOT[1]": Message("ROBOT[1]", "SideCh[1]", "start"),
        "ROBOT[2]": Message("ROBOT[2]", "SideCh[2]", "start"),
    }
    assert c.terminated == frozenset()
    assert [str(a.in_msg) for a in enabled_actions(corpus_system("two_robots.imds"), c)] == [
        "ROBOT[1].SideCh[1].start",
        "ROBOT[2].SideCh[2].start",
    ]


def test_listing_sinks_are_mutual_waits():
    lts = corpus_lts("two_robots.imds")
    sinks = lts.sinks()
    assert len(sinks) == 2
    for n in sinks:
        c = lts.config(n)
        assert c.states["CentralCh"] == "occ"
        services = sorted(m.service for m in c.pending.values())
        assert services in (["notC[2]", "tryC[2]"], ["notC[1]", "tryC[1]"])


def test_disabled_action_is_a_contract_violation():
    sys = corpus_system("two_robots.imds")
    c = initial_configuration(sys)
    disabled = next(a for a in sys.actions if a not in enabled_actions(sys, c))
    with pytest.raises(ContractViolation):
        apply_action(c, disabled)


def test_pending_and_terminated_must_be_disjoint():
    with pytest.raises(ContractViolation):
        Configuration({"S": "on"}, {"A": Message("A", "S", "go")}, {"A"})


def test_limit_is_enforced():
    with pytest.raises(StateSpaceExceeded) as exc:
        build_lts(corpus_system("two_robots.imds"), limit=1)
    assert exc.value.nodes == 1
    assert exc.value.lts.truncated


def test_build_is_deterministic():
    sys = corpus_system("crossing_four.imds")
    a, b = build_lts(sys), build_lts(sys)
    assert a.keys == b.keys
    assert dump_lts(a) == dump_lts(b)


def test_dump_format():
    lines = dump_lts(corpus_lts("two_robots.imds")).splitlines()
    assert lines[0].startswith("node 0: ")
    assert "pending ROBOT[1]:SideCh[1].start" in lines[0]
    assert any(l.startswith("edge 0 1 ROBOT[1].SideCh[1].start") for l in lines)


@pytest.mark.parametrize("name", SMALL)
def test_graph_matches_naive_enumeration(name):
    sys = corpus_system(name)
    lts = corpus_lts(name)
    assert lts.num_nodes <= 10_000
    configs, edges = enumerate_naive(sys)
    assert set(lts.nodes) == configs
    assert len(configs) == lts.num_nodes
    assert {(lts.config(s), a, lts.config(d)) for s, a, d in lts.edges()} == edges


@pytest.mark.parametrize("name", SMALL)
def test_every_configuration_partitions_the_agents(name):
    lts = corpus_lts(name)
    agents = lts.sys.agents
    for c in lts.nodes:
        assert c.is_partition_of(agents)
        assert set(c.states) == set(lts.sys.server_names)


@pytest.mark.parametrize("name", SMALL)
def test_frame_property(name):
    """An action touches its own server and agent and nothing else."""
    lts = corpus_lts(name)
    for s, a, d in lts.edges():
        before, after = lts.config(s), lts.config(d)
        for srv, st_ in before.states.items():
            if srv != a.server:
                assert after.states[srv] == st_
        assert after.states[a.server] == a.out_state.state
        for ag, m in before.pending.items():
            if ag != a.agent:
                assert after.pending[ag] == m
        if a.terminating:
            assert a.agent in after.terminated and a.agent not in after.pending
        else:
            assert after.pending[a.agent] == a.out_msg
        assert before.terminated <= after.terminated


@settings(max_examples=50, deadline=None)
@given(st.randoms(use_true_random=False), st.sampled_from(SMALL))
def test_hash_ignores_insertion_order(rnd, name):
    lts = corpus_lts(name)
    c = lts.config(rnd.randrange(lts.num_nodes))
    states = list(c.states.items())
    pending = list(c.pending.items())
    rnd.shuffle(states)
    rnd.shuffle(pending)
    d = Configuration(dict(states), dict(pending), list(c.terminated))
    assert d == c and hash(d) == hash(c)
    assert lts.node_of(d) == lts.node_of(c)


def test_successors_come_in_canonical_order():
    sys = corpus_system("crossing_four.imds")
    lts = corpus_lts("crossing_four.imds")
    rnd = random.Random(7)
    for n in rnd.sample(range(lts.num_nodes), 50):
        expected = [apply_action(lts.config(n), a) for a in enabled_actions(sys, lts.config(n))]
        assert [lts.config(m) for m in lts.successors(n)] == expected
