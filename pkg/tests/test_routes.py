import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from imds.core import build_lts
from imds.lang import load_system, parse_spec, validate_spec
from imds.lang.expand import expand_spec
from imds.routes import (
    CapacityExceeded,
    DiscontinuousFragments,
    EnvGraph,
    NameCollision,
    NoAutomorphism,
    NoRouteExists,
    PlanError,
    RoutePlan,
    TopologyError,
    UnanchorableCycle,
    UnsupportedTopology,
    check_protocol_safety,
    compile_to_imds,
    compose_subroutes,
    dump_env_graph,
    dump_plans,
    generate_all_behaviors,
    generate_identical_fleet,
    generate_many_behaviors,
    generate_similar_behavior,
    load_env_graph,
    load_plans,
    parse_service,
    partition_route,
    quadrant_topology,
    rotation,
    rotation_between,
    service_name,
    stage_plans,
    validate_plan,
)
from imds.routes.scenarios import PATROL_RING, SCENARIOS, quadrant_patrol

from .conftest import CORPUS, corpus_lts
from .oracles import simple_routes

G = quadrant_topology()
SIDES = ("AW", "AN", "AE", "AS")


def test_quadrant_shape():
    assert len(G.names) == 8 and len(G.doors) == 12
    for c in ("QNW", "QNE", "QSE", "QSW"):
        assert G.is_central(c) and G.degree(c) == 4
    for c in SIDES:
        assert G.is_side(c) and G.degree(c) == 2
    assert G.neighbors("QNE") == ["AE", "AN", "QNW", "QSE"]
    assert G.shortest_path("AW", "AE") == ["AW", "QNW", "QNE", "AE"]


def test_topology_file_round_trip():
    text = (CORPUS / "quadrant.topo").read_text()
    g = load_env_graph(text)
    assert g == G
    assert load_env_graph(dump_env_graph(g)) == g


@pytest.mark.parametrize(
    "text, needle, line",
    [
        ("chamber A capacity 1\nchamber A capacity 2\n", "duplicate chamber A", 2),
        ("chamber A capacity 0\n", "capacity 0", 1),
        ("chamber A capacity 1\nwall A B\n", "cannot parse", 2),
        ("chamber A capacity 1\ndoor A B\n", "B", None),
        ("chamber A capacity 1\nchamber B capacity 1\n", "connected", None),
        ("", "no chambers", None),
    ],
)
def test_topology_errors(text, needle, line):
    with pytest.raises(TopologyError) as exc:
        load_env_graph(text)
    assert needle in str(exc.value)
    assert exc.value.line == line


def test_two_chamber_topology_compiles_and_terminates():
    g = EnvGraph.build([("A", None), ("B", 1)], [("A", "B")])
    plans = [RoutePlan.linear("X", ["A", "B"]), RoutePlan.linear("Y", ["A", "B"])]
    sys, diags = load_system(compile_to_imds(g, plans))
    assert diags.ok
    lts = build_lts(sys)
    assert check_protocol_safety(lts, g, plans) == []
    # whoever parks in B first shuts the other one out
    assert {frozenset(lts.config(n).terminated) for n in lts.sinks()} == {frozenset("X"), frozenset("Y")}


def test_rotation_is_a_graph_automorphism():
    for k in range(4):
        r = rotation(k)
        assert sorted(r.values()) == sorted(G.names)
        assert all(G.has_door(r[a], r[b]) for a, b in G.doors)
    assert rotation(4) == rotation(0)
    with pytest.raises(NoAutomorphism):
        rotation_between("AW", "QNW")


def test_similar_behavior():
    base = RoutePlan.linear("R", ["AE", "QNE", "AN"])
    assert generate_similar_behavior(base, "AN").chamber_sequence() == ["AN", "QNW", "AW"]
    assert generate_similar_behavior(base, "AE") == base
    seen = {tuple(generate_similar_behavior(base, s).chamber_sequence()) for s in SIDES}
    assert len(seen) == 4
    with pytest.raises(UnsupportedTopology):
        generate_similar_behavior(base, "XX")


@settings(max_examples=50, deadline=None)
@given(st.sampled_from(SIDES), st.sampled_from(SIDES), st.integers(0, 21))
def test_similar_behavior_composes(a, b, k):
    """Rotating to a and then to b is the same as rotating straight to b."""
    plan = generate_all_behaviors(G, "AW")[k]
    via = generate_similar_behavior(generate_similar_behavior(plan, a), b)
    assert via == generate_similar_behavior(plan, b)
    validate_plan(G, via)


def test_identical_fleet():
    fleet = generate_identical_fleet(RoutePlan.linear("R", ["AE", "QNE", "AN"]), 3)
    assert [p.robot for p in fleet] == ["ROBOT1", "ROBOT2", "ROBOT3"]
    assert len({(p.start, p.steps) for p in fleet}) == 1
    with pytest.raises(ValueError):
        generate_identical_fleet(fleet[0], 0)


@pytest.mark.parametrize("start", SIDES)
def test_generate_all_matches_enumeration(start):
    plans = generate_all_behaviors(G, start)
    got = sorted(tuple(p.chamber_sequence()) for p in plans)
    assert got == sorted(simple_routes(G, start))
    assert len(got) == 22
    for p in plans:
        validate_plan(G, p)


def test_generate_many_covers_every_route():
    plan = generate_many_behaviors(G, "AW", {"AE"})
    routes = [r for r in simple_routes(G, "AW") if r[-1] == "AE"]
    assert routes
    for r in routes:
        assert all(step in plan.steps for step in zip(r, r[1:]))
    assert plan.terminators == {"AE"}
    validate_plan(G, plan)


def test_generate_many_with_everything_forbidden():
    with pytest.raises(NoRouteExists):
        generate_many_behaviors(G, "AW", {"AE"}, {("AW", "QNW"), ("AW", "QSW")})


def test_restrictions_are_respected():
    forbid = {("QNW", "QNE")}
    plan = generate_many_behaviors(G, "AW", {"AE"}, forbid)
    assert not forbid & set(plan.steps)


def test_compose_identical_and_similar():
    a = RoutePlan.linear("R", ["AE", "QNE", "AN"])
    b = ["AN", "QNW", "AW"]
    assert compose_subroutes([a, b]).chamber_sequence() == ["AE", "QNE", "AN", "QNW", "AW"]
    # the second copy is turned to start where the first one stopped
    twice = compose_subroutes([a, a], mode="similar", start="AE")
    assert twice.chamber_sequence() == ["AE", "QNE", "AN", "QNW", "AW"]
    with pytest.raises(DiscontinuousFragments):
        compose_subroutes([a, a])
    with pytest.raises(DiscontinuousFragments):
        compose_subroutes([a, ["QNW", "AW"]], mode="similar")


def test_side_anchored_partition_of_the_ring():
    ring = RoutePlan.linear("P", list(PATROL_RING), cyclic=True)
    subs = partition_route(ring)
    assert [s.steps for s in subs] == [
        ("AW", "QSW", "QSE", "AE"),
        ("AE", "QNE", "AN"),
        ("AN", "QNW", "AW"),
    ]
    assert all(s.starts_at_side and s.ends_at_side for s in subs)
    again = compose_subroutes(subs, cyclic=True, robot="P")
    assert again == ring


def test_cycle_break_partition_of_the_ring():
    ring = RoutePlan.linear("P", list(PATROL_RING), cyclic=True)
    subs = partition_route(ring, "cycle-break", G, "QSE")
    assert [s.steps for s in subs] == [
        ("AW", "QSW", "QSE", "AE"),
        ("AS", "QSE", "AE"),
        ("AE", "QNE", "AN"),
        ("AN", "QNW", "AW"),
    ]
    with pytest.raises(ValueError):
        partition_route(ring, "cycle-break", G, "AE")


def test_central_cycle_cannot_be_anchored():
    spin = RoutePlan.linear("P", ["QNW", "QNE", "QSE", "QSW"], cyclic=True)
    with pytest.raises(UnanchorableCycle):
        partition_route(spin)


@settings(max_examples=50, deadline=None)
@given(st.sampled_from(SIDES), st.integers(0, 21), st.integers(0, 21))
def test_partition_then_compose_is_identity(start, i, j):
    a = generate_all_behaviors(G, start)[i]
    b = generate_similar_behavior(generate_all_behaviors(G, "AW")[j], a.chamber_sequence()[-1])
    plan = compose_subroutes([a, b], robot="R")
    if len(set(plan.chamber_sequence())) != len(plan.chamber_sequence()):
        plan = RoutePlan.linear("R", plan.chamber_sequence())
    subs = partition_route(plan)
    assert all(s.starts_at_side and s.ends_at_side for s in subs)
    assert compose_subroutes(subs, robot="R") == plan


def test_stages_cover_the_patrol():
    patrol = quadrant_patrol()
    s1, s2 = stage_plans(patrol, 0, G), stage_plans(patrol, 1, G)
    assert [p.chamber_sequence() for p in s1][0] == ["AE", "QNE", "AN"]
    assert [p.chamber_sequence() for p in s2][0] == ["AN", "QNE", "AE"]
    assert stage_plans(patrol, 2, G) == s1


def test_plan_file_round_trip():
    text = (CORPUS / "plans" / "quadrant_patrol.plan").read_text()
    plans = load_plans(text)
    assert plans == quadrant_patrol()
    assert dump_plans(plans) == text


@pytest.mark.parametrize(
    "text, needle",
    [
        ("step AE QNE\n", "robot line first"),
        ("robot R start AE\nstep AE QNE\nbogus\n", "cannot parse"),
    ],
)
def test_plan_file_errors(text, needle):
    with pytest.raises(PlanError) as exc:
        load_plans(text)
    assert needle in str(exc.value)


def test_plan_validation():
    with pytest.raises(PlanError):
        validate_plan(G, RoutePlan.linear("R", ["AE", "AN"]))
    with pytest.raises(PlanError):
        validate_plan(G, RoutePlan.linear("R", ["AE", "QNE"], terminate=False))


def test_service_names_round_trip():
    assert parse_service(service_name("try", "R1", 3)) == ("try", "R1", 3)
    assert parse_service(service_name("start", "R1")) == ("start", "R1", None)


def test_compile_rejects_bad_names():
    plan = RoutePlan.linear("R", ["AE", "QNE", "AN"])
    with pytest.raises(NameCollision):
        compile_to_imds(G, [plan, plan])
    with pytest.raises(NameCollision):
        compile_to_imds(G, [plan.renamed("R_1")])


def test_compile_rejects_overfull_start():
    g = EnvGraph.build([("A", None), ("B", 1)], [("A", "B")])
    plans = [RoutePlan.linear("X", ["B", "A"]), RoutePlan.linear("Y", ["B", "A"])]
    with pytest.raises(CapacityExceeded):
        compile_to_imds(g, plans)


@pytest.mark.parametrize("name", sorted(SCENARIOS))
def test_compiled_scenarios_validate_cleanly(name):
    src = compile_to_imds(G, SCENARIOS[name]())
    diags = validate_spec(expand_spec(parse_spec(src)))
    assert diags.errors == []


@pytest.mark.parametrize("name", sorted(SCENARIOS) + ["quadrant_patrol_stage1", "quadrant_patrol_stage2"])
def test_corpus_matches_a_fresh_compile(name):
    plans = load_plans((CORPUS / "plans" / f"{name}.plan").read_text())
    assert compile_to_imds(G, plans) == (CORPUS / f"{name}.imds").read_text()
    if name in SCENARIOS:
        assert plans == SCENARIOS[name]()


@pytest.mark.parametrize(
    "name", ["single_robot", "twin_fleet", "crossing_four", "north_crossing", "quadrant_patrol_stage1"]
)
def test_protocol_is_safe(name):
    plans = load_plans((CORPUS / "plans" / f"{name}.plan").read_text())
    assert check_protocol_safety(corpus_lts(f"{name}.imds"), G, plans) == []
