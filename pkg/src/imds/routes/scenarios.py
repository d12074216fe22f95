"""Named multi-robot scenarios on the quadrant topology."""

from __future__ import annotations

from .plans import RoutePlan, generate_identical_fleet, generate_many_behaviors, generate_similar_behavior
from .topology import quadrant_topology

PATROL_RING = ("AW", "QSW", "QSE", "AE", "QNE", "AN", "QNW")

# Forbidden steps for the guided robot W (AW->AE); N (AN->AS) gets the mirror
# image across the QNW-QSE diagonal. Found by tools/search_restrictions.py.
GUIDED_W_FORBIDDEN = frozenset({("AW", "QSW"), ("QNW", "QSW"), ("QNE", "QSE")})
DIAGONAL_MIRROR = {
    "AW": "AN", "AN": "AW", "AE": "AS", "AS": "AE",
    "QNW": "QNW", "QSE": "QSE", "QNE": "QSW", "QSW": "QNE",
}  # fmt: skip


def _ring_from(start: str) -> list[str]:
    k = PATROL_RING.index(start)
    return list(PATROL_RING[k:] + PATROL_RING[:k])


def single_robot() -> list[RoutePlan]:
    return [RoutePlan.linear("ROBOT", ["AE", "QNE", "AN"])]


def twin_fleet() -> list[RoutePlan]:
    """Two identical robots on AE->QNE->AN, contending for QNE."""
    return generate_identical_fleet(single_robot()[0], 2)


def quadrant_patrol() -> list[RoutePlan]:
    """Four robots shuttling forever, each inside its own quadrant."""
    base = RoutePlan.linear("P", ["AE", "QNE", "AN", "QNE"], cyclic=True)
    return [
        generate_similar_behavior(base, start).renamed(f"P{i}")
        for i, start in enumerate(("AE", "AN", "AW", "AS"), 1)
    ]


def crossing_four() -> list[RoutePlan]:
    """Each robot crosses two central chambers; together they close the ring."""
    routes = [
        ["AW", "QNW", "QNE", "AE"],
        ["AN", "QNE", "QSE", "AS"],
        ["AE", "QSE", "QSW", "AW"],
        ["AS", "QSW", "QNW", "AN"],
    ]
    return [RoutePlan.linear(f"R{i}", r) for i, r in enumerate(routes, 1)]


def north_crossing() -> list[RoutePlan]:
    """A and B cross the northern chambers head-on; C and D shuttle in the south."""
    return [
        RoutePlan.linear("A", ["AW", "QNW", "QNE", "AE"]),
        RoutePlan.linear("B", ["AE", "QNE", "QNW", "AW"]),
        RoutePlan.linear("C", ["AS", "QSW"], cyclic=True),
        RoutePlan.linear("D", ["AS", "QSE"], cyclic=True),
    ]


def guided_pair(forbid_w=GUIDED_W_FORBIDDEN) -> list[RoutePlan]:
    """W and N follow restricted routes; E and S may take any route to their target."""
    g = quadrant_topology()
    forbid_n = {(DIAGONAL_MIRROR[a], DIAGONAL_MIRROR[b]) for a, b in forbid_w}
    return [
        generate_many_behaviors(g, "AW", {"AE"}, forbid_w, robot="W"),
        generate_many_behaviors(g, "AN", {"AS"}, forbid_n, robot="N"),
        generate_many_behaviors(g, "AE", {"AW"}, robot="E"),
        generate_many_behaviors(g, "AS", {"AN"}, robot="S"),
    ]


def free_four() -> list[RoutePlan]:
    """Like :func:`guided_pair` without restrictions."""
    return guided_pair(frozenset())


def ring_intruder() -> list[RoutePlan]:
    """Four robots patrol the outer ring forever; a fifth wants AS->QSE->AE."""
    starts = ("AW", "AE", "AN", "AW")
    plans = [RoutePlan.linear(f"P{i}", _ring_from(s), cyclic=True) for i, s in enumerate(starts, 1)]
    plans.append(RoutePlan.linear("R5", ["AS", "QSE", "AE"]))
    return plans


SCENARIOS = {
    "single_robot": single_robot,
    "twin_fleet": twin_fleet,
    "quadrant_patrol": quadrant_patrol,
    "crossing_four": crossing_four,
    "north_crossing": north_crossing,
    "guided_pair": guided_pair,
    "ring_intruder": ring_intruder,
}
