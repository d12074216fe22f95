"""Search forbidden-step sets for the two restricted robots of the quadrant scenario.

Robot W travels AW->AE and robot N travels AN->AS; the free robots E (AE->AW)
and S (AS->AN) keep every route. N's restrictions are the mirror image of W's
across the QNW-QSE diagonal. A candidate is accepted when the compiled system
has no total deadlock, no partial deadlock and, from every reachable
configuration, all four robots can still terminate. Candidates are tried
smallest first; the results table goes to stdout as JSON lines.

    python tools/search_restrictions.py > search.jsonl
"""

import itertools
import json
import sys

from imds.core import build_lts
from imds.lang import load_system
from imds.routes import NoRouteExists, compile_to_imds, generate_many_behaviors, quadrant_topology
from imds.verify import (
    TerminationPredicate,
    check_partial_deadlock,
    check_termination_recoverable,
    check_total_deadlock,
)

MIRROR = {"AW": "AN", "AN": "AW", "AE": "AS", "AS": "AE", "QNW": "QNW", "QSE": "QSE", "QNE": "QSW", "QSW": "QNE"}


def scenario(g, forbid_w):
    forbid_n = {(MIRROR[a], MIRROR[b]) for a, b in forbid_w}
    return [
        generate_many_behaviors(g, "AW", {"AE"}, forbid_w, robot="W"),
        generate_many_behaviors(g, "AN", {"AS"}, forbid_n, robot="N"),
        generate_many_behaviors(g, "AE", {"AW"}, robot="E"),
        generate_many_behaviors(g, "AS", {"AN"}, robot="S"),
    ]


def evaluate(g, plans):
    sys_, _ = load_system(compile_to_imds(g, plans))
    lts = build_lts(sys_)
    return {
        "nodes": lts.num_nodes,
        "total_deadlock_free": check_total_deadlock(lts).holds,
        "partial_deadlock_free": check_partial_deadlock(lts).holds,
        "recoverable": check_termination_recoverable(lts, TerminationPredicate.of("WNES")).holds,
    }


def main(max_size: int) -> None:
    g = quadrant_topology()
    steps = list(generate_many_behaviors(g, "AW", {"AE"}).steps)
    seen = set()
    for size in range(max_size + 1):
        for forbid in itertools.combinations(steps, size):
            try:
                plans = scenario(g, set(forbid))
            except NoRouteExists:
                continue
            key = (plans[0].steps, plans[1].steps)
            if key in seen:
                continue
            seen.add(key)
            row = {"forbid_w": sorted(forbid), **evaluate(g, plans)}
            row["accepted"] = row["total_deadlock_free"] and row["partial_deadlock_free"] and row["recoverable"]
            print(json.dumps(row), flush=True)


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 3)
