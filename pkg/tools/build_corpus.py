"""Regenerate the compiled scenario corpus under corpus/.

    python tools/build_corpus.py

Writes the quadrant topology, one plan file and one compiled specification
per scenario, and the side-anchored stages of the quadrant patrol. The
expected exit-status table (corpus/expected_status.tsv) is maintained by
hand and is not touched.
"""

from pathlib import Path

from imds.routes import compile_to_imds, dump_env_graph, dump_plans, quadrant_topology, stage_plans
from imds.routes.scenarios import SCENARIOS, quadrant_patrol

CORPUS = Path(__file__).resolve().parent.parent / "corpus"


def main() -> None:
    g = quadrant_topology()
    (CORPUS / "plans").mkdir(parents=True, exist_ok=True)
    (CORPUS / "quadrant.topo").write_text(
        "# four side chambers around a ring of four single-robot chambers\n" + dump_env_graph(g)
    )
    for name, make in SCENARIOS.items():
        plans = make()
        (CORPUS / "plans" / f"{name}.plan").write_text(dump_plans(plans))
        (CORPUS / f"{name}.imds").write_text(compile_to_imds(g, plans))
    patrol = quadrant_patrol()
    for k in range(2):
        plans = stage_plans(patrol, k, g)
        (CORPUS / "plans" / f"quadrant_patrol_stage{k + 1}.plan").write_text(dump_plans(plans))
        (CORPUS / f"quadrant_patrol_stage{k + 1}.imds").write_text(compile_to_imds(g, plans))


if __name__ == "__main__":
    main()
