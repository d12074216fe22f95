"""Regenerate tests/golden from the current CLI output.

    python tools/update_golden.py

Review the diff before committing: the golden files pin report and
diagram formats byte for byte.
"""

import contextlib
import io
import json
from pathlib import Path

from imds.cli import main

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"
GOLDEN = ROOT / "tests" / "golden"

# golden file -> argv; {tmp} is a scratch report
CASES = {
    "two_robots.report.txt": ["check", "{corpus}/two_robots.imds", "--terminate", "ROBOT[1]"],
    "two_robots.report.json": ["check", "{corpus}/two_robots.imds", "--terminate", "ROBOT[1]", "--format", "json"],
    "north_crossing.report.txt": ["check", "{corpus}/north_crossing.imds", "--terminate", "C"],
    "two_robots.render.txt": ["render", "{golden}/two_robots.report.json", "{corpus}/two_robots.imds"],
    "two_robots.render2.txt": ["render", "{golden}/two_robots.report.json", "{corpus}/two_robots.imds", "--index", "1"],
    "north_crossing.lasso.txt": [
        "render", "{golden}/north_crossing.report.json", "{corpus}/north_crossing.imds",
        "--property", "termination-inevitable",
    ],
    "empty.render.txt": ["render", "{golden}/empty.witness.json", "{corpus}/two_robots.imds"],
}  # fmt: skip


def run(argv):
    argv = [a.format(corpus=CORPUS, golden=GOLDEN) for a in argv]
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        main(argv)
    return out.getvalue()


def main_() -> None:
    GOLDEN.mkdir(exist_ok=True)
    (GOLDEN / "empty.witness.json").write_text(
        json.dumps({"schema": "imds-witness/1", "property": "total-deadlock", "kind": "finite-path",
                    "prefix": [], "cycle": []}, indent=2) + "\n"
    )  # fmt: skip
    (GOLDEN / "north_crossing.report.json").write_text(
        run(["check", "{corpus}/north_crossing.imds", "--terminate", "C", "--format", "json"])
    )
    for name, argv in CASES.items():
        (GOLDEN / name).write_text(run(argv))


if __name__ == "__main__":
    main_()
