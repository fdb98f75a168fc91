"""Run the strategy/algorithm comparison on the bundled warehouse.

Produces the comparison table for all three strategies across the three
recorded replay backends, as Markdown on stdout and CSV next to it.

Usage: python scripts/run_comparison.py [output.csv]
"""

import sys

sys.path.insert(0, "src")

from gridpilot.bench import comparison_csv, comparison_markdown, run_comparison
from gridpilot.data import bundled_path, read_bundled
from gridpilot.instructions import ReplayBackend

INSTRUCTION = "Navigate to Shelf 3, avoid the repair area, and prefer the open lanes."
STRATEGIES = ["Navigate Quickly", "Maximize Safety", "Balance Efficiency and Safety"]


def main():
    backends = [
        ReplayBackend.from_file(bundled_path(f"replay_{name}.json"), name=name)
        for name in ("mistral", "llama3", "llama3.1")
    ]
    rows = run_comparison(read_bundled("warehouse.scn"), INSTRUCTION, STRATEGIES, backends)
    print(comparison_markdown(rows))
    out = sys.argv[1] if len(sys.argv) > 1 else "comparison.csv"
    with open(out, "w", encoding="utf-8") as fh:
        fh.write(comparison_csv(rows))
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
