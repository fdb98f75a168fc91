"""Run the grid-enlargement study on the bundled warehouse.

Ten scales, ten seeded trials per scale, both algorithms planned on
identical samples. Writes the per-trial CSV and prints per-scale means.

Usage: python scripts/run_scaling.py [--max-scale K] [--trials N] [--seed S] [output.csv]
"""

import argparse
import sys

sys.path.insert(0, "src")

from gridpilot.bench import scaling_study
from gridpilot.data import read_bundled


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("output", nargs="?", default="scaling.csv")
    parser.add_argument("--max-scale", type=int, default=10)
    parser.add_argument("--trials", type=int, default=10)
    parser.add_argument("--seed", type=int, default=42)
    args = parser.parse_args()

    report = scaling_study(read_bundled("warehouse.scn"), args.max_scale, args.trials, args.seed)
    with open(args.output, "w", encoding="utf-8") as fh:
        fh.write(report.to_csv())
    print(report.summary_lines(), end="")
    for note in report.notes:
        print(f"note: {note}")
    print(f"wrote {args.output}")


if __name__ == "__main__":
    main()
