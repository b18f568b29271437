#!/usr/bin/env python3
"""Generate a reusable instance library across all four families.

Writes one subdirectory per family with instance files and a manifest,
mirroring the layout the CLI's `generate` command produces.  Everything
is seeded, so rebuilding the library yields byte-identical files.
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from divopt.cli import main as cli_main

BATCHES = [
    # family, n, m, count
    ("som", 10, 3, 10),
    ("som", 25, 5, 10),
    ("mdg", 10, 3, 10),
    ("mdg", 30, 5, 10),
    ("gkd", 12, 4, 10),
    ("gkd-d", 12, 3, 10),
    ("gkd-d", 50, 5, 10),
    ("gkd-d", 100, 10, 10),
]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="instance_library",
                        help="library root directory")
    parser.add_argument("--seed", type=int, default=0,
                        help="base seed for every batch")
    args = parser.parse_args()
    root = Path(args.out)
    for family, n, m, count in BATCHES:
        sub = root / f"{family}_n{n}"
        code = cli_main(["generate", "--family", family, "--n", str(n),
                         "--m", str(m), "--seed", str(args.seed),
                         "--count", str(count), "--out", str(sub)])
        if code != 0:
            return code
    print(f"library complete under {root}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
