#!/usr/bin/env python3
"""Structure comparison of the four fixed-size models on one instance set.

Generates a seeded batch, solves every model exactly, and writes the full
report bundle (per-solution geometry, cross-model deviations, pooled
distance histograms, alternate-optima counts) plus an SVG scatter of the
first instance when coordinates are available.
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

import divopt as dv
from divopt.cli import main as cli_main

MODELS = ("maxsum", "maxmin", "maxminsum", "mindiff")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--family", default="gkd-d")
    parser.add_argument("--n", type=int, default=12)
    parser.add_argument("--m", type=int, default=3)
    parser.add_argument("--count", type=int, default=30)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default="structure_report")
    args = parser.parse_args()

    out = Path(args.out)
    insts = out / "instances"
    code = cli_main(["generate", "--family", args.family, "--n", str(args.n),
                     "--m", str(args.m), "--seed", str(args.seed),
                     "--count", str(args.count), "--out", str(insts)])
    if code != 0:
        return code

    files = sorted(str(p) for p in insts.glob("*.txt"))
    code = cli_main(["analyze", *files, "--m", str(args.m),
                     "--models", ",".join(MODELS), "--out", str(out)])
    if code != 0:
        return code

    first = dv.parse_instance(Path(files[0]).read_text(encoding="utf-8"),
                              name=Path(files[0]).stem)
    if first.coords is not None and first.coords.shape[1] == 2:
        code = cli_main(["plot", files[0], "--style", "scatter",
                         "--models", ",".join(MODELS), "--m", str(args.m),
                         "--out", str(out / "scatter_first.svg")])
        if code != 0:
            return code
    for model in MODELS:
        code = cli_main(["plot", files[0], "--style", "histogram",
                         "--models", model, "--m", str(args.m),
                         "--out", str(out / f"hist_{model}_first.svg")])
        if code != 0:
            return code
    print(f"report bundle under {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
