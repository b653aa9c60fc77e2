#!/usr/bin/env python3
"""Print a compact structure table across desk-scale instances.

For each (family, size, ell) this lists the composition factors with labels
and dimensions, the socle series, and the submodule-lattice size, i.e. the
computed counterpart of the four structure tables.

Usage:
    python scripts/structure_table.py [--ell 3 5 7] [--seed 0]
"""

import argparse

from rank3mod.analyze import run_analysis
from rank3mod.errors import OutOfScaleError


def fmt_layer(layer) -> str:
    return "(" + " + ".join(f"{e['label']}{e['dim']}" for e in layer) + ")"


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--ell", type=int, nargs="*", default=[3, 5, 7])
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    instances = [("o+", 3), ("o+", 4), ("o-", 3), ("o-", 4), ("u", 4), ("u", 5), ("u", 6)]
    for family, size in instances:
        for ell in args.ell:
            try:
                res = run_analysis(family, size, ell, seed=args.seed)
            except OutOfScaleError:
                continue
            rep = res.report
            facs = ", ".join(
                f"{f['label']}({f['dim']})x{f['mult']}" for f in rep["factors"]
            )
            socle = " - ".join(fmt_layer(lay) for lay in rep["socleSeries"])
            verdict = "ok" if rep["verdict"]["match"] else "MISMATCH"
            print(f"{family} size={size} ell={ell}: {facs}")
            print(f"    socle {socle}")
            print(f"    lattice {len(rep['lattice']['nodes'])} nodes  [{verdict}]")


if __name__ == "__main__":
    main()
