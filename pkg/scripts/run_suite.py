#!/usr/bin/env python3
"""Run the full verification suite and write a JSON transcript.

Usage:
    python scripts/run_suite.py [--extended] [--jobs N] [--out suite.json]

Equivalent to `rank3mod suite --format json` with the transcript also written
to a file, which is convenient for CI artifacts.
"""

import argparse
import json
import sys
import time
from pathlib import Path

from rank3mod.cli import (
    EXTENDED_INSTANCES,
    OUT_OF_SCALE_INSTANCES,
    SUITE_INSTANCES,
    _suite_one,
)
from rank3mod.analyze import canon_size
from rank3mod.geometry import closed_params


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--extended", action="store_true")
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="suite.json")
    args = ap.parse_args()

    instances = list(SUITE_INSTANCES) + (EXTENDED_INSTANCES if args.extended else [])
    results = []
    t0 = time.time()
    if args.jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(
                pool.map(
                    _suite_one,
                    [(f, s, e, args.seed, 3000, False) for f, s, e in instances],
                )
            )
    else:
        for f, s, e in instances:
            res = _suite_one((f, s, e, args.seed, 3000, False))
            print(f"{f:>2} size={s} ell={e:>2}  {res['status']}", flush=True)
            results.append(res)
    for f, s, e in OUT_OF_SCALE_INSTANCES:
        v = closed_params(canon_size(f, s)).v
        results.append(
            {"family": f, "size": s, "ell": e, "status": "OUT_OF_SCALE",
             "note": f"skipped: |P| = {v} exceeds desk scale"}
        )
    results.sort(key=lambda r: (r["family"], r["size"], r["ell"]))
    ok = all(r["status"] in ("PASS", "OUT_OF_SCALE") for r in results)
    payload = {"suite": results, "allPass": ok, "wallSeconds": round(time.time() - t0, 1)}
    Path(args.out).write_text(json.dumps(payload, indent=2))
    print(f"suite: {'PASS' if ok else 'FAIL'} ({payload['wallSeconds']}s) -> {args.out}")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
