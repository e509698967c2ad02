#!/usr/bin/env python3
"""Run every self-check of the built-in catalog and print a report.

Usage:
    python scripts/verify_catalog.py [--id ENTRY]... [--jobs N] [--json]
"""

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor

from superjet import catalog


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--id", action="append", dest="ids",
                    help="entry to verify (repeatable; default: all)")
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args()

    ids = args.ids or catalog.ids()
    t0 = time.time()
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(catalog.verify, ids))
    else:
        results = [catalog.verify(i) for i in ids]

    failures = 0
    rows = []
    for entry_id, result in zip(ids, results):
        for name, ok, detail in result:
            rows.append({"entry": entry_id, "check": name,
                         "ok": ok, "detail": detail})
            if not ok:
                failures += 1
            if not args.json:
                mark = "OK " if ok else "FAIL"
                print(f"{mark} {entry_id}:{name}  {detail}")
    if args.json:
        print(json.dumps({"rows": rows, "failures": failures}, indent=2))
    else:
        print(f"total {len(rows)} checks, {failures} failures, "
              f"{time.time() - t0:.1f}s")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
