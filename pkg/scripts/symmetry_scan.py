#!/usr/bin/env python3
"""Scan a catalog system for homogeneous symmetries over a weight range.

For each half-integer weight in [--from, --to] and each parity, solve the
determining equations and report the dimension of the solution space.

Usage:
    python scripts/symmetry_scan.py --catalog bous-embed --from -1/2 --to -5
"""

import argparse
import sys
import time
from dataclasses import dataclass
from fractions import Fraction

from superjet import catalog
from superjet.algebra import EVEN, ODD
from superjet.determine import find_symmetries
from superjet.grammar import print_flow


@dataclass
class ScanConfig:
    entry_id: str
    start: Fraction
    stop: Fraction
    step: Fraction
    parities: tuple
    assume_nonzero: tuple
    show_flows: bool


def scan(cfg: ScanConfig):
    doc = catalog.get(cfg.entry_id).doc
    sys_, ws = doc.system(), doc.weight_system()
    total = 0
    w = cfg.start
    while w >= cfg.stop:
        for par in cfg.parities:
            label = "even" if par == EVEN else "odd"
            t0 = time.time()
            res = find_symmetries(sys_, ws, w, par,
                                  assume_nonzero=cfg.assume_nonzero)
            dim = len(res.flows)
            total += dim
            print(f"weight {w!s:>6} {label:<5} dim {dim}  "
                  f"(ansatz {res.ansatz_size}, {time.time() - t0:.1f}s)")
            if cfg.show_flows:
                for fl in res.flows:
                    print(f"    {print_flow(fl)}")
        w -= cfg.step
    print(f"total symmetries found: {total}")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--catalog", required=True, dest="entry_id")
    ap.add_argument("--from", dest="start", default="-1/2")
    ap.add_argument("--to", dest="stop", default="-5")
    ap.add_argument("--step", default="1/2")
    ap.add_argument("--parity", choices=["even", "odd", "both"], default="both")
    ap.add_argument("--assume-nonzero", default="",
                    help="comma-separated parameters taken nonzero")
    ap.add_argument("--show-flows", action="store_true")
    args = ap.parse_args()

    parities = {"even": (EVEN,), "odd": (ODD,), "both": (EVEN, ODD)}[args.parity]
    cfg = ScanConfig(
        entry_id=args.entry_id,
        start=Fraction(args.start),
        stop=Fraction(args.stop),
        step=Fraction(args.step),
        parities=parities,
        assume_nonzero=tuple(s for s in args.assume_nonzero.split(",") if s),
        show_flows=args.show_flows,
    )
    scan(cfg)
    return 0


if __name__ == "__main__":
    sys.exit(main())
