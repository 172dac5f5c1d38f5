#!/usr/bin/env python3
"""Stability verdicts across wave speeds for several coupling strengths."""

import argparse
import json

from evanskit.invariants import stability_report
from evanskit.model import build_coupled_wave


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", type=float, nargs="+", default=[0.5, 1.0, 2.0])
    ap.add_argument("--c", type=float, nargs="+", default=[0.0, 0.3])
    ap.add_argument("--jsonl", default=None,
                    help="also write one JSON object per case to this path")
    args = ap.parse_args()

    header = (f"{'p':>5} {'c':>6} {'chi':>12} {'Pi':>12} {'dIdc':>10} "
              f"{'ratio':>10}  verdict")
    print(header)
    print("-" * len(header))
    reports = []
    for p in args.p:
        model, wave = build_coupled_wave(p)
        for c in args.c:
            rep = stability_report(model, wave, c, params={"p": p})
            print(f"{p:5.2f} {c:6.2f} {rep.chi:12.4e} {rep.Pi:12.4e} "
                  f"{rep.dIdc:10.4f} {rep.ratio_check:10.6f}  {rep.verdict}")
            reports.append(rep)
    if args.jsonl:
        with open(args.jsonl, "w") as fh:
            for rep in reports:
                fh.write(json.dumps(json.loads(rep.to_json()), sort_keys=True))
                fh.write("\n")


if __name__ == "__main__":
    main()
