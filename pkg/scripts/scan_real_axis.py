#!/usr/bin/env python3
"""Sweep D along the real axis, print the samples as CSV plus root brackets."""

import argparse

from evanskit.evans import Numerics, real_axis_scan
from evanskit.model import build_coupled_wave


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", type=float, default=1.0)
    ap.add_argument("--c", type=float, default=0.0)
    ap.add_argument("--lambda-max", type=float, default=3.0, dest="lambda_max")
    ap.add_argument("--n", type=int, default=31)
    ap.add_argument("--tol", type=float, default=1e-9)
    ap.add_argument("--out", default=None, help="CSV path (stdout when omitted)")
    args = ap.parse_args()

    model, wave = build_coupled_wave(args.p)
    res = real_axis_scan(model, wave, args.c, args.lambda_max, n=args.n,
                         numerics=Numerics(tol=args.tol))
    rows = ["lambda_re,lambda_im,D_re,D_im"]
    for lam, v in zip(res.lams, res.values):
        rows.append(f"{float(lam)!r},0.0,{float(v.real)!r},{float(v.imag)!r}")
    text = "\n".join(rows) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        print(text, end="")
    for a, b in res.brackets:
        print(f"# bracket [{float(a)!r}, {float(b)!r}]")
    for r in res.roots:
        print(f"# root {float(r)!r}")
    print(f"# d_inf {int(res.d_inf)}")


if __name__ == "__main__":
    main()
