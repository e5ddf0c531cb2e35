"""Prediction error of both string families against exact roots as f halves.

    python scripts/string_convergence.py [--potential potentials/square_barrier.json]
"""
from __future__ import annotations

import argparse
from pathlib import Path

from starkres.asymptotics import string_line, string_positive_axis
from starkres.potential import parse_potential, square_barrier
from starkres.resonance import refine_root


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--potential")
    ap.add_argument("--window", default="0.9:1.1")
    ap.add_argument("--f", default="0.2,0.1,0.05,0.025")
    args = ap.parse_args()
    p = parse_potential(Path(args.potential).read_text()) if args.potential else square_barrier(2, 1)
    window = tuple(float(x) for x in args.window.split(":"))
    fs = [float(x) for x in args.f.split(",")]
    print("family,f,n,max_err,ratio")
    for name, fam in (("positive_axis", string_positive_axis), ("line", string_line)):
        prev = None
        for f in fs:
            preds = fam(p, f, window)
            err = max(abs(q.k_pred - refine_root(p, q.k_pred, f).k) for q in preds)
            ratio = "" if prev is None else f"{prev / err:.3f}"
            print(f"{name},{f:g},{len(preds)},{err:.4e},{ratio}")
            prev = err


if __name__ == "__main__":
    main()
