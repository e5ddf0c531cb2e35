"""Zero counts on the probe rectangles of every resonance-free region.

    python scripts/free_regions.py [--potential potentials/square_well.json] [--f 0.05]
"""
from __future__ import annotations

import argparse
from pathlib import Path

from starkres.asymptotics import resonance_free_regions
from starkres.potential import parse_potential, square_well
from starkres.resonance import count_zeros


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--potential")
    ap.add_argument("--f", type=float, default=0.05)
    ap.add_argument("--delta", type=float, default=0.2)
    ap.add_argument("--C0", type=float, default=10.0)
    args = ap.parse_args()
    p = parse_potential(Path(args.potential).read_text()) if args.potential else square_well(-2, 1)
    for reg in resonance_free_regions(p, args.f, args.delta, args.C0):
        counts = [count_zeros(p, args.f, r) for r in reg.probes]
        print(f"({reg.label}) {reg.inequalities}")
        for r, c in zip(reg.probes, counts):
            print(f"    [{r.re0:.3f}, {r.re1:.3f}] x [{r.im0:.3f}, {r.im1:.3f}]  zeros = {c}")


if __name__ == "__main__":
    main()
