"""Resonances approaching the simple zeros of F as the field is switched off.

    python scripts/reflection_zero_track.py [--potential potentials/double_bump.json]
"""
from __future__ import annotations

import argparse
from pathlib import Path

from starkres.asymptotics import track_reflection_zero_resonance
from starkres.contour import ComplexRect
from starkres.potential import parse_potential, double_bump
from starkres.resonance import NoConvergenceError
from starkres.scattering import find_F_zeros


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--potential")
    ap.add_argument("--rect", default="0.5:2.5:-0.5:-0.01")
    ap.add_argument("--f", type=float, default=0.2)
    ap.add_argument("--halvings", type=int, default=5)
    args = ap.parse_args()
    p = parse_potential(Path(args.potential).read_text()) if args.potential else double_bump(1, 0.5, 1, V1=2)
    print("re_k0,im_k0,f,distance,distance_over_f")
    for zero in find_F_zeros(p, ComplexRect.parse(args.rect)):
        if zero.order != 1:
            continue
        try:
            tr = track_reflection_zero_resonance(p, args.f, zero, halvings=args.halvings)
        except NoConvergenceError as e:
            print(f"# {zero.k0}: {e}")
            continue
        for f, d in tr.approach:
            print(f"{zero.k0.real:.10f},{zero.k0.imag:.10f},{f:g},{d:.4e},{d / f:.4f}")


if __name__ == "__main__":
    main()
