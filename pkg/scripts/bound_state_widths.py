"""Exact bound-state resonances of a well against the predicted shift and width.

    python scripts/bound_state_widths.py [--potential potentials/square_well.json]
"""
from __future__ import annotations

import argparse
from pathlib import Path

from starkres.asymptotics import WidthUnderflowError, bound_state_resonance
from starkres.potential import parse_potential, square_well
from starkres.spectrum import bound_states


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--potential")
    ap.add_argument("--f", default="0.5,0.4,0.3,0.25,0.2,0.15,0.12,0.1")
    args = ap.parse_args()
    p = parse_potential(Path(args.potential).read_text()) if args.potential else square_well(-2, 1)
    print("state,f,re_z,im_z,shift,width_pred,width_ratio")
    for n, bs in enumerate(bound_states(p)):
        for f in (float(x) for x in args.f.split(",")):
            try:
                r, width = bound_state_resonance(p, f, bs)
            except WidthUnderflowError:
                continue
            shift = r.z.real - (bs.lambda0 + f * bs.lambda1)
            print(f"{n},{f:g},{r.z.real:.12g},{r.z.imag:.6e},{shift:.6e},{width:.6e},"
                  f"{-r.z.imag / width:.4f}")


if __name__ == "__main__":
    main()
