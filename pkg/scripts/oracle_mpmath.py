"""High-precision resonance oracle for piecewise-constant potentials.

On a segment with constant ``v`` the Stark equation is solved exactly by
``Ai`` and ``Bi`` of ``f^{1/3}(x - (z - v)/f)``, so the matching Wronskian can
be written with mpmath Airy functions alone.  The roots printed here are
frozen into the test suite.

    python scripts/oracle_mpmath.py
"""
from __future__ import annotations

import mpmath as mp

from starkres.potential import double_bump, square_barrier, square_well

mp.mp.dps = 30
OMEGA = mp.exp(2j * mp.pi / 3)


def wronskian(segments, L, f, k):
    z = k * k
    f3 = mp.cbrt(f)
    # A1 = Ai(omega f^{1/3} (x - z/f)) at x = -L
    t = OMEGA * f3 * (-L - z / f)
    y, dy = mp.airyai(t), OMEGA * f3 * mp.airyai(t, derivative=1)
    pos = -L
    cells = []
    for a, b, v in segments:
        if a > pos:
            cells.append((pos, a, 0))
        cells.append((a, b, v))
        pos = b
    if pos < L:
        cells.append((pos, L, 0))
    for a, b, v in cells:
        ta, tb = f3 * (a - (z - v) / f), f3 * (b - (z - v) / f)
        M = mp.matrix([[mp.airyai(ta), mp.airybi(ta)],
                       [f3 * mp.airyai(ta, 1), f3 * mp.airybi(ta, 1)]])
        c = mp.lu_solve(M, mp.matrix([y, dy]))
        y = c[0] * mp.airyai(tb) + c[1] * mp.airybi(tb)
        dy = f3 * (c[0] * mp.airyai(tb, 1) + c[1] * mp.airybi(tb, 1))
    t = f3 * (L - z / f)
    A, dA = mp.airyai(t), f3 * mp.airyai(t, 1)
    return dy * A - y * dA


def root(p, f, k_guess):
    segs = [tuple(mp.mpf(v) for v in s) for s in p.segments]
    return mp.findroot(lambda k: wronskian(segs, mp.mpf(p.L), mp.mpf(f), k),
                       mp.mpc(k_guess), tol=mp.mpf(10) ** -25)


def reflection_numerator(segments, L, k):
    """``(psi' + ik psi) e^{-ikL}`` at ``L`` for ``psi = e^{-ikx}`` left of the support (``f = 0``)."""
    y, dy = mp.exp(1j * k * L), -1j * k * mp.exp(1j * k * L)
    pos = -L
    for a, b, v in segments:
        for lo, hi, val in ((pos, a, 0), (a, b, v)):
            if hi > lo:
                s = mp.sqrt(k * k - val)
                h = hi - lo
                c, sn = mp.cos(s * h), mp.sin(s * h)
                y, dy = c * y + sn / s * dy, -s * sn * y + c * dy
        pos = b
    if L > pos:
        h = L - pos
        c, sn = mp.cos(k * h), mp.sin(k * h)
        y, dy = c * y + sn / k * dy, -k * sn * y + c * dy
    return (dy + 1j * k * y) * mp.exp(-1j * k * L)


def reflection_zero(p, k_guess):
    segs = [tuple(mp.mpf(v) for v in s) for s in p.segments]
    return mp.findroot(lambda k: reflection_numerator(segs, mp.mpf(p.L), k), mp.mpc(k_guess),
                       tol=mp.mpf(10) ** -25)


CASES = [
    ("barrier f=0.1 j=2", square_barrier(2, 1), 0.1, 0.95043042280914825 - 0.00083624669476477654j),
    ("barrier f=0.1 j=3", square_barrier(2, 1), 0.1, 1.0996313389473575 - 0.0011297121126836876j),
    ("barrier f=0.1 line j=2", square_barrier(2, 1), 0.1, 0.46254221843046534 - 0.82851847768149767j),
    ("well f=0.3 bound state", square_well(-2, 1), 0.3, 0.0017981845465697737 - 1.1192500522665363j),
    ("double bump f=0.1", double_bump(1, 0.5, 1, V1=2), 0.1, 1.2471477201834962 - 0.21065653379116508j),
]

if __name__ == "__main__":
    for name, p, f, guess in CASES:
        k = root(p, f, guess)
        print(f"{name}: k = {mp.nstr(k.real, 17)} {mp.nstr(k.imag, 17)}j")
    k0 = reflection_zero(double_bump(1, 0.5, 1, V1=2), 1.24 - 0.2j)
    print(f"double bump F zero: k0 = {mp.nstr(k0.real, 17)} {mp.nstr(k0.imag, 17)}j")
