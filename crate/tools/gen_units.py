"""Regenerates crates/core/data/units.json with PARI/GP (via cypari).

Input: a JSON list of {"D": int, "delta": [m, n]} requests, one per order
O_F[w] with w = (t + sqrt(delta))/2. Output: for each order, three unit
generators a + b*w written as [[a_m, a_n], [b_m, b_n]] in the basis 1, tau.

Units come from bnfinit (GRH-conditional unless certified). When the order
is not maximal, each fundamental unit is replaced by its least power that
lies in the order; the result generates a finite-index subgroup, which the
engine accepts as sound input.

usage: python3 tools/gen_units.py requests.json > crates/core/data/units.json
"""

import json
import sys
from fractions import Fraction

from cypari import pari

GET_POLABS = pari("(r) -> r.polabs")
GET_FU = pari("(b) -> b.fu")


def field_data(d):
    if d % 4 == 1:
        return 1, (d - 1) // 4
    return 0, d // 4


def order_params(s, c0, m, n):
    # delta = t^2 - 4 n_w modulo 4 O_F; find t in {0,1,tau,1+tau}
    for tm in (0, 1):
        for tn in (0, 1):
            # t^2 = tm^2 + 2 tm tn tau + tn^2 (s tau + c0)
            sq_m = tm * tm + tn * tn * c0
            sq_n = 2 * tm * tn + tn * tn * s
            nm, nn = sq_m - m, sq_n - n
            if nm % 4 == 0 and nn % 4 == 0:
                return (tm, tn), (nm // 4, nn // 4)
    raise ValueError("delta has no square class modulo 4")


def quad_coords(c, s, c0):
    """Coordinates (m, n) of a polmod/rational in y with y = tau."""
    m = Fraction(str(pari.polcoef(c, 0, "y")))
    n = Fraction(str(pari.polcoef(c, 1, "y")))
    return m, n


def to_order(rnf, u, s, c0):
    """a + b w coordinates of an absolute element, or None if not in O_F[w]."""
    rel = pari.liftall(pari.rnfeltabstorel(rnf, u))
    b = pari.polcoef(rel, 1, "x")
    a = pari.polcoef(rel, 0, "x")
    out = [quad_coords(a, s, c0), quad_coords(b, s, c0)]
    if any(v.denominator != 1 for pair in out for v in pair):
        return None
    return [[int(v) for v in pair] for pair in out]


def units_for(d, delta):
    s, c0 = field_data(d)
    (tm, tn), (nm, nn) = order_params(s, c0, *delta)
    nf = pari.nfinit(f"y^2 - {s}*y - {c0}")
    # w is a root of x^2 - t x + n; the variable x is w itself
    relpol = pari(f"x^2 - ({tm} + {tn}*y)*x + ({nm} + {nn}*y)")
    rnf = pari.rnfinit(nf, relpol)
    absp = GET_POLABS(rnf)
    bnf = pari.bnfinit(absp, 1)
    fu = GET_FU(bnf)
    units = []
    maximal = True
    for u in fu:
        u = pari.lift(u)
        k = 1
        while True:
            c = to_order(rnf, pari.Mod(u, absp) ** k, s, c0)
            if c is not None:
                break
            maximal = False
            k += 1
            if k > 64:
                raise RuntimeError(f"no power of a unit lies in the order D={d} delta={delta}")
        units.append(c)
    source = "pari:bnfinit"
    if not maximal:
        source += ":order-subgroup"
    return {"D": d, "delta": list(delta), "units": units, "source": source}


def main():
    reqs = json.load(open(sys.argv[1]))
    out = [units_for(r["D"], tuple(r["delta"])) for r in reqs]
    lines = ",\n  ".join(json.dumps(r, separators=(",", ":")) for r in out)
    sys.stdout.write('{"fields": [\n  ' + lines + "\n]}\n")


if __name__ == "__main__":
    main()
