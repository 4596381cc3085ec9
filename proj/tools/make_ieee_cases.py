#!/usr/bin/env python3
"""Convert the IEEE 14- and 118-bus MATPOWER cases (as shipped by PYPOWER)
into the plain-text case format read by awls::parse_case.

    pip install pypower
    python3 tools/make_ieee_cases.py --out data

Conversion rules (all values written in per unit / radians):
  * series admittance g + jb = 1 / (r + jx); branch charging b is placed on
    the from side as b_sh = b / 2 (single-arc model), g_sh = 0
  * tap ratio 0 in MATPOWER means a line, written as 1
  * angle-difference limits outside [-90, 90] deg are replaced by +-30 deg
  * generators whose solved output Pg is exactly 0 are synchronous condensers:
    their active range becomes [0, 0]
  * negative reactive demand is clamped to 0; bus shunts (Gs, Bs) are dropped
  * thermal limits: MATPOWER rateA is 9900 (unlimited) for these cases, so
    s_max = max(RATING_FACTOR * |S_ij|, RATING_FLOOR) with S_ij the from-side
    apparent flow at the solved operating point stored in the case
"""
import argparse
import cmath
import math
import os

RATING_FACTOR = 1.2
RATING_FLOOR = 0.1
ANGLE_LIMIT_DEG = 30.0


def convert(ppc, name):
    base = ppc["baseMVA"]
    bus, gen, branch = ppc["bus"], ppc["gen"], ppc["branch"]
    vm = {int(r[0]): r[7] for r in bus}
    va = {int(r[0]): math.radians(r[8]) for r in bus}
    lines = [f"# {name}: converted by tools/make_ieee_cases.py",
             f"# rating rule: s_max = max({RATING_FACTOR} * |S_base|, {RATING_FLOOR}) pu",
             f"BASE_MVA {base:g}", "", "BUS",
             "# id type v_min v_max pd qd"]
    for r in bus:
        qd = max(r[3], 0.0) / base
        lines.append(f"{int(r[0])} {int(r[1])} {float(r[12])!r} {float(r[11])!r} "
                     f"{float(r[2] / base)!r} {float(qd)!r}")
    lines += ["", "GEN", "# bus pg_min pg_max qg_min qg_max"]
    for r in gen:
        if r[7] <= 0:
            continue
        pmax = 0.0 if r[1] == 0 else r[8] / base
        lines.append(f"{int(r[0])} {float(r[9] / base)!r} {float(pmax)!r} "
                     f"{float(r[4] / base)!r} {float(r[3] / base)!r}")
    lines += ["", "BRANCH",
              "# id from to g b g_sh b_sh tap theta_min theta_max s_max"]
    for k, r in enumerate(branch):
        if r[10] <= 0:
            continue
        f, t = int(r[0]), int(r[1])
        y = 1.0 / complex(r[2], r[3])
        g, b = y.real, y.imag
        bsh = r[4] / 2.0
        tap = r[8] if r[8] != 0 else 1.0
        lo, hi = r[11], r[12]
        if lo < -90 or hi > 90:
            lo, hi = -ANGLE_LIMIT_DEG, ANGLE_LIMIT_DEG
        vi, vj, th = vm[f], vm[t], va[f] - va[t]
        p = vi * vi * (g / tap**2) - vi * vj / tap * (g * math.cos(th) + b * math.sin(th))
        q = -vi * vi * (b / tap**2 + bsh) - vi * vj / tap * (g * math.sin(th) - b * math.cos(th))
        smax = max(RATING_FACTOR * math.hypot(p, q), RATING_FLOOR)
        lines.append(f"{k + 1} {f} {t} {float(g)!r} {float(b)!r} 0 {float(bsh)!r} {float(tap)!r} "
                     f"{float(math.radians(lo))!r} {float(math.radians(hi))!r} {float(smax)!r}")
    return "\n".join(lines) + "\n"


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="data")
    args = ap.parse_args()
    from pypower.case14 import case14
    from pypower.case118 import case118
    os.makedirs(args.out, exist_ok=True)
    for fn, name, fname in [(case14, "IEEE 14-bus", "ieee14.case"),
                            (case118, "IEEE 118-bus", "ieee118.case")]:
        with open(os.path.join(args.out, fname), "w") as fh:
            fh.write(convert(fn(), name))


if __name__ == "__main__":
    main()
