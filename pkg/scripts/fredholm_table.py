"""Newton polygons of det(1 - X U_p) on Katz bases, against rank(e) and T_p mod p.

    python scripts/fredholm_table.py --p 11 --weights 12 22 24 32 42 --np 4
"""

import argparse

from hidatriple.classical import dim_cusp_level1, hecke_matrix, level1_basis
from hidatriple.linalg import charpoly
from hidatriple.ordproj import fredholm, newton_polygon, ordinary_projector, slope_multiplicity


def unit_eigencount(p: int, k: int) -> int:
    d = dim_cusp_level1(k)
    if d == 0:
        return 0
    cp = [c % p for c in charpoly(hecke_matrix(level1_basis(k, p * (d + 2)), p))]
    return d - next(i for i, c in enumerate(cp) if c)


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--p", type=int, default=11)
    ap.add_argument("--weights", type=int, nargs="+", default=[12, 16, 22, 24, 32, 42])
    ap.add_argument("--np", type=int, default=4)
    a = ap.parse_args()
    print(f"{'k':>4} {'dim':>4} {'rank e':>7} {'slope0':>7} {'T_p units':>10}  newton polygon")
    for k in a.weights:
        op = ordinary_projector(a.p, k, a.np)
        P = fredholm(op.up)
        segs = ", ".join(f"{s}x{m}" for s, m in newton_polygon(P, a.p, a.np))
        m0 = slope_multiplicity(P, a.p, a.np, 0)
        print(f"{k:>4} {op.basis.dim:>4} {op.rank:>7} {m0:>7} {unit_eigencount(a.p, k):>10}  {segs}")


if __name__ == "__main__":
    main()
