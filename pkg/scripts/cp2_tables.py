#!/usr/bin/env python3
"""Regenerate the homology tables for the line bundles over the projective
plane: zero-winding tables for m = 1..5 and the full tables across all
radius regimes, as markdown."""

import sys
from fractions import Fraction

from rfhomology.basemodel import cp_model
from rfhomology.rfh import full_rfh, rfh_w0_table


def main() -> int:
    model = cp_model(2)
    degrees = (-6, 6)
    print("## zero-winding homology of O(-m) over the projective plane\n")
    header = "| degree | " + " | ".join(f"m={m}" for m in range(1, 6)) + " |"
    print(header)
    print("|" + "---|" * 6)
    tables = {m: rfh_w0_table(model, m, Fraction(1), degrees) for m in range(1, 6)}
    for d in range(degrees[0], degrees[1] + 1):
        cells = " | ".join(str(tables[m][d]) for m in range(1, 6))
        print(f"| {d} | {cells} |")

    print("\n## full homology across the radius regimes (odd degrees shown)\n")
    print("| m | tau | regime | odd-degree group |")
    print("|---|---|---|---|")
    samples = [
        (1, Fraction(1, 4)), (1, Fraction(1, 2)), (1, Fraction(3)),
        (2, Fraction(1)), (2, Fraction(2)), (2, Fraction(3)),
        (3, Fraction(1)), (4, Fraction(10)),
    ]
    for m, tau in samples:
        res = full_rfh(model, m, tau, (-3, 3))
        print(f"| {m} | {tau} | {res.regime.value} | {res.table[1]} |")
    return 0


if __name__ == "__main__":
    sys.exit(main())
