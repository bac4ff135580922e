#!/usr/bin/env python3
"""Print the whole-roof deflection table: 5/10/15/20 elements per side,
compatible-strain vs assumed-strain elements, two slenderness ratios."""

import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from klshell.cases import make_case, solve_case

MESHES = [5, 10, 15, 20]


def main():
    print(f"{'R/t':>6s} {'type':>5s} " + " ".join(f"{n:>12d}" for n in MESHES))
    for slenderness in (1e2, 1e3):
        case = make_case("scordelis", slenderness=slenderness)
        for kind in ("cs", "cas"):
            vals = [solve_case(case, (n, n), kind, 3).deflection for n in MESHES]
            print(f"{slenderness:>6g} {kind:>5s} "
                  + " ".join(f"{v:12.5f}" for v in vals))


if __name__ == "__main__":
    main()
