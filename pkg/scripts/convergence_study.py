"""Collision-model convergence to the GKLS semigroup for the ququart exchange model.

    python3 scripts/convergence_study.py --t 1.0 --dts 0.1 0.05 0.025 0.0125
"""
from __future__ import annotations

import argparse

from dilation_lab.collision import semigroup_convergence
from dilation_lab.scenarios import ex3_collision_spec


def main() -> None:
    ap = argparse.ArgumentParser(description="Collision-model convergence table.")
    ap.add_argument("--t", type=float, default=1.0)
    ap.add_argument("--gamma", type=float, default=1.0)
    ap.add_argument("--dts", type=float, nargs="+", default=[0.1, 0.05, 0.025, 0.0125])
    ap.add_argument("--primed", action="store_true", help="use the interaction with the extra |0><2| x |3><3| terms")
    args = ap.parse_args()
    spec = ex3_collision_spec(args.dts[0], args.gamma, primed=args.primed)
    rep = semigroup_convergence(spec, args.t, args.dts)
    print(f"{'dt':>10} {'steps':>6} {'frobenius':>12} {'max entry':>12}")
    for r in rep.rows:
        print(f"{r.dt:10.5f} {r.steps:6d} {r.frobenius:12.4e} {r.max_entry:12.4e}")
    print(f"fitted order: {rep.order:.4f}")


if __name__ == "__main__":
    main()
