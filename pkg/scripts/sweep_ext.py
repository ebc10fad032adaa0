"""Ext dimension table over a parameter grid, both directions.

Prints one line per grid point with the computed dimension, the stated one,
and whether the difference is explained.
"""

from __future__ import annotations

import argparse
import itertools
from dataclasses import dataclass, field

from loopw.exactalg import rat
from loopw.extensions import ExtParams, solve_ext_cm, solve_ext_mc


@dataclass
class Config:
    bs: list[str] = field(default_factory=lambda: ["0", "1", "-1", "2", "1/2"])
    deltas: list[str] = field(default_factory=lambda: ["-1", "0", "1", "2", "3"])
    shifts: list[str] = field(default_factory=lambda: ["0", "1"])
    ds: list[str] = field(default_factory=lambda: ["0", "1"])
    c: str = "1"
    window: int = 3
    interior: int = 1


def grid(cfg: Config):
    for b, delta, s, d in itertools.product(cfg.bs, cfg.deltas, cfg.shifts, cfg.ds):
        if rat(b) != 0 and d != "0":
            continue  # d only enters at b = 0
        yield ExtParams.of(b, delta, 0, s, cfg.c, d)


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--window", type=int, default=3)
    ap.add_argument("--interior", type=int, default=1)
    ap.add_argument("--direction", choices=("mc", "cm", "both"), default="both")
    args = ap.parse_args()
    cfg = Config(window=args.window, interior=args.interior)
    flagged = 0
    print(f"{'dir':3} {'b':>4} {'Δ':>3} {'α+β':>4} {'d':>2}  dim  thm  status")
    for p in grid(cfg):
        for direction in ("mc", "cm"):
            if args.direction not in (direction, "both"):
                continue
            if direction == "mc":
                rep = solve_ext_mc(p, cfg.window, cfg.interior)
            else:
                rep = solve_ext_cm(p, cfg.window, cfg.interior)
            status = "unexplained" if rep.unexplained else ("note" if rep.discrepancy_notes else "ok")
            flagged += rep.unexplained
            m = p.module
            print(f"{direction:3} {str(p.b):>4} {str(m.delta):>3} {str(p.shift):>4} {str(m.d):>2}  {rep.dim_ext:3}  {rep.theorem_dim:3}  {status}")
    print(f"unexplained: {flagged}")


if __name__ == "__main__":
    main()
