"""Outer-derivation quotient per degree for a few b values."""

from __future__ import annotations

import argparse
from dataclasses import dataclass, field

from loopw.derivations import contains_inner, solve_derivations
from loopw.exactalg import rat


@dataclass
class Config:
    bs: list[str] = field(default_factory=lambda: ["0", "1", "2", "-1", "5/7"])
    degrees: list[int] = field(default_factory=lambda: [-2, -1, 0, 1, 2])
    window: int = 4
    interior: int = 2
    pdeg: int = 3
    ldeg: int = 3


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--window", type=int, default=4)
    ap.add_argument("--interior", type=int, default=2)
    args = ap.parse_args()
    cfg = Config(window=args.window, interior=args.interior)
    print(f"{'b':>5} {'deg':>4} {'dim S':>6} {'dim Inn':>8} {'quot':>5} inner⊆S")
    for b in cfg.bs:
        for c in cfg.degrees:
            rep = solve_derivations(rat(b), c, cfg.window, cfg.interior, cfg.pdeg, cfg.ldeg)
            print(f"{b:>5} {c:>4} {rep.solutions.dimension:>6} {rep.dim_inner:>8} {rep.quotient_dim:>5} {contains_inner(rep)}")


if __name__ == "__main__":
    main()
