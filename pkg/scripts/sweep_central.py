"""Central-extension sweep: supports of the 2-cocycle space across b.

    python scripts/sweep_central.py --bs -1 0 1/2 1 2 3 --window 3
"""

from __future__ import annotations

import argparse
import json
from dataclasses import asdict, dataclass, field

from loopw.central import solve_central
from loopw.exactalg import rat


@dataclass
class Config:
    bs: list[str] = field(default_factory=lambda: ["-1", "0", "1/2", "1", "2", "3"])
    window: int = 3
    interior: int = 1
    ldeg: int = 5


def run(cfg: Config) -> list[dict]:
    rows = []
    for b in cfg.bs:
        rep = solve_central(rat(b), cfg.window, cfg.interior, cfg.ldeg)
        js = rep.to_json()
        rows.append(
            {
                "b": b,
                "dim_solutions": js["dim_solutions"],
                "supports": {k: sorted({q for s in v.values() for q in s}) for k, v in js["supports"].items()},
                "expected": js["expected_supports"],
                "structure_ok": js["structure_ok"],
            }
        )
    return rows


def main() -> None:
    ap = argparse.ArgumentParser()
    cfg = Config()
    ap.add_argument("--bs", nargs="+", default=cfg.bs)
    ap.add_argument("--window", type=int, default=cfg.window)
    ap.add_argument("--interior", type=int, default=cfg.interior)
    ap.add_argument("--ldeg", type=int, default=cfg.ldeg)
    cfg = Config(**vars(ap.parse_args()))
    print(json.dumps({"config": asdict(cfg), "rows": run(cfg)}, indent=2))


if __name__ == "__main__":
    main()
