"""Classification against bounded exhaustive search over the degree-4 family.

    python scripts/run_crosscheck.py --radius 3 --budget 200000 --out crosscheck.json
"""

import argparse
import json
import sys
from dataclasses import asdict, dataclass, fields
from typing import Optional

from hypertile.oracle import cross_check, degree4_family


@dataclass
class CrossCheckConfig:
    max_entry: int = 13
    min_entry: int = 3
    radius: int = 3
    budget: int = 200_000
    deadline: Optional[float] = None
    out: str = "crosscheck.json"
    verbose: bool = True


def parse_config(argv=None) -> CrossCheckConfig:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for f in fields(CrossCheckConfig):
        flag = "--" + f.name.replace("_", "-")
        if f.type in (bool, "bool"):
            p.add_argument(flag, action=argparse.BooleanOptionalAction, default=f.default)
        else:
            conv = float if f.name == "deadline" else type(f.default)
            p.add_argument(flag, type=conv, default=f.default)
    return CrossCheckConfig(**vars(p.parse_args(argv)))


def main(argv=None):
    cfg = parse_config(argv)
    fam = degree4_family(cfg.max_entry, cfg.min_entry)

    def progress(row):
        if row.flag:
            print(f"{list(row.tuple)} {row.rule} {row.outcome} nodes={row.nodes} {row.flag}", file=sys.stderr)

    rep = cross_check(fam, cfg.radius, cfg.budget, progress=progress if cfg.verbose else None,
                      deadline=cfg.deadline)
    doc = {"config": asdict(cfg), **rep.to_json(timing=True)}
    with open(cfg.out, "w") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)
    summary = rep.summary(timing=True)
    print(json.dumps({k: summary[k] for k in ("tuples", "counts", "flags", "completed", "elapsed")}, indent=1))


if __name__ == "__main__":
    main()
