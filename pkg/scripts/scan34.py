"""Side lengths of the [3^l, 4^k] family and their closest pair.

    python scripts/scan34.py --l-max 8 --k-max 8 --csv scan34.csv
"""

import argparse
from dataclasses import dataclass, fields
from typing import Optional

from hypertile.geometry import check_mixed_34_identities, scan_34_family


@dataclass
class ScanConfig:
    l_max: int = 8
    k_max: int = 8
    l_min: int = 1
    k_min: int = 0
    tol: float = 1e-9
    csv: Optional[str] = None


def parse_config(argv=None) -> ScanConfig:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for f in fields(ScanConfig):
        conv = str if f.name == "csv" else type(f.default)
        p.add_argument("--" + f.name.replace("_", "-"), type=conv, default=f.default)
    return ScanConfig(**vars(p.parse_args(argv)))


def main(argv=None):
    cfg = parse_config(argv)
    rep = scan_34_family(cfg.l_max, cfg.k_max, cfg.l_min, cfg.k_min, cfg.tol)
    for l, k, ell, ch, _ in sorted(rep.rows, key=lambda r: r[2]):
        print(f"[3^{l},4^{k}]  l = {ell:.12f}  cosh(l/2) = {ch:.12f}")
    print(f"{len(rep.rows)} tuples; minimal gap {rep.min_gap:.6g} between {rep.closest}; "
          f"collisions below {cfg.tol}: {rep.collisions or 'none'}")
    ident = check_mixed_34_identities()
    print(f"[3^4,4^2] vs [5^4]: {ident['side_length']:.15f} vs {ident['side_length_5_4']:.15f}")
    if cfg.csv:
        with open(cfg.csv, "w") as fh:
            fh.write(rep.to_csv())


if __name__ == "__main__":
    main()
