"""Build, verify and draw a set of example patches as SVG.

    python scripts/render_examples.py --out-dir figures
"""

import argparse
import json
from dataclasses import dataclass, field, fields
from pathlib import Path

from hypertile.builder import BuildSpec, build, build_kh
from hypertile.geometry import realize
from hypertile.mapcore import serialize, verify
from hypertile.render import SvgStyle, render_svg
from hypertile.tuples import parse_tuple

DEFAULT_TUPLES = ("7,7,7", "4,4,4,4,4", "3,5,10,12", "3,3,6,9", "3,4,8,12", "3,5,5,7")


@dataclass
class RenderConfig:
    out_dir: str = "figures"
    layers: int = 3
    size: int = 800
    tuples: tuple = DEFAULT_TUPLES
    kh: tuple = field(default=(6, 8, 10))
    kh_layers: int = 2


def parse_config(argv=None) -> RenderConfig:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for f in fields(RenderConfig):
        flag = "--" + f.name.replace("_", "-")
        if f.name == "tuples":
            p.add_argument(flag, nargs="+", default=list(DEFAULT_TUPLES))
        elif f.name == "kh":
            p.add_argument(flag, type=int, nargs=3, default=[6, 8, 10])
        else:
            p.add_argument(flag, type=type(f.default), default=f.default)
    ns = vars(p.parse_args(argv))
    ns["tuples"], ns["kh"] = tuple(ns["tuples"]), tuple(ns["kh"])
    return RenderConfig(**ns)


def main(argv=None):
    cfg = parse_config(argv)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    jobs = [(t.replace(",", "_"), parse_tuple(t), lambda t=t: build(BuildSpec(parse_tuple(t), cfg.layers)).map)
            for t in cfg.tuples]
    k, l, m = cfg.kh
    jobs.append((f"kh_{k}_{l}_{m}", None, lambda: build_kh(k, l, m, cfg.kh_layers)))
    index = {}
    for name, t, make in jobs:
        cm = make()
        rep = verify(cm, t)
        real = realize(cm)
        (out / f"{name}.json").write_bytes(serialize(cm))
        (out / f"{name}.svg").write_text(render_svg(real, SvgStyle(size=cfg.size)))
        index[name] = {"faces": cm.n_faces, "verified": rep.passed, "max_edge_error": real.max_edge_error,
                       "max_angle_error": real.max_angle_error}
        print(f"{name}: {cm.n_faces} faces, verify {'pass' if rep.passed else 'FAIL'}, "
              f"edge error {real.max_edge_error:.1e}")
    (out / "index.json").write_text(json.dumps(index, indent=1, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
