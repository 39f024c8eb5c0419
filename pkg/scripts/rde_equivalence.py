"""Discrepancy between the translated-driver and translated-field RDE solves under refinement."""

import argparse
import json

from hopfpath.experiments import EquivalenceConfig, rde_equivalence


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--config", default=None, help="JSON with keys of EquivalenceConfig (field, driver, v0, y0, L, T, ns)")
    p.add_argument("--ns", type=int, nargs="+", default=None)
    a = p.parse_args()
    cfg = EquivalenceConfig()
    if a.config:
        with open(a.config) as fh:
            for k, v in json.load(fh).items():
                setattr(cfg, k, tuple(v) if isinstance(v, list) and k in ("driver", "y0", "ns") else v)
    if a.ns:
        cfg.ns = tuple(a.ns)
    r = rde_equivalence(cfg)
    print("n,discrepancy")
    for n, e in zip(r.ns, r.errors):
        print(f"{n},{e:.6e}")
    print(f"# empirical order {r.order:.3f}")


if __name__ == "__main__":
    main()
