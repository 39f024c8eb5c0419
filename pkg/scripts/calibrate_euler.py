"""Regenerate the committed Euler weight table from the exact flow of a generic field."""

from __future__ import annotations

import argparse
import json
from pathlib import Path

from hopfpath.rde import calibrate_euler_weights

OUT = Path(__file__).resolve().parents[1] / "src" / "hopfpath" / "data" / "euler_weights.json"


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-nodes", type=int, default=6)
    ap.add_argument("--out", type=Path, default=OUT)
    args = ap.parse_args()
    shapes = calibrate_euler_weights(args.max_nodes)
    payload = {
        "max_nodes": args.max_nodes,
        "rule": "c(t) = 1/sigma(t) for 'inverse_symmetry', 1 for 'unit'",
        "shapes": shapes,
    }
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text(json.dumps(payload, indent=1, sort_keys=True) + "\n")
    counts = {r: list(shapes.values()).count(r) for r in sorted(set(shapes.values()))}
    print(f"wrote {len(shapes)} shapes to {args.out}: {counts}")


if __name__ == "__main__":
    main()
