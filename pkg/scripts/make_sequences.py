#!/usr/bin/env python3
"""Write the standard protocol files (UDD_1..8, CDD_0..3, free) as JSON."""
import argparse
from pathlib import Path

from filterforge import cdd_sequence, free_evolution, save_sequence, udd_sequence


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="protocols", help="output directory")
    parser.add_argument("--udd-max", type=int, default=8)
    parser.add_argument("--cdd-max", type=int, default=3)
    args = parser.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_sequence(free_evolution(1), out / "free.json")
    for n in range(1, args.udd_max + 1):
        save_sequence(udd_sequence(n, 1), out / f"udd{n}.json")
    for k in range(args.cdd_max + 1):
        save_sequence(cdd_sequence(k, 1), out / f"cdd{k}.json")
    print(f"wrote {1 + args.udd_max + args.cdd_max + 1} sequence files to {out}/")


if __name__ == "__main__":
    main()
