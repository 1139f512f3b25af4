#!/usr/bin/env python3
"""Print filtering/cancellation order tables for the UDD and CDD families.

Columns phi^(alpha) are the leading low-frequency degrees of the odd
filter-function orders for the z-dephasing index; CO is the protocol
cancellation order. Runs exactly (rational times for CDD, >= 192-bit
reals for UDD).
"""
import argparse
import time

from filterforge import (
    cdd_sequence,
    fff_filtering_order,
    index_tuple,
    protocol_co,
    protocol_fo,
    toggling_control_matrix,
    udd_sequence,
)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--udd-max", type=int, default=8)
    parser.add_argument("--cdd-max", type=int, default=3)
    parser.add_argument("--alpha-max", type=int, default=7)
    args = parser.parse_args()

    alphas = [a for a in range(1, args.alpha_max + 1) if a % 2 == 1]
    header = ["protocol"] + [f"phi({a})" for a in alphas] + ["fo[cap]", "co"]
    print("  ".join(f"{h:>8}" for h in header))

    t0 = time.time()
    rows = [(f"udd{n}", udd_sequence(n, 1)) for n in range(1, args.udd_max + 1)]
    rows += [(f"cdd{k}", cdd_sequence(k, 1)) for k in range(1, args.cdd_max + 1)]
    for name, seq in rows:
        cm = toggling_control_matrix(seq, {"z"})
        phis = []
        for a in alphas:
            phi = fff_filtering_order(cm, index_tuple("z" * a, "z" * a))
            phis.append(str(phi))
        fo = protocol_fo(cm, args.alpha_max)
        co = protocol_co(cm)
        print("  ".join(f"{c:>8}" for c in [name] + phis + [str(fo), str(co)]))
    print(f"({time.time() - t0:.1f}s)")


if __name__ == "__main__":
    main()
