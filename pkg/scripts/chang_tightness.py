"""Exhaustive Chang-type scans with tightness statistics.

Prints one JSON report per n covering every check. The n = 4 weight scan
uses one subset per distinct span and takes a few minutes on one core, so it
is opt-in via --weight-n4.
"""

import argparse
import json

from fsparse.chang_verifier import scan_all


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-n", type=int, default=4)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--weight-n4", action="store_true")
    args = ap.parse_args()
    for n in range(1, args.max_n + 1):
        checks = ["improved", "original", "granularity"]
        if n <= 3 or args.weight_n4:
            checks.append("weight")
        rep = scan_all(n, checks, jobs=args.jobs)
        summary = rep.to_json()
        summary["violations"] = len(rep.violations)
        print(json.dumps(summary, sort_keys=True))


if __name__ == "__main__":
    main()
