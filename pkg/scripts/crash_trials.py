"""Splice a small-budget finger onto itself across matched windows and sort each trial into
the fuzz or collision case.

    python scripts/crash_trials.py --seeds 30 --height 16 --budget 2
"""
import argparse
import json
import sys
from collections import Counter

from datam.gallery import make_finger_candidate
from datam.movie import finger_crash_trial


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=30)
    ap.add_argument("--height", type=int, default=16)
    ap.add_argument("--budget", type=int, default=2)
    ap.add_argument("--verbose", action="store_true")
    args = ap.parse_args()
    S = make_finger_candidate(args.height, args.budget)
    kinds = Counter()
    for seed in range(args.seeds):
        out = finger_crash_trial(S, seed)
        kind = "no-match" if out is None else out.kind
        kinds[kind] += 1
        if args.verbose:
            print(f"seed {seed}: {kind} {'' if out is None else out.detail}", file=sys.stderr)
    print(json.dumps(dict(sorted(kinds.items()))))
    return 0 if set(kinds) <= {"fuzz", "collision"} else 1


if __name__ == "__main__":
    sys.exit(main())
