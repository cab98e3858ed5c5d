"""Splice matched window pairs in random small systems and report invalid steps.

    python scripts/window_movie_trials.py --systems 200 --pairs all
"""
import argparse
import json
import sys
import time

from datam.movie import splice_trials


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--systems", type=int, default=200)
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--pairs", default="50", help="pairs tried per system, or 'all'")
    ap.add_argument("--progress", action="store_true")
    args = ap.parse_args()
    cap = None if args.pairs == "all" else int(args.pairs)
    t = time.perf_counter()

    def progress(k, stats):
        if args.progress:
            print(f"{k:4d} systems  {stats['tried']} splices  {stats['invalid']} invalid", file=sys.stderr)
    stats = splice_trials(args.systems, args.seed, pairs_per_system=cap, on_system=progress)
    stats["seconds"] = round(time.perf_counter() - t, 1)
    print(json.dumps(stats, sort_keys=True))
    return 0 if stats["invalid"] == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
