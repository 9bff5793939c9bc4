"""Run the acceptance criteria outside pytest and print one line each.

    python scripts/run_acceptance.py [--seed N] [--json PATH] [criterion ...]
"""

import argparse
import json
import sys

from nbcrit.acceptance import CRITERIA, run_criterion


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("criteria", nargs="*", type=int, help="criterion numbers (default: all)")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--json", help="also write the detailed results here")
    args = parser.parse_args(argv)
    numbers = args.criteria or sorted(CRITERIA)
    results = []
    for k in numbers:
        res = run_criterion(k, args.seed)
        print(res.line(), flush=True)
        results.append(res)
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(
                [{"criterion": r.number, "title": r.title, "passed": r.passed, "seconds": round(r.seconds, 3),
                  "details": r.details} for r in results],
                fh, indent=2, sort_keys=True, default=str,
            )
    passed = sum(r.passed for r in results)
    print(f"{passed}/{len(results)} criteria passed")
    return 0 if passed == len(results) else 1


if __name__ == "__main__":
    sys.exit(main())
