"""Largest delta that keeps all k - 1 roots, for several k and both conventions."""

import argparse
import time

from canard.precision import working_precision
from canard.synthesis import SynthesisSpec, tune_delta

BRACKETS = {4: ("1e-2", "1e-1"), 6: ("1e-4", "1e-2"), 8: ("5e-5", "2e-4")}


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--digits", type=int, default=4)
    parser.add_argument("--k", type=int, nargs="*", default=[4, 6, 8])
    args = parser.parse_args()
    with working_precision(120):
        for k in args.k:
            for convention in ("unperturbed", "literal"):
                start = time.perf_counter()
                lo, hi = BRACKETS[k]
                res = tune_delta(SynthesisSpec(k, lo, convention=convention), k - 1, (lo, hi), args.digits)
                print(f"k = {k} {convention:>11}: delta* = {res.rounded(args.digits)} "
                      f"({len(res.history)} syntheses, {time.perf_counter() - start:.1f} s)")


if __name__ == "__main__":
    main()
