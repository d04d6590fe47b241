"""Print the synthesized jet coefficients next to the reference tables.

Usage::

    python scripts/golden_tables.py [--precision 120] [--convention unperturbed]
"""

import argparse
import time

import mpmath

from canard.precision import working_precision
from canard.synthesis import REFERENCE_PSI_COEFFICIENTS, SynthesisSpec, golden_check, synthesize


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--precision", type=int, default=120)
    parser.add_argument("--convention", default="unperturbed", choices=("unperturbed", "literal"))
    args = parser.parse_args()
    with working_precision(args.precision):
        for k, table in REFERENCE_PSI_COEFFICIENTS.items():
            start = time.perf_counter()
            result = synthesize(SynthesisSpec(k, table["delta"], convention=args.convention))
            report = golden_check(result)
            print(f"k = {k}, delta = {table['delta']} ({time.perf_counter() - start:.1f} s), "
                  f"{'pass' if report['passed'] else 'FAIL'}")
            print(f"  {'power':>5}  {'computed':>22}  {'reference':>16}  rel. error")
            for power, entry in report["coefficients"].items():
                flag = "" if entry["sign_agrees"] else "  (sign differs)"
                print(f"  {power:>5}  {entry['computed']:>22}  {entry['reference']:>16}  "
                      f"{entry['relative_error']}{flag}")
            print(f"  roots x/delta: {', '.join(mpmath.nstr(x, 8) for x in result.scaled_roots)}")


if __name__ == "__main__":
    main()
