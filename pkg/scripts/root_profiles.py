"""Tabulate the rescaled slow divergence integral for k = 4, 6, 8.

Writes ``profile_k{k}.csv`` with columns ``x2, I2, I`` to the output
directory, where ``I2 = I(delta x2) / (delta**(2k+1) x2**3)``.
"""

import argparse
import csv
from pathlib import Path

import mpmath
from mpmath import mpf

from canard.precision import working_precision
from canard.synthesis import SynthesisSpec, synthesize

DELTAS = {4: "1e-3", 6: "1e-4", 8: "1e-5"}


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="profiles")
    parser.add_argument("--points", type=int, default=301)
    args = parser.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with working_precision(120):
        for k, delta in DELTAS.items():
            result = synthesize(SynthesisSpec(k, delta))
            series, d = result.expansion.integral, result.spec.delta
            top = mpmath.sqrt(k - 1) + mpf("0.5")
            with open(out / f"profile_k{k}.csv", "w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(["x2", "I2", "I"])
                for j in range(1, args.points + 1):
                    x2 = top * j / args.points
                    value = series.evaluate(d * x2)
                    w.writerow([mpmath.nstr(x2, 12), mpmath.nstr(value / (d ** (2 * k + 1) * x2**3), 15),
                                mpmath.nstr(value, 15)])
            lobes = [max(abs(series.evaluate(a + (b - a) * i / 100)) for i in range(1, 100))
                     for a, b in zip([r.location for r in result.roots], [r.location for r in result.roots][1:])]
            print(f"k = {k}: roots x2 = {', '.join(mpmath.nstr(x, 6) for x in result.scaled_roots)}")
            if lobes:
                print(f"        |I| between roots ranges over {mpmath.nstr(min(lobes), 3)} .. "
                      f"{mpmath.nstr(max(lobes), 3)}")


if __name__ == "__main__":
    main()
