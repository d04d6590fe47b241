"""Regularized flow at moderate epsilon: drift, difference map, cycles.

Runs four small experiments on the quadratic-linear two-fold with the
arctan sigmoid, then searches for an attracting cycle on the variant with
a downward opening upper fold (``systems/two_fold_attracting.json``).
"""

import math
from pathlib import Path

import mpmath

from canard.flow import (
    RegularizedSystem,
    critical_manifold,
    find_limit_cycles,
    hausdorff_distance,
    integrate,
    singular_cycle,
    transition,
    tune_lambda,
)
from canard.ode import Event
from canard.pws import filippov_field, load_system, reference_system
from canard.regularization import ArctanRegularization
from canard.sdi import sdi_ipm

ROOT = Path(__file__).resolve().parent.parent


def drift(phi):
    rs = RegularizedSystem(reference_system(), phi, "0.05")
    marks = [Event(lambda t, z, c=c: z[0] - c, 1, False, str(c)) for c in (-0.35, -0.25)]
    stop = Event(lambda t, z: z[0] + 0.2, 1, True, "stop")
    traj = integrate(rs, (-0.5, float(critical_manifold(rs, -0.5))), 2000.0, events=marks + [stop])
    hits = {e.name: e.t for e in traj.events}
    rate = 0.1 / (hits["-0.25"] - hits["-0.35"])
    predicted = 0.05**2 * float(filippov_field(reference_system(), mpmath.mpf("-0.3"))[0])
    print(f"drift at x = -0.3: {rate:.5e} measured, {predicted:.5e} from the sliding speed")


def breaking_parameter(phi):
    for eps in ("0.1", "0.05"):
        res = tune_lambda(RegularizedSystem(reference_system(), phi, eps), -0.09)
        print(f"eps = {eps}: lam_tilde = {res.lam_tilde:.6f} (lam = {res.lam:.3e})")


def extrapolation(phi, y=-0.25):
    rows, rhs = [], []
    for eps in (0.12, 0.1, 0.08):
        tr = transition(RegularizedSystem(reference_system(), phi, eps), y)
        rows.append([1, eps * eps * math.log(eps), eps * eps])
        rhs.append(eps * eps * tr.log_derivative)
        print(f"eps = {eps}: eps^2 log|d Delta_-/dy| = {rhs[-1]:.6f}")
    limit = mpmath.lu_solve(mpmath.matrix(rows), mpmath.matrix(rhs))[0]
    with mpmath.workdps(40):
        target = sdi_ipm(reference_system(), phi, y)[0]
    print(f"extrapolated {mpmath.nstr(limit, 6)}, one sided integral {mpmath.nstr(target, 6)}")


def attracting_cycle(phi):
    sys = load_system(ROOT / "systems" / "two_fold_attracting.json")
    rs = RegularizedSystem(sys, phi, "0.1", 0.020588849706026154)
    search = find_limit_cycles(rs, seeds=[-0.04])
    for c in search.cycles:
        dist = hausdorff_distance(c.points, singular_cycle(sys, math.sqrt(-c.y)))
        print(f"cycle through y = {c.y:.6f}: multipliers {c.multiplier_divergence:.4f} (divergence), "
              f"{c.multiplier_variational:.4f} (variational), {c.multiplier_difference:.4f} (difference); "
              f"Hausdorff distance {dist:.4f}")


def main():
    phi = ArctanRegularization()
    drift(phi)
    breaking_parameter(phi)
    extrapolation(phi)
    attracting_cycle(phi)


if __name__ == "__main__":
    main()
