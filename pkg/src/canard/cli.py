"""Command line front end.

Every numeric flag is parsed from its decimal string at the working
precision, so high precision inputs never pass through binary floats.
Outputs go to ``--out DIR``: files are staged in memory and written with a
temporary file plus rename once the command has succeeded, followed by a
``manifest.json`` that records the configuration hash, library versions,
file digests and golden-check outcomes.  Without ``--out`` results are only
printed.

Exit codes: 0 success, 2 configuration error, 3 numerical failure, 4 failed
audit.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import os
import platform
import sys
import tempfile
from pathlib import Path
from typing import Any, Sequence

import mpmath
from mpmath import mpf

from . import __version__
from .errors import AuditFailure, CanardError, ConfigError, NoReturnError, SynthesisError
from .flow import (
    RegularizedSystem,
    cycle_report_json,
    difference_map,
    difference_map_csv,
    find_limit_cycles,
    integrate,
    tune_lambda,
)
from .precision import DEFAULT_PRECISION, big, to_decimal, working_precision
from .pws import audit_assumptions, classify_sigma_point, load_system, reference_system, transversality_constants
from .regularization import BlendedRegularization, load_regfun, regfun_from_json
from .sdi import build_profile
from .synthesis import SynthesisSpec, golden_check, synthesize, tune_delta

log = logging.getLogger("canard")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_AUDIT = 0, 2, 3, 4


# output staging -------------------------------------------------------------------

class Artifacts:
    """Files staged in memory and written atomically on :meth:`commit`."""

    def __init__(self, out: str | None):
        self.out = Path(out) if out else None
        self.files: dict[str, str] = {}
        self.checks: dict[str, Any] = {}

    def add(self, name: str, text: str) -> None:
        self.files[name] = text

    def add_json(self, name: str, data: Any) -> None:
        self.add(name, json.dumps(data, indent=2, sort_keys=True) + "\n")

    def add_csv(self, name: str, header: Sequence[str], rows: Sequence[Sequence[Any]]) -> None:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        self.add(name, buf.getvalue())

    def commit(self, config: dict) -> None:
        if self.out is None or not self.files:
            return
        canonical = json.dumps(config, sort_keys=True, separators=(",", ":"))
        manifest = {
            "config": config,
            "config_sha256": hashlib.sha256(canonical.encode()).hexdigest(),
            "versions": {"canard": __version__, "mpmath": mpmath.__version__,
                         "python": platform.python_version()},
            "files": {name: hashlib.sha256(text.encode()).hexdigest() for name, text in sorted(self.files.items())},
            "checks": self.checks,
        }
        staged = dict(self.files)
        staged["manifest.json"] = json.dumps(manifest, indent=2, sort_keys=True) + "\n"
        self.out.mkdir(parents=True, exist_ok=True)
        temps = []
        try:
            for name, text in staged.items():
                fd, tmp = tempfile.mkstemp(prefix=f".{name}.", dir=self.out)
                with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
                    fh.write(text)
                temps.append((tmp, self.out / name))
            for tmp, final in temps:
                os.replace(tmp, final)
        finally:
            for tmp, _ in temps:
                if os.path.exists(tmp):
                    os.unlink(tmp)


# parsing helpers ------------------------------------------------------------------

def parse_grid(text: str) -> list[mpf]:
    """``a:b:n`` gives ``n`` equally spaced points from ``a`` to ``b``."""
    try:
        a, b, n = text.split(":")
        a, b, n = big(a), big(b), int(n)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"grid must look like a:b:n, got {text!r}") from exc
    if n < 1:
        raise ConfigError("grid needs at least one point")
    if n == 1:
        return [a]
    return [a + (b - a) * j / (n - 1) for j in range(n)]


def parse_pair(text: str) -> tuple[mpf, mpf]:
    try:
        a, b = text.split(":")
        return big(a), big(b)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"expected lo:hi, got {text!r}") from exc


def _dec(value) -> mpf:
    try:
        return big(value)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise ConfigError(f"not a number: {value!r}") from exc


def _system(args):
    return load_system(args.system) if args.system else reference_system()


def _regfun(args):
    return load_regfun(args.regfun)


def _lam_tilde(args, sys) -> mpf:
    eps = _dec(args.epsilon)
    lam = _dec(args.lam) if args.lam is not None else big(sys.lambda0)
    return (lam - big(sys.lambda0)) / eps


def _s(v, digits: int = 20) -> str:
    return mpmath.nstr(big(v), digits)


# commands ---------------------------------------------------------------------------

def cmd_classify(args, art: Artifacts) -> int:
    sys_ = _system(args)
    lam = _dec(args.lam) if args.lam is not None else None
    c = classify_sigma_point(sys_, _dec(args.x), lam)
    print(c.summary())
    art.add_json("classify.json", {"x": args.x, "lambda": args.lam, "kind": c.kind, "summary": c.summary(),
                                   "tangency": c.tangency})
    return EXIT_OK


def cmd_audit(args, art: Artifacts) -> int:
    sys_ = _system(args)
    report = audit_assumptions(sys_)
    for item in report.items:
        print(f"{item.name}: {item.status} {json.dumps(item.detail, default=str, sort_keys=True)}")
    data = report.to_json()
    if args.regfun:
        a_const, b_const = transversality_constants(sys_, _regfun(args))
        data["A"], data["B"] = to_decimal(a_const), to_decimal(b_const)
        print(f"A = {_s(a_const)}, B = {_s(b_const)}")
    art.add_json("audit.json", data)
    art.checks["audit_passed"] = report.passed
    if not report.passed:
        raise AuditFailure("assumption audit failed: " + ", ".join(i.name for i in report.failed), report)
    return EXIT_OK


def cmd_sdi(args, art: Artifacts) -> int:
    sys_, phi = _system(args), _regfun(args)
    grid = parse_grid(args.grid)
    profile = build_profile(sys_, phi, grid, order=args.order, method=args.method)
    rows = [[to_decimal(x), to_decimal(v)] for x, v in zip(profile.grid, profile.values)]
    art.add_csv("sdi.csv", ["x", "I"], rows)
    series = profile.series
    art.add_json("sdi_series.json", {"order": args.order, "coefficients": [to_decimal(c) for c in series.coeffs]})
    print(f"cubic coefficient I'''(0)/6 = {_s(series.coeffs[3])}")
    for x, v in zip(profile.grid[:: max(1, len(grid) // 10)], profile.values[:: max(1, len(grid) // 10)]):
        print(f"I({_s(x, 8)}) = {_s(v, 15)}")
    return EXIT_OK


def _synth_spec(args) -> SynthesisSpec:
    return SynthesisSpec(args.k, _dec(args.delta), _dec(args.upsilon), _regfun(args), _system(args),
                         args.order, args.convention)


def cmd_synth(args, art: Artifacts) -> int:
    spec = _synth_spec(args)
    try:
        result = synthesize(spec, strict=True)
    except SynthesisError as exc:
        if exc.result is not None:
            art.add_json("synth.json", exc.result.to_json())
            art.checks["synthesis"] = exc.reason
        raise
    data = result.to_json()
    golden = golden_check(result)
    data["golden_check"] = golden
    art.checks["golden_check"] = None if golden is None else golden["passed"]
    art.checks["monotonicity"] = result.monotonicity.passed if result.monotonicity else None
    art.checks["simple_roots"] = result.n_simple_roots
    art.add_json("synth.json", data)
    jet = result.psi.jet()
    rows = []
    for power, c in enumerate(result.psi.coefficients):
        ref = golden["coefficients"].get(power) if golden else None
        rows.append([power, to_decimal(c), to_decimal(jet[power]), ref["reference"] if ref else "",
                     ref["relative_error"] if ref else ""])
    art.add_csv("psi_coefficients.csv", ["power", "taylor_coefficient", "derivative", "reference",
                                         "relative_error"], rows)
    roots = []
    for i, (r, x2) in enumerate(zip(result.roots, result.scaled_roots), start=1):
        roots.append([i, to_decimal(r.location), to_decimal(x2), to_decimal(mpmath.sqrt(i)),
                      to_decimal(abs(x2 / mpmath.sqrt(i) - 1)), to_decimal(r.derivative), r.simple])
    art.add_csv("roots.csv", ["index", "x", "x2", "expected_x2", "relative_deviation", "dI_dx", "simple"], roots)
    print(f"psi_{spec.k} Taylor coefficients about y2c = {_s(result.construction.y2c, 15)}:")
    for power, c in enumerate(result.psi.coefficients):
        print(f"  c{power} = {_s(c, 12)}")
    print(f"{result.n_simple_roots} simple roots at x2 = " + ", ".join(_s(x, 8) for x in result.scaled_roots))
    if golden is not None:
        print(f"reference coefficients: {'pass' if golden['passed'] else 'FAIL'} (rel tol {golden['rel_tol']})")
    return EXIT_OK


def cmd_tune_delta(args, art: Artifacts) -> int:
    spec = SynthesisSpec(args.k, _dec(args.bracket.split(":")[0]), _dec(args.upsilon), _regfun(args),
                         _system(args), args.order, args.convention)
    lo, hi = parse_pair(args.bracket)
    target = args.target if args.target is not None else args.k - 1
    res = tune_delta(spec, target, (lo, hi), args.digits)
    art.add_json("tune_delta.json", res.to_json())
    print(f"largest delta with {target} simple roots: {res.rounded(args.digits)} "
          f"(bracket [{_s(res.threshold, 8)}, {_s(res.upper, 8)}])")
    return EXIT_OK


def _rs(args):
    sys_, phi = _system(args), _regfun(args)
    return RegularizedSystem(sys_, phi, _dec(args.epsilon), _lam_tilde(args, sys_), args.arithmetic)


def cmd_simulate(args, art: Artifacts) -> int:
    rs = _rs(args)
    x0, y0 = _dec(args.x0), _dec(args.y0)
    z0 = (x0, y0) if args.chart == "original" else (x0, y0 / rs.epsilon ** 2)
    traj = integrate(rs, z0, _dec(args.tmax), float(_dec(args.tol)), args.chart)
    art.add("trajectory.csv", traj.to_csv())
    end = traj.final
    print(f"{len(traj.times)} steps, final state t = {float(traj.times[-1]):.6g}, "
          f"x = {float(end[0]):.10g}, {'y' if args.chart == 'original' else 'y2'} = {float(end[1]):.10g}")
    return EXIT_OK


def cmd_diffmap(args, art: Artifacts) -> int:
    rs = _rs(args)
    samples, skipped = [], []
    for y in parse_grid(args.grid):
        try:
            samples.append(difference_map(rs, y, float(_dec(args.tol))))
        except NoReturnError as exc:
            skipped.append({"y": to_decimal(y), "reason": str(exc)})
    art.add("diffmap.csv", difference_map_csv(samples))
    art.checks["diffmap_skipped"] = skipped
    for s in samples:
        print(f"y = {s.y:.6g}: Delta- = {s.delta_minus:.12g}, Delta+ = {s.delta_plus:.12g}, Delta = {s.delta:.6g}")
    if not samples:
        raise NoReturnError("no grid point produced both transitions")
    return EXIT_OK


def cmd_tune_lambda(args, art: Artifacts) -> int:
    rs = _rs(args)
    lo, hi = parse_pair(args.bracket)
    res = tune_lambda(rs, _dec(args.y_ref), (float(lo), float(hi)), args.scan, float(_dec(args.tol)))
    art.add_json("tune_lambda.json", res.to_json())
    print(f"lam_tilde_c = {res.lam_tilde:.12g}, lambda_c = {res.lam:.12g} (residual {res.residual:.3g})")
    return EXIT_OK


def cmd_cycles(args, art: Artifacts) -> int:
    rs = _rs(args)
    seeds = [float(v) for v in parse_grid(args.grid)]
    search = find_limit_cycles(rs, (min(seeds), max(seeds)) if len(seeds) > 1 else (seeds[0] - 1, seeds[0]),
                               seeds=seeds, tol=float(_dec(args.tol)))
    art.add("cycles.json", cycle_report_json(search, rs) + "\n")
    for c in search.cycles:
        fd = "n/a" if c.multiplier_difference is None else f"{c.multiplier_difference:.6g}"
        print(f"cycle through (0, {c.y:.10g}): period {c.period:.6g}, multiplier {c.multiplier_divergence:.6g} "
              f"(variational {c.multiplier_variational:.6g}, difference {fd})")
    for seed, why in search.skipped:
        print(f"seed {seed:.6g} skipped: {why}")
    return EXIT_OK


def cmd_plotdata(args, art: Artifacts) -> int:
    src = Path(args.source)
    path = src / "synth.json" if src.is_dir() else src
    if not path.exists():
        raise ConfigError(f"no synthesis result found at {path}")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
        phi_k = regfun_from_json(data["phi_k"])
        series = [big(c) for c in data["I_series"]]
        k, delta = int(data["spec"]["k"]), big(data["spec"]["delta"])
    except (KeyError, ValueError, json.JSONDecodeError) as exc:
        raise ConfigError(f"malformed synthesis result {path}: {exc}") from exc
    if not isinstance(phi_k, BlendedRegularization):
        raise ConfigError("plot data needs a blended regularization function")
    base, psi = phi_k.base, phi_k.psi
    n = args.points

    def rows_over(lo, hi):
        out = []
        for j in range(n):
            y = lo + (hi - lo) * j / (n - 1)
            out.append([to_decimal(y), to_decimal(base.value(y)), to_decimal(psi.value(y)),
                        to_decimal(phi_k.value(y))])
        return out

    header = ["y2", "phi", "psi", "phi_k"]
    art.add_csv("phi_k.csv", header, rows_over(mpf(-2), mpf(3)))
    c, u = phi_k.center, phi_k.upsilon
    art.add_csv("phi_k_zoom.csv", header, rows_over(c - u, c + u))
    top = max(mpf(3), mpmath.sqrt(k - 1) + mpf("0.5"))
    odd = [series[2 * j + 1] * delta ** (2 * j - 2 * k) for j in range(1, (len(series) - 1) // 2 + 1)]
    rows = []
    for j in range(n):
        x2 = top * j / (n - 1)
        val = mpmath.fsum(cj * x2 ** (2 * i) for i, cj in enumerate(odd))
        rows.append([to_decimal(x2), to_decimal(val), to_decimal(val * x2 ** 3 * delta ** (2 * k + 1))])
    art.add_csv("I2.csv", ["x2", "I2", "I"], rows)
    print(f"plot bundles for k = {k}: phi_k.csv, phi_k_zoom.csv, I2.csv ({n} points each)")
    return EXIT_OK


COMMANDS = {
    "classify": cmd_classify,
    "audit": cmd_audit,
    "sdi": cmd_sdi,
    "synth": cmd_synth,
    "tune-delta": cmd_tune_delta,
    "simulate": cmd_simulate,
    "diffmap": cmd_diffmap,
    "tune-lambda": cmd_tune_lambda,
    "cycles": cmd_cycles,
    "plotdata": cmd_plotdata,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--system", help="system JSON file (default: built-in quadratic-linear two-fold)")
    common.add_argument("--regfun", default="arctan", help="regularization JSON file or 'arctan'")
    common.add_argument("--precision", type=int, default=None, help="decimal digits of working precision")
    common.add_argument("--order", type=int, default=25, help="series truncation order")
    common.add_argument("--tol", default="1e-10", help="integration or quadrature tolerance")
    common.add_argument("--out", default=None, help="output directory")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="canard", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"canard {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", parents=[common], help="classify a point of the switching line")
    p.add_argument("--x", default="0")
    p.add_argument("--lambda", dest="lam", default=None)

    p = sub.add_parser("audit", parents=[common], help="audit the hypotheses on the system")

    p = sub.add_parser("sdi", parents=[common], help="tabulate the slow divergence integral")
    p.add_argument("--grid", default="0:0.5:51")
    p.add_argument("--method", choices=("series", "quadrature"), default="quadrature")

    for name in ("synth", "tune-delta"):
        p = sub.add_parser(name, parents=[common], help="synthesize a regularization function" if name == "synth"
                           else "largest delta keeping a given number of roots")
        p.add_argument("--k", type=int, required=True)
        p.add_argument("--upsilon", default="0.05")
        p.add_argument("--convention", choices=("unperturbed", "literal"), default="unperturbed")
        if name == "synth":
            p.add_argument("--delta", required=True)
        else:
            p.add_argument("--target", type=int, default=None, help="root count (default k - 1)")
            p.add_argument("--bracket", default="1e-5:1e-3")
            p.add_argument("--digits", type=int, default=3)

    for name, helptext in (("simulate", "integrate the regularized system"),
                           ("diffmap", "difference map on a grid of section points"),
                           ("tune-lambda", "breaking parameter of the canard connection"),
                           ("cycles", "limit cycles by Newton on the return map")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--epsilon", required=True)
        p.add_argument("--lambda", dest="lam", default=None, help="unfolding parameter (default lambda0)")
        p.add_argument("--arithmetic", choices=("float", "mp"), default="float")
        if name == "simulate":
            p.add_argument("--x0", required=True)
            p.add_argument("--y0", required=True, help="initial y in the original chart")
            p.add_argument("--tmax", required=True)
            p.add_argument("--chart", choices=("scaled", "original"), default="scaled")
        elif name == "diffmap":
            p.add_argument("--grid", default="-0.25:-0.04:8")
        elif name == "tune-lambda":
            p.add_argument("--y-ref", dest="y_ref", default="-0.04")
            p.add_argument("--bracket", default="-0.5:0.5")
            p.add_argument("--scan", type=int, default=21)
        else:
            p.add_argument("--grid", default="-0.3:-0.02:8", help="Newton seeds on the section")

    p = sub.add_parser("plotdata", parents=[common], help="plot-ready CSV bundles from a synth result")
    p.add_argument("--from", dest="source", required=True, help="synth output directory or synth.json")
    p.add_argument("--points", type=int, default=401)
    return parser


def _precision(args) -> int:
    if args.precision is not None:
        return args.precision
    env = os.environ.get("CANARD_PRECISION")
    return int(env) if env else DEFAULT_PRECISION


def _config(args) -> dict:
    """Parameters that determine the outputs; the output location is excluded."""
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("verbose", "out")}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    art = Artifacts(args.out)
    try:
        digits = _precision(args)
        if digits < 15:
            raise ConfigError("precision must be at least 15 decimal digits")
        if args.order < 1:
            raise ConfigError("series order must be positive")
        with working_precision(digits):
            config = _config(args)
            config["precision"] = digits
            try:
                status = COMMANDS[args.command](args, art)
            except AuditFailure:
                art.commit(config)
                raise
            art.commit(config)
            return status
    except AuditFailure as exc:
        print(f"audit failure: {exc}", file=sys.stderr)
        return EXIT_AUDIT
    except SynthesisError as exc:
        print(f"synthesis failure ({exc.reason}): {exc}", file=sys.stderr)
        if exc.result is not None:
            print(json.dumps({"diagnostics": exc.result.to_json()["diagnostics"]}, indent=2), file=sys.stderr)
        return EXIT_AUDIT if exc.reason == "upsilon too large" else EXIT_NUMERICAL
    except (ConfigError, OSError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CanardError as exc:
        code = EXIT_CONFIG if isinstance(exc, ValueError) else EXIT_NUMERICAL
        print(f"{'configuration' if code == EXIT_CONFIG else 'numerical'} error: {exc}", file=sys.stderr)
        return code
    except (ArithmeticError, mpmath.libmp.NoConvergence) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    raise SystemExit(main())
