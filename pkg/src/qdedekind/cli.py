"""Command-line front end.

Exit codes: 0 all checks pass, 1 a mathematical check failed, 2 bad input,
3 I/O error.
"""

from __future__ import annotations

import argparse
import cmath
import csv
import io
import json
import math
import os
import random
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from . import dedekind as dk
from . import qseries as qs
from . import tqft
from .periodic import PeriodicMap, random_map

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_IO = 0, 1, 2, 3
THREADS_ENV = "QDEDEKIND_THREADS"


class InputError(Exception):
    pass


def _default_threads() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _fmt(v) -> str:
    return f"{float(v):.12g}"


def _fraction_str(v: Fraction) -> str:
    return f"{v.numerator}/{v.denominator}"


def _emit(args, report: dict, lines: list[str]) -> None:
    if args.json:
        print(json.dumps(report, indent=2, default=str))
    else:
        for line in lines:
            print(line)


# ---------------------------------------------------------------------------
# sigma2 / dedekind


def cmd_sigma2(args) -> int:
    try:
        arg = tqft.TQFTArgument.from_pair(args.r, args.p)
    except tqft.DomainError as exc:
        raise InputError(str(exc)) from exc
    extended = args.precision == "extended"
    method = args.method
    if method == "exact":
        value = tqft.sigma2_exact(arg)
        text = str(value)
    elif method == "trig":
        value = tqft.sigma2_trig(arg)
        text = _fmt(value)
    elif method == "cot3":
        value = tqft.sigma2_cot3(arg, extended=True if extended else None)
        text = _fmt(value)
    else:
        value = qs.radial_limit_sigma2(arg.x)
        text = f"{value:.9f}"
    report = {"r": args.r, "p": args.p, "method": method, "value": value}
    lines = [text]
    if args.verbose:
        s0 = dk.s_odd_exact(0, arg.x)
        s2 = dk.s_odd_exact(2, arg.x)
        report.update({"S0": _fraction_str(s0), "S2": _fraction_str(s2)})
        lines.append(f"S_0^odd = {_fraction_str(s0)}")
        lines.append(f"S_2^odd = {_fraction_str(s2)}")
        lines.append(f"p^2 S_2 - 2 S_0 = {_fraction_str(arg.p**2 * s2 - 2 * s0)}")
    _emit(args, report, lines)
    return EXIT_OK


def cmd_dedekind(args) -> int:
    if args.g < 0 or args.g % 2:
        raise InputError(f"g must be an even non-negative integer, got {args.g}")
    if args.p <= 0:
        raise InputError("p must be positive")
    x = Fraction(args.r, args.p)
    if args.float:
        value = dk.s_odd_float(args.g, x, extended=args.precision == "extended")
        text = _fmt(value)
    else:
        value = dk.s_odd_exact(args.g, x)
        text = str(value)
    _emit(args, {"g": args.g, "x": str(x), "value": str(value)}, [text])
    return EXIT_OK


# ---------------------------------------------------------------------------
# verification suites


def _verify_main_theorem(args) -> tuple[bool, dict, list[str]]:
    rep = tqft.verify_main_theorem(args.pmax, threads=args.threads)
    report = {
        "suite": "main-theorem",
        "p_max": args.pmax,
        "passed": rep.passed,
        "failed": len(rep.failures),
        "failures": rep.failures,
        "seconds": round(rep.seconds, 3),
    }
    lines = [f"main theorem up to p={args.pmax}: {rep.passed} passed, {len(rep.failures)} failed ({rep.seconds:.2f}s)"]
    lines += [f"  FAIL r={f['r']} p={f['p']}: {f['difference']} != {f['expected']}" for f in rep.failures]
    return rep.ok, report, lines


def _load_map(path: str) -> PeriodicMap:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        return PeriodicMap.from_json(text)
    except (ValueError, json.JSONDecodeError) as exc:
        raise InputError(f"{path}: {exc}") from exc


def _spec_from_args(args) -> dk.EisensteinSpec:
    if args.g is not None:
        if args.g < 0 or args.g % 2:
            raise InputError("g must be an even non-negative integer")
        return dk.odd_spec(args.g + 2)
    if getattr(args, "chi", None) and getattr(args, "psi", None):
        chi, psi = _load_map(args.chi), _load_map(args.psi)
        if chi.modulus != psi.modulus:
            raise InputError("chi and psi need the same modulus")
        return dk.EisensteinSpec(args.k, chi.modulus, chi, psi, 1)
    rng = random.Random(args.seed)
    return dk.EisensteinSpec(args.k, args.N, random_map(args.N, rng), random_map(args.N, rng), 1)


def _reciprocity_points(pmax: int):
    for p in range(1, pmax + 1):
        for r in range(-p + 1, p):
            if math.gcd(r, p) == 1:
                yield Fraction(r, p)


def _verify_reciprocity(args) -> tuple[bool, dict, list[str]]:
    spec = _spec_from_args(args)
    if args.gamma:
        try:
            gammas = [dk.GammaMatrix.parse(args.gamma)]
        except ValueError as exc:
            raise InputError(str(exc)) from exc
    else:
        gammas = dk.word_ball(dk.gammaN_generators(spec.level), args.radius)
    for g in gammas:
        if not g.in_gamma(spec.level):
            raise InputError(f"{g.as_tuple()} is not in Gamma({spec.level})")
    tol = args.tolerance if args.tolerance is not None else 1e-6
    worst = 0.0
    failures = []
    checked = 0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", dk.ExperimentalWarning)
        for g in gammas:
            for x in _reciprocity_points(args.pmax):
                if g.c * x + g.d == 0:
                    continue
                d = dk.reciprocity_defect(spec, g, x)
                checked += 1
                bad = d != 0 if spec.exact else abs(d) > tol
                worst = max(worst, abs(complex(d)))
                if bad:
                    failures.append({"gamma": g.as_tuple(), "x": str(x), "defect": str(d)})
    report = {
        "suite": "reciprocity",
        "weight": spec.weight,
        "level": spec.level,
        "exact": spec.exact,
        "checked": checked,
        "max_defect": worst,
        "failures": failures[:20],
        "failed": len(failures),
    }
    mode = "exact" if spec.exact else f"tol {tol:g}"
    lines = [f"reciprocity k={spec.weight} N={spec.level} ({mode}): {checked} cases, {len(failures)} failed, max |defect| {worst:.3g}"]
    return not failures, report, lines


def _verify_lfunc(args) -> tuple[bool, dict, list[str]]:
    spec = _spec_from_args(args)
    tol = args.tolerance if args.tolerance is not None else 1e-9
    rng = random.Random(args.seed)
    xs = [Fraction(rng.randrange(-20, 21), rng.randrange(1, 12)) for _ in range(args.samples)]
    failures = []
    compared = 0
    eps, eps2 = spec.parity()
    for j in range(1, spec.weight):
        for x in xs:
            ref = dk.lhat_value(spec, j, x)
            cands = {"double": dk.lhat_double_sum(spec, j, x)}
            if eps is not None and eps2 is not None and eps * eps2 == (-1) ** (j - 1):
                cands["cot"] = dk.lhat_cot(spec, j, x)
            for name, val in cands.items():
                compared += 1
                if not dk.is_close(val, ref, tol):
                    failures.append({"j": j, "x": str(x), "route": name, "bernoulli": str(ref), "other": str(val)})
    report = {"suite": "lfunc", "weight": spec.weight, "level": spec.level, "compared": compared, "failures": failures[:20], "failed": len(failures)}
    lines = [f"L-value routes k={spec.weight} N={spec.level}: {compared} comparisons, {len(failures)} failed"]
    return not failures, report, lines


THETA_GRID = (0.1 + 0.5j, 1j, -0.3 + 0.4j, 0.25 + 0.3j, 0.7 + 1.1j)


def _verify_theta(args) -> tuple[bool, dict, list[str]]:
    tol = args.tolerance if args.tolerance is not None else 1e-10
    residuals = {}
    gamma = dk.GammaMatrix(1, 0, 2, 1)
    r_shift = r_inv = r_log = r_e0 = r_e2 = 0.0
    for tau in THETA_GRID:
        r_shift = max(r_shift, abs(qs.theta(2, tau + 1) - cmath.exp(0.25j * math.pi) * qs.theta(2, tau)))
        r_inv = max(r_inv, abs(qs.theta(3, -1 / tau) - cmath.sqrt(tau / 1j) * qs.theta(3, tau)))
        r_log = max(r_log, abs(qs.odd_eichler(0, tau) - 0.25 * cmath.log(qs.theta(3, tau) / qs.theta(4, tau))))
        gt = gamma.act(tau)
        r_e0 = max(r_e0, abs(qs.odd_eichler(0, gt) - qs.odd_eichler(0, tau) - math.pi * 1j / 8))
        lhs = (2 * tau + 1) ** 2 * qs.odd_eichler(2, gt) - qs.odd_eichler(2, tau)
        r_e2 = max(r_e2, abs(lhs + (math.pi * 1j) ** 3 * (2 * tau**2 + 2 * tau + 1) / 32))
    residuals = {
        "theta2_shift": r_shift,
        "theta3_inversion": r_inv,
        "E0_log_theta": r_log,
        "E0_transform": r_e0,
        "E2_transform": r_e2,
    }
    ok = all(v < tol for v in residuals.values())
    lines = [f"{name}: {val:.3g}" for name, val in residuals.items()]
    return ok, {"suite": "theta", "tolerance": tol, "residuals": residuals}, lines


ASYMPTOTIC_POINTS = ((1, 3), (1, 5), (3, 5), (5, 7))


def _verify_asymptotic(args) -> tuple[bool, dict, list[str]]:
    tol = args.tolerance if args.tolerance is not None else 1e-4
    rows = []
    ok = True
    lines = []
    for r, p in ASYMPTOTIC_POINTS:
        x = Fraction(r, p)
        for g in (0, 2):
            rep = qs.asymptotic_check(g, x)
            good = rep.deviation < tol and rep.residual_shrinks()
            ok &= good
            rows.append({"g": g, "x": str(x), "deviation": rep.deviation, "residual": rep.residual, "refined_residual": rep.refined_residual})
            lines.append(f"g={g} x={x}: deviation {rep.deviation:.3g}, residual {rep.residual:.3g} -> {rep.refined_residual:.3g} {'ok' if good else 'FAIL'}")
        limit = qs.radial_limit_sigma2(x)
        exact = tqft.sigma2_exact(x)
        good = abs(limit - exact) < 1e-3
        ok &= good
        rows.append({"x": str(x), "radial_limit": limit, "sigma2": exact})
        lines.append(f"sigma_2({x}) radial {limit:.6f} vs exact {exact} {'ok' if good else 'FAIL'}")
    return ok, {"suite": "asymptotic", "tolerance": tol, "rows": rows}, lines


def _verify_trig(args) -> tuple[bool, dict, list[str]]:
    rel = args.tolerance if args.tolerance is not None else 1e-8
    failures = []
    count = 0
    for p in range(3, args.pmax + 1, 2):
        for r in range(1, p):
            if math.gcd(r, p) != 1:
                continue
            rep = tqft.trig_identity_checks(p, Fraction(r, p), rel_tol=rel)
            count += 1
            if not rep.ok:
                failures.append({"p": p, "r": r, "sin_sum": rep.sin_sum, "cos_sum": rep.cos_sum})
    lines = [f"trig identities up to p={args.pmax}: {count} cases, {len(failures)} failed"]
    return not failures, {"suite": "trig-identities", "checked": count, "failures": failures[:20], "failed": len(failures)}, lines


SUITES = {
    "main-theorem": _verify_main_theorem,
    "reciprocity": _verify_reciprocity,
    "lfunc": _verify_lfunc,
    "theta": _verify_theta,
    "asymptotic": _verify_asymptotic,
    "trig-identities": _verify_trig,
}


def cmd_verify(args) -> int:
    ok, report, lines = SUITES[args.suite](args)
    report["ok"] = ok
    _emit(args, report, lines)
    return EXIT_OK if ok else EXIT_FAIL


# ---------------------------------------------------------------------------
# sweep


def sweep_points(p_max: int):
    """Odd coprime (r, p) with -2 < r/p < 2, p odd <= p_max, sorted by p then r."""
    for p in range(1, p_max + 1, 2):
        for r in range(-2 * p + 1, 2 * p, 2):
            if math.gcd(r, p) == 1:
                yield r, p


def _smooth_part(g: int, x: Fraction) -> Fraction:
    return Fraction(1, 2) if g == 0 else 2 * x * x + 2 * x + 1


def sweep_row(task: tuple[int, int, int, str]):
    g, r, p, transform = task
    x = Fraction(r, p)
    value = dk.s_odd_exact(g, x)
    if transform != "none":
        den = 2 * x + 1
        value = den**g * dk.s_odd_exact(g, x / den) - value
        if transform == "qm-defect-corrected":
            a0x = dk.cusp_constant(dk.odd_spec(g + 2), x)
            sign = -1 if (g // 2) % 2 else 1
            value -= sign * 2 ** (g + 3) * a0x / (p ** (g + 1) * (2 * r + p))
    return r, p, value


def cmd_sweep(args) -> int:
    if args.g not in (0, 2):
        raise InputError("sweep supports g in {0, 2}")
    if args.pmax < 3:
        raise InputError("pmax must be at least 3")
    tasks = [(args.g, r, p, args.transform) for r, p in sweep_points(args.pmax)]
    if args.threads > 1:
        with ProcessPoolExecutor(max_workers=args.threads) as pool:
            rows = list(pool.map(sweep_row, tasks, chunksize=64))
    else:
        rows = [sweep_row(t) for t in tasks]
    rows.sort(key=lambda t: (t[1], t[0]))
    failures = 0
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["r", "p", "x", "value", "exact"])
    for r, p, value in rows:
        x = Fraction(r, p)
        if args.transform == "qm-defect-corrected" and value != _smooth_part(args.g, x):
            failures += 1
        writer.writerow([r, p, _fmt(x), _fmt(value), _fraction_str(value)])
    text = buf.getvalue()
    if args.out and args.out != "-":
        try:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
            return EXIT_IO
        if args.json:
            print(json.dumps({"rows": len(rows), "out": args.out, "smooth_mismatches": failures}))
    else:
        sys.stdout.write(text)
    return EXIT_FAIL if failures else EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision", choices=["double", "extended"], default=argparse.SUPPRESS)
    common.add_argument("--tolerance", type=float, default=argparse.SUPPRESS)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(prog="qdedekind", description="Generalized Dedekind sums and the genus-2 signature.", parents=[common])
    sub = parser.add_subparsers(dest="command", required=True)

    p_sig = sub.add_parser("sigma2", parents=[common], help="sigma_2(r/p)")
    p_sig.add_argument("--r", type=int, required=True)
    p_sig.add_argument("--p", type=int, required=True)
    p_sig.add_argument("--method", choices=["exact", "trig", "cot3", "radial"], default="exact")
    p_sig.add_argument("--verbose", action="store_true")
    p_sig.set_defaults(func=cmd_sigma2)

    p_ded = sub.add_parser("dedekind", parents=[common], help="S_g^odd(r/p)")
    p_ded.add_argument("--g", type=int, required=True)
    p_ded.add_argument("--r", type=int, required=True)
    p_ded.add_argument("--p", type=int, required=True)
    mode = p_ded.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true", default=True)
    mode.add_argument("--float", action="store_true")
    p_ded.set_defaults(func=cmd_dedekind)

    p_ver = sub.add_parser("verify", parents=[common], help="run a verification suite")
    p_ver.add_argument("suite", choices=sorted(SUITES))
    p_ver.add_argument("--pmax", type=int, default=None)
    p_ver.add_argument("--g", type=int, default=None, help="odd family of weight g+2")
    p_ver.add_argument("--k", type=int, default=3)
    p_ver.add_argument("--N", type=int, default=3)
    p_ver.add_argument("--seed", type=int, default=0)
    p_ver.add_argument("--gamma", default=None, help="matrix as a,b,c,d")
    p_ver.add_argument("--radius", type=int, default=2)
    p_ver.add_argument("--samples", type=int, default=5)
    p_ver.add_argument("--chi", default=None, help="PeriodicMap JSON file")
    p_ver.add_argument("--psi", default=None, help="PeriodicMap JSON file")
    p_ver.set_defaults(func=cmd_verify)

    p_sw = sub.add_parser("sweep", parents=[common], help="CSV of S_g^odd over odd pairs")
    p_sw.add_argument("--g", type=int, required=True)
    p_sw.add_argument("--pmax", type=int, required=True)
    p_sw.add_argument("--transform", choices=["none", "qm-defect", "qm-defect-corrected"], default="none")
    p_sw.add_argument("--out", default="-")
    p_sw.set_defaults(func=cmd_sweep)
    return parser


_PMAX_DEFAULTS = {"main-theorem": 99, "reciprocity": 15, "trig-identities": 199}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    args.precision = getattr(args, "precision", "double")
    args.tolerance = getattr(args, "tolerance", None)
    args.json = getattr(args, "json", False)
    args.threads = getattr(args, "threads", None) or _default_threads()
    if args.threads < 1:
        print("error: --threads must be positive", file=sys.stderr)
        return EXIT_INPUT
    if args.command == "verify" and args.pmax is None:
        args.pmax = _PMAX_DEFAULTS.get(args.suite, 15)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
