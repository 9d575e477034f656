"""Command line interface.

Subcommands: norm, cube, phase-check, inverse-search, cocycle, heisenberg,
selftest.  Artifacts are deterministic: JSON with sorted keys and floats
rounded to 12 significant digits, CSV with a fixed column order.  Exit
codes: 0 success, 2 contract violation, 3 capacity exceeded, 64 usage.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

import numpy as np

from . import __version__
from ._backend import BACKEND
from .cubes import cube_space
from .dynamics import (CoboundaryWitness, CocycleTable, FiberGroup, FiniteSystem,
                       is_cocycle, solve_coboundary, translation_system)
from .errors import CapacityError, ContractError, GowersError
from .functions import ExponentFunction, GroupFunction, random_unit_function
from .group import get_space
from .heisenberg import (HeisenbergSystem, action_homomorphism_audit,
                         certify_phase_polynomial, well_definedness_audit)
from .norms import gowers_norm_direct, gowers_norm_fast
from .phasepoly import degree_test, empirical_correlation_rows, inverse_search

USAGE_EXIT = 64


def round_sig(value: float) -> float:
    """Round to 12 significant digits for byte-stable artifacts."""
    if value != value:  # NaN
        return value
    return float("%.12g" % value)


def canonical(obj):
    """Recursively normalize floats so json.dumps output is reproducible."""
    if isinstance(obj, dict):
        return {k: canonical(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [canonical(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        return round_sig(float(obj))
    if isinstance(obj, (np.integer,)):
        return int(obj)
    return obj


def dump_json(obj) -> str:
    return json.dumps(canonical(obj), sort_keys=True, indent=2) + "\n"


def emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


class Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 64, not argparse's default 2
        self.print_usage(sys.stderr)
        self.exit(USAGE_EXIT, "%s: error: %s\n" % (self.prog, message))


def load_function(path: str) -> GroupFunction:
    with open(path) as fh:
        return GroupFunction.from_json(fh.read())


def load_phase(path: str):
    """Load either an exact exponent table or a complex value table."""
    with open(path) as fh:
        text = fh.read()
    if '"exponents"' in text:
        return ExponentFunction.from_json(text)
    return GroupFunction.from_json(text)


def parse_window(text: str, p: int, m: int) -> dict[int, int]:
    """Comma-separated coefficients of t^{-1}, t^{-2}, ..., t^{-m}."""
    parts = [s.strip() for s in text.split(",")]
    if len(parts) > m:
        raise ContractError("expected at most %d coefficients, got %d" % (m, len(parts)))
    return {-(j + 1): int(v) % p for j, v in enumerate(parts)}


def cmd_norm(args) -> int:
    f = load_function(args.function)
    reports = {}
    if args.method in ("direct", "both"):
        reports["direct"] = gowers_norm_direct(f, args.k, args.budget)
    if args.method in ("fast", "both"):
        reports["fast"] = gowers_norm_fast(f, args.k, args.budget)
    payload = {
        name: {"k": r.k, "value": r.value, "method": r.method,
               "term_count": r.term_count, "warning": r.warning}
        for name, r in reports.items()
    }
    emit(dump_json(payload), args.out)
    return 0


def cmd_cube(args) -> int:
    if args.system:
        with open(args.system) as fh:
            system = FiniteSystem.from_json(fh.read())
    else:
        p, n = (int(v) for v in args.translation.split(","))
        system = translation_system(p, n)
    measure = cube_space(system, args.k, args.budget)
    payload = {
        "k": args.k,
        "support_size": int(measure.support.shape[0]),
        "orbit_count": int(measure.orbit_labels.max()) + 1,
        "weight_sum": float(measure.weights.sum()),
        "support": [[int(v) for v in row] for row in measure.support],
        "weights": [float(w) for w in measure.weights],
    }
    emit(dump_json(payload), args.out)
    return 0


def cmd_phase_check(args) -> int:
    phi = load_phase(args.function)
    cert = degree_test(phi, args.kmax, tolerance=args.tolerance)
    payload = {
        "degree": cert.degree,
        "k_max": cert.k_max,
        "exact": isinstance(phi, ExponentFunction),
        "is_phase_polynomial": cert.degree is not None,
    }
    emit(dump_json(payload), args.out)
    return 0


def cmd_inverse_search(args) -> int:
    f = load_function(args.function)
    result = inverse_search(f, args.k, budget=args.budget,
                            unsafe_low_char=args.unsafe_low_char, threads=args.threads)
    norm = gowers_norm_fast(f, args.k, args.budget)
    payload = {
        "k": args.k,
        "m": result.m,
        "correlation": result.correlation,
        "norm": norm.value,
        "searched": result.searched,
        "best_exponents": [int(e) for e in result.exponents],
    }
    emit(dump_json(payload), args.out)
    return 0


def cmd_cocycle(args) -> int:
    with open(args.table) as fh:
        payload = json.load(fh)
    try:
        system = FiniteSystem.from_json(json.dumps(payload["system"]))
        fb = payload["fiber"]
        fiber = FiberGroup(int(fb["p"]), int(fb["m"]), int(fb.get("L", 1)))
        rho = CocycleTable(system, fiber, np.asarray(payload["exponents"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ContractError("malformed cocycle JSON: %s" % exc)
    ok, violation = is_cocycle(rho)
    out = {"is_cocycle": ok}
    if violation is not None:
        out["violation"] = {"g": violation.g, "g_prime": violation.g_prime,
                            "x": violation.x, "lhs": list(violation.lhs),
                            "rhs": list(violation.rhs)}
    if args.solve:
        result = solve_coboundary(rho, require_cocycle=False)
        if isinstance(result, CoboundaryWitness):
            out["coboundary"] = True
            out["antiderivative"] = [[int(v) for v in row] for row in result.exponents]
        else:
            out["coboundary"] = False
            out["obstruction"] = {"g": result.g, "x": result.x,
                                  "defect": list(result.defect),
                                  "tree_edges": [list(e) for e in result.tree_edges]}
    emit(dump_json(out), args.out)
    return 0


def cmd_heisenberg(args) -> int:
    system = HeisenbergSystem(
        args.p, args.m,
        parse_window(args.alpha, args.p, args.m),
        parse_window(args.beta, args.p, args.m),
        parse_window(args.gamma, args.p, args.m),
        args.dg,
    )
    cert = certify_phase_polynomial(system)
    f = system.induced_function()
    rng = np.random.default_rng(args.seed)
    payload = {
        "p": args.p, "m": args.m, "d_g": args.dg,
        "third_differences_vanish": cert.all_vanish,
        "cases": cert.cases,
        "truncation_seen": cert.truncation_seen,
        "well_defined": well_definedness_audit(system, rng),
        "action_homomorphism": action_homomorphism_audit(system),
        "u3_norm": gowers_norm_fast(f, 3, args.budget).value,
        "u2_norm": gowers_norm_fast(f, 2, args.budget).value,
    }
    emit(dump_json(payload), args.out)
    return 0


def cmd_selftest(args) -> int:
    """Scripted deterministic suite writing artifacts to --out."""
    os.makedirs(args.out, exist_ok=True)
    rng = np.random.default_rng(args.seed)

    norm_payload = {}
    for p, n, k in [(2, 2, 2), (2, 3, 3), (3, 2, 2), (3, 2, 3)]:
        f = random_unit_function(get_space(p, n), rng)
        direct = gowers_norm_direct(f, k)
        fast = gowers_norm_fast(f, k)
        norm_payload["p%d_n%d_k%d" % (p, n, k)] = {
            "direct": direct.value, "fast": fast.value,
            "gap": abs(direct.value - fast.value),
        }
    with open(os.path.join(args.out, "norms.json"), "w") as fh:
        fh.write(dump_json(norm_payload))

    f = random_unit_function(get_space(3, 2), rng)
    res = inverse_search(f, 2, threads=args.threads)
    inv_payload = {
        "correlation": res.correlation,
        "norm_squared": gowers_norm_fast(f, 2).value ** 2,
        "searched": res.searched,
        "best_exponents": [int(e) for e in res.exponents],
    }
    with open(os.path.join(args.out, "inverse.json"), "w") as fh:
        fh.write(dump_json(inv_payload))

    deltas = [0.3, 0.4, 0.5]
    rows = empirical_correlation_rows(2, 2, 2, deltas, 30, args.seed, args.threads)
    rows += empirical_correlation_rows(3, 2, 3, deltas, 30, args.seed, args.threads)
    write_empirical_csv(os.path.join(args.out, "empirical_c.csv"), rows)

    measure = cube_space(translation_system(2, 2), 2)
    cube_payload = {
        "support_size": int(measure.support.shape[0]),
        "weight_sum": float(measure.weights.sum()),
        "orbit_count": int(measure.orbit_labels.max()) + 1,
    }
    with open(os.path.join(args.out, "cube.json"), "w") as fh:
        fh.write(dump_json(cube_payload))

    sysH = HeisenbergSystem(3, 2, {-1: 1, -2: 1}, {-1: 2}, {-2: 1}, 2)
    cert = certify_phase_polynomial(sysH)
    heis_payload = {
        "third_differences_vanish": cert.all_vanish,
        "cases": cert.cases,
        "u3_norm": gowers_norm_fast(sysH.induced_function(), 3).value,
    }
    with open(os.path.join(args.out, "heisenberg.json"), "w") as fh:
        fh.write(dump_json(heis_payload))

    sys.stdout.write("selftest artifacts written to %s (backend: %s)\n"
                     % (args.out, BACKEND))
    return 0


def write_empirical_csv(path: str, rows: list[dict]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["p", "n", "k", "delta", "min_correlation", "trials"])
    for row in rows:
        writer.writerow([row["p"], row["n"], row["k"], "%.12g" % row["delta"],
                         "%.12g" % row["min_correlation"], row["trials"]])
    with open(path, "w") as fh:
        fh.write(buf.getvalue())


def build_parser() -> Parser:
    parser = Parser(prog="gowers", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--budget", type=int, default=None,
                        help="term budget (also via GOWERS_BUDGET)")
        sp.add_argument("--out", default=None, help="write the artifact to this path")

    sp = sub.add_parser("norm", help="Gowers U^k norm of a function table")
    sp.add_argument("--function", required=True, help="function JSON path")
    sp.add_argument("-k", type=int, required=True)
    sp.add_argument("--method", choices=["direct", "fast", "both"], default="both")
    common(sp)
    sp.set_defaults(func=cmd_norm)

    sp = sub.add_parser("cube", help="cube measure of a finite system")
    group = sp.add_mutually_exclusive_group(required=True)
    group.add_argument("--system", help="system JSON path")
    group.add_argument("--translation", help="p,n for the translation system")
    sp.add_argument("-k", type=int, required=True)
    common(sp)
    sp.set_defaults(func=cmd_cube)

    sp = sub.add_parser("phase-check", help="certified phase-polynomial degree")
    sp.add_argument("--function", required=True,
                    help="function JSON (complex values or exact exponents)")
    sp.add_argument("--kmax", type=int, default=6)
    sp.add_argument("--tolerance", type=float, default=1e-9)
    common(sp)
    sp.set_defaults(func=cmd_phase_check)

    sp = sub.add_parser("inverse-search", help="best phase-polynomial correlation")
    sp.add_argument("--function", required=True)
    sp.add_argument("-k", type=int, required=True)
    sp.add_argument("--unsafe-low-char", action="store_true",
                    help="search even when k > p (no correlation guaranteed)")
    sp.add_argument("--threads", type=int, default=1)
    common(sp)
    sp.set_defaults(func=cmd_inverse_search)

    sp = sub.add_parser("cocycle", help="cocycle check / coboundary solve")
    sp.add_argument("--table", required=True, help="cocycle JSON path")
    sp.add_argument("--solve", action="store_true")
    common(sp)
    sp.set_defaults(func=cmd_cocycle)

    sp = sub.add_parser("heisenberg", help="finite Heisenberg window certification")
    sp.add_argument("--p", type=int, default=3)
    sp.add_argument("--m", type=int, default=2)
    sp.add_argument("--dg", type=int, default=2)
    sp.add_argument("--alpha", default="1,1")
    sp.add_argument("--beta", default="2,0")
    sp.add_argument("--gamma", default="0,1")
    sp.add_argument("--seed", type=int, default=0)
    common(sp)
    sp.set_defaults(func=cmd_heisenberg)

    sp = sub.add_parser("selftest", help="deterministic scripted suite")
    sp.add_argument("--seed", type=int, default=7)
    sp.add_argument("--threads", type=int, default=1)
    sp.add_argument("--out", default="gowers-selftest")
    sp.set_defaults(func=cmd_selftest)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ContractError as exc:
        sys.stderr.write("contract error: %s\n" % exc)
        return 2
    except CapacityError as exc:
        sys.stderr.write("capacity error: %s\n" % exc)
        return 3
    except GowersError as exc:  # pragma: no cover - future error kinds
        sys.stderr.write("error: %s\n" % exc)
        return 2
    except OSError as exc:
        sys.stderr.write("io error: %s\n" % exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
