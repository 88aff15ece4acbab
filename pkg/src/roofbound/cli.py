"""Command-line front end.

Exit codes: 0 success, 1 failed self-test, 2 usage or parse error, 3 I/O
failure, 4 invalid input data.
"""

from __future__ import annotations

import argparse
import io
import logging
import math
import sys

import numpy as np

from . import bench, ising
from .measures import MEASURES, InvalidDensityMatrix, WrongQubitCount, check_density_matrix, eval_E
from .peeling import PeelConfig, upper_bound
from .rank2 import characteristic_curve, interval
from .states import UnknownName, make_pure
from .zero_simplex import BothOrderingsZero, NotOrthogonal, solve

EXIT_OK, EXIT_SELFTEST, EXIT_USAGE, EXIT_IO, EXIT_DATA = 0, 1, 2, 3, 4

logger = logging.getLogger("roofbound")


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class ParseError(Exception):
    pass


# ---------------------------------------------------------------------------
# formats


def fmt(x: float) -> str:
    """Nine significant digits; negative zero is printed as 0."""
    x = float(x)
    if x == 0:
        return "0"
    if math.isnan(x):
        return "nan"
    return format(x, ".9g")


def write_csv(path: str, header: list[str], rows) -> None:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(fmt(v) for v in row) + "\n")
    text = buf.getvalue()
    if path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


def write_density_matrix(path: str, rho) -> None:
    rho = np.asarray(rho, complex)
    n = rho.shape[0]
    lines = [f"dim {n}"]
    for r in range(n):
        for c in range(n):
            v = rho[r, c]
            lines.append(f"{r} {c} {v.real:.17g} {v.imag:.17g}")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def parse_density_matrix(text: str) -> np.ndarray:
    lines = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines or len(lines[0]) != 2 or lines[0][0] != "dim":
        raise ParseError("first line must be 'dim n'")
    try:
        n = int(lines[0][1])
    except ValueError as e:
        raise ParseError(f"bad dimension {lines[0][1]!r}") from e
    if n < 1:
        raise ParseError("dimension must be positive")
    body = lines[1:]
    if len(body) != n * n:
        raise ParseError(f"expected {n * n} entries, found {len(body)}")
    rho = np.zeros((n, n), complex)
    seen = np.zeros((n, n), bool)
    for k, parts in enumerate(body, start=2):
        if len(parts) != 4:
            raise ParseError(f"line {k}: expected 'row col re im'")
        try:
            r, c = int(parts[0]), int(parts[1])
            re_, im_ = float(parts[2]), float(parts[3])
        except ValueError as e:
            raise ParseError(f"line {k}: {e}") from e
        if not (0 <= r < n and 0 <= c < n):
            raise ParseError(f"line {k}: index out of range")
        if seen[r, c]:
            raise ParseError(f"line {k}: duplicate entry ({r},{c})")
        seen[r, c] = True
        rho[r, c] = complex(re_, im_)
    return rho


def read_density_matrix(path: str) -> np.ndarray:
    with open(path) as fh:
        return parse_density_matrix(fh.read())


# ---------------------------------------------------------------------------
# commands


def _grid(start: float, end: float, steps: int) -> np.ndarray:
    if steps < 2:
        raise UsageError("--steps must be at least 2")
    if end < start:
        raise UsageError("--end must not be below --start")
    return np.linspace(start, end, steps)


def cmd_bench(args) -> int:
    make, bases = bench.FAMILIES[args.state]
    basis = args.basis or bases[0]
    if basis not in bases:
        raise UsageError(f"basis {basis!r} not available for {args.state}; choose from {', '.join(bases)}")
    ps = _grid(args.start, args.end, args.steps)
    if ps[0] < 0 or ps[-1] > 1:
        raise UsageError("p range must lie in [0, 1]")
    measure = MEASURES["tau3"]
    rows = bench.curve(lambda p: bench.family_bound(args.state, basis, p, measure), ps)
    write_csv(args.out, ["p", "raw_bound", "convexified_bound"], rows)
    return EXIT_OK


def cmd_ising(args) -> int:
    grid = _grid(args.start, args.end, args.steps) if args.steps != 1 else np.array([args.start])
    if grid[0] < 0:
        raise UsageError("lambda must be non-negative")
    config = PeelConfig(rng_seed=args.seed)
    records = ising.sweep(grid, MEASURES["tau3"], config, workers=args.workers)
    header = ["lambda", "sqrt_tau3_upper", "six_smallest_sum", "five_smallest_sum"]
    if args.diagnostics:
        header += [f"eig{k}" for k in range(8)]
    rows = []
    for r in records:
        row = [r.lam, r.upper_bound, r.six_smallest_sum, r.five_smallest_sum]
        if args.diagnostics:
            row += list(r.eigenvalues)
        rows.append(row)
    write_csv(args.out, header, rows)
    return EXIT_OK


def cmd_bound(args) -> int:
    rho = read_density_matrix(args.input)
    measure = MEASURES[args.measure]
    if rho.shape[0] != 2**measure.n_qubits:
        raise DataError(f"{args.measure} needs dimension {2**measure.n_qubits}, file has {rho.shape[0]}")
    try:
        check_density_matrix(rho)
    except InvalidDensityMatrix as e:
        raise DataError(str(e)) from e
    config = PeelConfig(
        pair_search=args.pair_search,
        basis_presets=args.basis_search,
        n_random=args.n_random,
        rng_seed=args.seed,
    )
    res = upper_bound(rho, measure, config)
    print(f"upper_bound {fmt(res.value)}")
    print(f"candidate {res.candidate_labels[res.best_candidate] if res.candidate_labels else 'eigenbasis'}")
    print(f"candidates_tried {len(res.candidate_values)}")
    print(f"hint_more_states {str(res.hint_more_states).lower()}")
    if args.trace:
        print(res.trace())
    return EXIT_OK


def _named(spec: str) -> np.ndarray:
    """NAME, NAME:k for phased states, or basis:BITS."""
    name, _, arg = spec.partition(":")
    if name == "basis":
        return make_pure("basis", bits=arg)
    return make_pure(name, k=int(arg) if arg else 0)


def cmd_simplex(args) -> int:
    measure = MEASURES[args.measure]
    psi_i, psi_f = _named(args.psi_i), _named(args.psi_f)
    try:
        zs = solve(psi_i, psi_f, measure)
    except BothOrderingsZero:
        print("# invariant vanishes on the whole line", file=sys.stderr)
        write_csv(args.out, ["root_re", "root_im", "p", "Z_re", "Z_im", "E_zero_state"], [])
        return EXIT_OK
    roots = list(zs.all_roots)
    rows = []
    for z, ap, s in zip(roots, zs.axis_points, zs.zero_states):
        zr, zi = (math.inf, 0.0) if math.isinf(abs(z)) else (z.real, z.imag)
        rows.append([zr, zi, ap.p, ap.Z.real, ap.Z.imag, eval_E(measure, s)])
    write_csv(args.out, ["root_re", "root_im", "p", "Z_re", "Z_im", "E_zero_state"], rows)
    iv = interval(zs)
    msg = "no axis intersection" if iv is None else f"interval [{fmt(iv.p_min)}, {fmt(iv.p_max)}]"
    print(f"# {msg}", file=sys.stderr)
    return EXIT_OK


def cmd_rank2(args) -> int:
    measure = MEASURES[args.measure]
    rows = characteristic_curve(_named(args.psi_i), _named(args.psi_f), args.steps, measure)
    write_csv(args.out, ["p", "raw_bound", "convexified_bound"], rows)
    return EXIT_OK


def cmd_selftest(args) -> int:
    from .measures import wootters_concurrence
    from .states import ghz_werner_matrix

    checks = []
    tau3 = MEASURES["tau3"]
    checks.append(("ghz value", abs(eval_E(tau3, make_pure("ghz")) - 1) < 1e-12))
    checks.append(("phi value", abs(eval_E(tau3, make_pure("phi")) - 1 / math.sqrt(3)) < 1e-12))
    checks.append(("wlike p=3/4 vanishes", bench.family_bound("wlike", "ghz", 0.75) <= 1e-9))
    checks.append(("ghzwerner p=0.5 vanishes", bench.family_bound("ghzwerner", "w_phase", 0.5) <= 1e-9))
    checks.append(
        ("ghzwerner raw matrix p=0.3", upper_bound(ghz_werner_matrix(0.3), tau3, PeelConfig(basis_presets=True)).value <= 1e-9)
    )
    rng = np.random.default_rng(args.seed)
    ok = True
    for _ in range(20):
        v = rng.normal(size=(2, 4)) + 1j * rng.normal(size=(2, 4))
        w = rng.random(2)
        rho = (v.T * (w / np.sum(w * (np.abs(v) ** 2).sum(1)))) @ v.conj()
        rho /= np.trace(rho).real
        ok &= abs(upper_bound(rho, MEASURES["concurrence"]).value - wootters_concurrence(rho)) < 1e-6
    checks.append(("rank-two concurrence matches Wootters", bool(ok)))
    rho = ising.rdm3(0.5)
    checks.append(("ising rdm trace", abs(np.trace(rho).real - 1) < 1e-10))
    for name, passed in checks:
        print(f"{'PASS' if passed else 'FAIL'} {name}")
    return EXIT_OK if all(p for _, p in checks) else EXIT_SELFTEST


# ---------------------------------------------------------------------------
# argument parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="roofbound", description="Upper bounds on SL-invariant convex roofs.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("bench", help="bound curve of a benchmark family")
    b.add_argument("--state", choices=sorted(bench.FAMILIES), required=True)
    b.add_argument("--basis", default=None)
    b.add_argument("--start", type=float, default=0.0)
    b.add_argument("--end", type=float, default=1.0)
    b.add_argument("--steps", type=int, default=201)
    b.add_argument("--out", default="-")
    b.set_defaults(func=cmd_bench)

    s = sub.add_parser("ising", help="sweep of the transverse-field Ising chain")
    s.add_argument("--start", type=float, default=0.05)
    s.add_argument("--end", type=float, default=3.0)
    s.add_argument("--steps", type=int, default=60)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--diagnostics", action="store_true", help="append all eight RDM eigenvalues")
    s.add_argument("--out", default="-")
    s.set_defaults(func=cmd_ising)

    d = sub.add_parser("bound", help="upper bound for a density-matrix file")
    d.add_argument("input")
    d.add_argument("--measure", choices=sorted(MEASURES), default="tau3")
    d.add_argument("--basis-search", action="store_true", help="also try preset rotations of degenerate clusters")
    d.add_argument("--n-random", type=int, default=0, help="seeded random rotations of degenerate clusters")
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--pair-search", choices=["largest", "all"], default="largest")
    d.add_argument("--trace", action="store_true")
    d.set_defaults(func=cmd_bound)

    z = sub.add_parser("simplex", help="zero simplex of a pair of named states")
    z.add_argument("--psi-i", required=True, help="e.g. w, ghz_minus, w_phase:1, basis:011")
    z.add_argument("--psi-f", required=True)
    z.add_argument("--measure", choices=sorted(MEASURES), default="tau3")
    z.add_argument("--out", default="-")
    z.set_defaults(func=cmd_simplex)

    r = sub.add_parser("rank2", help="characteristic curve of a rank-two mixture")
    r.add_argument("--psi-i", required=True)
    r.add_argument("--psi-f", required=True)
    r.add_argument("--measure", choices=sorted(MEASURES), default="tau3")
    r.add_argument("--steps", type=int, default=101)
    r.add_argument("--out", default="-")
    r.set_defaults(func=cmd_rank2)

    t = sub.add_parser("selftest", help="quick consistency checks")
    t.add_argument("--seed", type=int, default=0)
    t.set_defaults(func=cmd_selftest)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        args.workers = ising.default_workers()
    except ValueError as e:
        print(f"roofbound: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except (UsageError, UnknownName, NotOrthogonal, WrongQubitCount, ParseError) as e:
        print(f"roofbound: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"roofbound: I/O error: {e}", file=sys.stderr)
        return EXIT_IO
    except (DataError, InvalidDensityMatrix) as e:
        print(f"roofbound: invalid data: {e}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
