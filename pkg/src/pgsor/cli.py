"""Command-line entry point: ``pgsor {params,solve,bench,verify,gen}``."""

from __future__ import annotations

import argparse
import logging
import os
import sys

from . import bench
from .exceptions import PgsorError
from .mmio import mm_write, write_vector
from .problems import ProblemConfig, ProblemInstance, generate
from .verify import run_all

log = logging.getLogger("pgsor")


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got '{text}'")


def _str_list(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def _problem(args) -> ProblemInstance:
    return generate(ProblemConfig(example=args.example, m=args.m))


def cmd_params(args) -> int:
    prob = _problem(args)
    ps = bench.compute_params(prob, seed=args.seed)
    est = ps.estimate
    print(f"example {ps.example}  m={ps.m}  n={prob.n}")
    print(f"  mu_min(S)            {est.mu_min:.6f}  ({est.mu_min_iterations} its)")
    print(f"  mu_max(S)            {est.mu_max:.6f}  ({est.mu_max_iterations} its)")
    print(f"  GSOR   alpha*        {ps.gsor.alpha:.3f}   rho = {ps.gsor.predicted_rho:.3f}")
    print(
        f"  PGSOR  alpha*        {ps.pgsor.alpha:.3f}   omega* = {ps.pgsor.omega:.3f}"
        f"   rho = {ps.pgsor.predicted_rho:.3f}"
    )
    print(f"  omega threshold      {ps.threshold:.3f}")
    if args.out:
        header = "example,m,mu_min,mu_max,gsor_alpha,gsor_rho,pgsor_alpha,pgsor_omega,pgsor_xi,pgsor_rho,omega_threshold"
        values = [
            est.mu_min, est.mu_max, ps.gsor.alpha, ps.gsor.predicted_rho,
            ps.pgsor.alpha, ps.pgsor.omega, ps.pgsor.xi, ps.pgsor.predicted_rho, ps.threshold,
        ]
        with open(args.out, "w") as fh:
            fh.write(header + "\n")
            fh.write(",".join([str(ps.example), str(ps.m)] + [repr(float(v)) for v in values]) + "\n")
    return 0


def cmd_solve(args) -> int:
    prob = _problem(args)
    params = bench.compute_params(prob, seed=args.seed)
    row, report = bench.run_one(
        prob, args.method, params, alpha=args.alpha, omega=args.omega,
        tol=args.tol, max_iter=args.max_iter,
    )
    text = bench.rows_to_csv([row])
    sys.stdout.write(text)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    log.info("%s: %d iterations in %.3fs", args.method, report.iterations, report.wall_time)
    return 0 if row.converged else 1


def cmd_bench(args) -> int:
    rows = bench.run_bench(
        args.examples, args.grids, args.methods, tol=args.tol, max_iter=args.max_iter,
        seed=args.seed, max_grid=args.max_grid, jobs=args.jobs,
    )
    if args.out:
        bench.write_csv(rows, args.out)
    else:
        sys.stdout.write(bench.rows_to_csv(rows))
    return 0 if all(r.converged for r in rows) else 1


def cmd_verify(args) -> int:
    results = run_all(args.seed, args.trials)
    for res in results:
        status = "PASS" if res.ok else "FAIL"
        print(f"{status}  {res.name:<22} {res.passed}/{res.total}")
        for note in res.failures[:5]:
            print(f"      {note}")
    return 0 if all(r.ok for r in results) else 1


def cmd_gen(args) -> int:
    prob = _problem(args)
    out = args.out or f"example{args.example}_m{args.m}"
    os.makedirs(out, exist_ok=True)
    note = f"example {args.example}, m={args.m}"
    mm_write(prob.W, os.path.join(out, "W.mtx"), comment=note)
    mm_write(prob.T, os.path.join(out, "T.mtx"), comment=note)
    write_vector(prob.p, os.path.join(out, "p.txt"))
    write_vector(prob.q, os.path.join(out, "q.txt"))
    print(out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pgsor",
        description="GSOR / PGSOR / MHSS solvers for complex symmetric systems (W + iT)u = b.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def problem_flags(p, need_m=True):
        p.add_argument("--example", type=int, choices=(1, 2, 3, 4), required=True)
        p.add_argument("--m", type=int, required=need_m, help="grid points per side")

    p = sub.add_parser("params", help="estimate mu_min/mu_max and optimal parameters")
    problem_flags(p)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out")
    p.set_defaults(func=cmd_params)

    p = sub.add_parser("solve", help="run one solver")
    problem_flags(p)
    p.add_argument("--method", choices=bench.METHODS, required=True)
    p.add_argument("--alpha", type=float)
    p.add_argument("--omega", type=float)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--max-iter", type=int, default=10000)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("bench", help="run a grid of solves and write CSV")
    p.add_argument("--examples", type=_int_list, default=[1, 2, 3, 4])
    p.add_argument("--grids", type=_int_list, default=[16, 32])
    p.add_argument("--methods", type=_str_list, default=["gsor", "pgsor", "pgsor-approx", "mhss"])
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--max-iter", type=int, default=10000)
    p.add_argument("--max-grid", type=int, default=bench.DEFAULT_MAX_GRID)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("verify", help="randomized property checks against dense eigensolves")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=200)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gen", help="export W, T, p, q of a test problem")
    problem_flags(p)
    p.add_argument("--out", help="output directory")
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    if args.command == "verify" and args.trials < 1:
        parser.error("--trials must be >= 1")
    if args.command == "bench" and not (args.examples and args.grids and args.methods):
        parser.error("--examples, --grids and --methods must be non-empty")
    if args.command == "bench":
        unknown = [m for m in args.methods if m not in bench.METHODS]
        if unknown:
            parser.error(f"unknown method(s): {', '.join(unknown)}")
    try:
        return args.func(args)
    except PgsorError as exc:
        print(f"pgsor: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
