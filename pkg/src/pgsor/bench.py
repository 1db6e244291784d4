"""Benchmark rows, parameter tables and CSV output for the command line."""

from __future__ import annotations

import csv
import io
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import astuple, dataclass, fields
from typing import Iterable, Sequence

from .exceptions import InsufficientDataError, InvalidInputError, PgsorError
from .problems import EXAMPLE_IDS, ProblemConfig, ProblemInstance, generate
from .solvers import SolverSettings, gsor_solve, mhss_solve, pgsor_solve
from .spectral import (
    ParamChoice,
    SpectralEstimate,
    approx_params,
    estimate_spectrum,
    gsor_optimal_alpha,
    improvement_threshold,
    iteration_radius,
    observed_convergence_factor,
    pgsor_optimal_params,
    rho_S_tilde,
)

log = logging.getLogger(__name__)

METHODS = ("gsor", "pgsor", "pgsor-approx", "mhss")
DEFAULT_MAX_GRID = 256

# Experimentally tuned MHSS shifts; no closed form exists for these.
MHSS_ALPHA = {
    1: {16: 1.06, 32: 0.75, 64: 0.54, 128: 0.40, 256: 0.30},
    2: {16: 0.21, 32: 0.08, 64: 0.04, 128: 0.02, 256: 0.01},
    3: {16: 1.61, 32: 1.01, 64: 0.53, 128: 0.26, 256: 0.13},
    4: {16: 0.37, 32: 0.09, 64: 0.021, 128: 0.005, 256: 0.002},
}


@dataclass(frozen=True)
class BenchRow:
    example: int
    m: int
    method: str
    alpha: float
    omega: float | None
    iterations: int
    converged: bool
    final_residual: float
    predicted_rho: float | None
    observed_rho: float | None

    def __post_init__(self):
        if self.method not in METHODS:
            raise InvalidInputError(f"unknown method '{self.method}'")
        if self.iterations < 0:
            raise InvalidInputError("iterations must be >= 0")


CSV_HEADER = tuple(f.name for f in fields(BenchRow))


@dataclass(frozen=True)
class ParamSet:
    """Everything ``params`` reports for one problem."""

    example: int
    m: int
    estimate: SpectralEstimate
    gsor: ParamChoice
    pgsor: ParamChoice
    threshold: float


def compute_params(prob: ProblemInstance, seed: int | None = None) -> ParamSet:
    kwargs = {} if seed is None else {"seed": seed}
    est = estimate_spectrum(prob.W, prob.T, **kwargs)
    cfg = prob.config
    return ParamSet(
        example=cfg.example if cfg else 0,
        m=cfg.m if cfg else 0,
        estimate=est,
        gsor=gsor_optimal_alpha(est.mu_max),
        pgsor=pgsor_optimal_params(est),
        threshold=improvement_threshold(est),
    )


def mhss_alpha(example: int, m: int) -> float:
    try:
        return MHSS_ALPHA[example][m]
    except KeyError:
        raise InvalidInputError(
            f"no tabulated MHSS alpha for example {example}, m={m}; pass --alpha"
        ) from None


def resolve_params(method, params: ParamSet, alpha=None, omega=None):
    """Fill in missing ``(alpha, omega)`` for ``method``; also return the predicted radius."""
    est = params.estimate
    if method == "gsor":
        alpha = params.gsor.alpha if alpha is None else alpha
        return alpha, None, iteration_radius(alpha, est.mu_max)
    if method in ("pgsor", "pgsor-approx"):
        preset = params.pgsor if method == "pgsor" else approx_params()
        alpha = preset.alpha if alpha is None else alpha
        omega = preset.omega if omega is None else omega
        return alpha, omega, iteration_radius(alpha, rho_S_tilde(omega, est))
    if method == "mhss":
        alpha = mhss_alpha(params.example, params.m) if alpha is None else alpha
        return alpha, None, None
    raise InvalidInputError(f"unknown method '{method}'; choose from {', '.join(METHODS)}")


_SOLVERS = {"gsor": gsor_solve, "pgsor": pgsor_solve, "pgsor-approx": pgsor_solve, "mhss": mhss_solve}


def run_one(
    prob: ProblemInstance,
    method: str,
    params: ParamSet,
    alpha: float | None = None,
    omega: float | None = None,
    tol: float = 1e-6,
    max_iter: int = 10000,
):
    """One solve; returns ``(BenchRow, SolverReport)``."""
    alpha, omega, predicted = resolve_params(method, params, alpha, omega)
    settings = SolverSettings(alpha=alpha, omega=omega, tol=tol, max_iter=max_iter)
    _, report = _SOLVERS[method](prob, settings)
    try:
        observed = observed_convergence_factor(report)
    except InsufficientDataError:
        observed = None
    row = BenchRow(
        example=params.example,
        m=params.m,
        method=method,
        alpha=alpha,
        omega=omega,
        iterations=report.iterations,
        converged=report.converged,
        final_residual=report.final_residual,
        predicted_rho=predicted,
        observed_rho=observed,
    )
    return row, report


def _failed_row(example, m, method, alpha=None, omega=None) -> BenchRow:
    return BenchRow(
        example=example,
        m=m,
        method=method,
        alpha=math.nan if alpha is None else alpha,
        omega=omega,
        iterations=0,
        converged=False,
        final_residual=math.nan,
        predicted_rho=None,
        observed_rho=None,
    )


def _bench_group(args) -> list[BenchRow]:
    example, m, methods, tol, max_iter, seed = args
    try:
        prob = generate(ProblemConfig(example=example, m=m))
        params = compute_params(prob, seed=seed)
    except PgsorError as exc:
        log.warning("example %d m=%d: setup failed: %s", example, m, exc)
        return [_failed_row(example, m, meth) for meth in methods]
    rows = []
    for meth in methods:
        try:
            row, _ = run_one(prob, meth, params, tol=tol, max_iter=max_iter)
        except PgsorError as exc:
            log.warning("example %d m=%d %s failed: %s", example, m, meth, exc)
            row = _failed_row(example, m, meth)
        rows.append(row)
    return rows


def run_bench(
    examples: Sequence[int],
    grids: Sequence[int],
    methods: Sequence[str],
    tol: float = 1e-6,
    max_iter: int = 10000,
    seed: int | None = None,
    max_grid: int = DEFAULT_MAX_GRID,
    jobs: int = 1,
) -> list[BenchRow]:
    """Cartesian product of runs, ordered by (example, grid, method)."""
    if not examples or not grids or not methods:
        raise InvalidInputError("examples, grids and methods must all be non-empty")
    for e in examples:
        if e not in EXAMPLE_IDS:
            raise InvalidInputError(f"unknown example {e}")
    for meth in methods:
        if meth not in METHODS:
            raise InvalidInputError(f"unknown method '{meth}'; choose from {', '.join(METHODS)}")
    for m in grids:
        if m > max_grid:
            raise InvalidInputError(f"grid m={m} exceeds the cap {max_grid}")
    tasks = [(e, m, tuple(methods), tol, max_iter, seed) for e in examples for m in grids]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            groups = list(pool.map(_bench_group, tasks))
    else:
        groups = [_bench_group(t) for t in tasks]
    order = {meth: i for i, meth in enumerate(methods)}
    rows = [row for group in groups for row in group]
    rows.sort(key=lambda r: (examples.index(r.example), grids.index(r.m), order[r.method]))
    return rows


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def rows_to_csv(rows: Iterable[BenchRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow([_fmt(v) for v in astuple(row)])
    return buf.getvalue()


def write_csv(rows: Iterable[BenchRow], path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(rows_to_csv(rows))


def _opt_float(text: str):
    return None if text == "" else float(text)


def parse_csv(text: str) -> list[BenchRow]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if tuple(header) != CSV_HEADER:
        raise InvalidInputError(f"unexpected CSV header {header}")
    rows = []
    for rec in reader:
        rows.append(
            BenchRow(
                example=int(rec[0]),
                m=int(rec[1]),
                method=rec[2],
                alpha=float(rec[3]),
                omega=_opt_float(rec[4]),
                iterations=int(rec[5]),
                converged=rec[6] == "true",
                final_residual=float(rec[7]),
                predicted_rho=_opt_float(rec[8]),
                observed_rho=_opt_float(rec[9]),
            )
        )
    return rows


def read_csv(path) -> list[BenchRow]:
    with open(path, newline="") as fh:
        return parse_csv(fh.read())
