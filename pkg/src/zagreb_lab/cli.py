"""Command-line front end.

Commands
--------
simulate   Monte Carlo replication; reports empirical moments with SEs.
exact      Moment table rows from the exact engine.
oracle     Full exact distribution at small n (JSON only).
compare    Exact vs empirical with z-scores; exit 1 when a gate fails.
audit      Closed-form audit findings for one model.

Reports go to stdout or ``--output``.  CSV uses the fixed header
``model,params,n,quantity,exact,empirical,se,z`` with rationals rendered as
"p/q"; JSON mirrors the same rows plus a metadata block (seed, rng algorithm,
package version, wall time).  Exit codes: 0 success (and every gate passed),
1 gate failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from . import __version__
from .errors import BudgetExceededError, ParameterError
from .mc import (
    WORKERS_ENV_VAR,
    SampleSummary,
    empirical_skewness,
    resolve_workers,
    run_replicates,
)
from .models import RNG_ALGORITHM, Caterpillar, ExtendedRRT, ModelSpec, Port
from .moments import (
    AuditReport,
    MomentTable,
    caterpillar_moment_table,
    closed_form_audit,
    ext_rrt_moment_table,
    port_moment_table,
)
from .oracle import enumerate_distribution

CSV_HEADER = "model,params,n,quantity,exact,empirical,se,z"

_MODEL_NAMES = ("ext-rrt", "port", "caterpillar")


@dataclass
class ReportRow:
    model: str
    params: str
    n: Optional[int]
    quantity: str
    exact: object = None       # Fraction | float | mpf | None
    empirical: Optional[float] = None
    se: Optional[float] = None
    z: Optional[float] = None
    passed: Optional[bool] = None


@dataclass
class Report:
    command: str
    rows: list[ReportRow]
    metadata: dict
    extra: Optional[dict] = None  # oracle atom payload and similar

    def gates_passed(self) -> bool:
        return all(row.passed is not False for row in self.rows)


def _fmt_exact(value) -> str:
    if value is None:
        return ""
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, int):
        return f"{value}/1"
    return format(float(value), ".17g")  # float-regime rows are decimal


def _fmt_float(value, digits=17) -> str:
    if value is None:
        return ""
    return format(float(value), f".{digits}g")


def _json_exact(value):
    if value is None:
        return None
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, int):
        return f"{value}/1"
    return float(value)


def emit(report: Report, fmt: str, path: Optional[str]) -> None:
    """Write the report as CSV or JSON to ``path`` (stdout when None)."""
    if fmt == "csv":
        buf = io.StringIO()
        buf.write(CSV_HEADER + "\n")
        for row in report.rows:
            fields = (
                row.model,
                row.params,
                "" if row.n is None else str(row.n),
                row.quantity,
                _fmt_exact(row.exact),
                _fmt_float(row.empirical),
                _fmt_float(row.se),
                _fmt_float(row.z, digits=6),
            )
            buf.write(",".join(fields) + "\n")
        text = buf.getvalue()
    elif fmt == "json":
        payload = {
            "command": report.command,
            "metadata": report.metadata,
            "rows": [
                {
                    "model": row.model,
                    "params": row.params,
                    "n": row.n,
                    "quantity": row.quantity,
                    "exact": _json_exact(row.exact),
                    "empirical": row.empirical,
                    "se": row.se,
                    "z": row.z,
                    **({} if row.passed is None else {"pass": row.passed}),
                }
                for row in report.rows
            ],
        }
        if report.extra:
            payload.update(report.extra)
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    else:
        raise ParameterError(f"unknown format {fmt!r}")

    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# Model plumbing


def _build_spec(args) -> ModelSpec:
    if args.model == "ext-rrt":
        if args.m0 is None:
            raise ParameterError("ext-rrt requires --m0")
        return ExtendedRRT(m0=args.m0, m=args.m if args.m is not None else 1)
    if args.model == "port":
        if args.m0 is not None or args.m is not None:
            raise ParameterError("port takes no --m0/--m parameters")
        return Port()
    if args.model == "caterpillar":
        if args.m is None:
            raise ParameterError("caterpillar requires --m")
        if args.m0 is not None:
            raise ParameterError("caterpillar takes no --m0")
        return Caterpillar(m=args.m)
    raise ParameterError(f"unknown model {args.model!r}")


def _model_strings(spec: ModelSpec) -> tuple[str, str]:
    if isinstance(spec, ExtendedRRT):
        return "ext-rrt", f"m0={spec.m0};m={spec.m}"
    if isinstance(spec, Port):
        return "port", ""
    return "caterpillar", f"m={spec.m}"


def _metadata(args, wall_time: float, **extra) -> dict:
    md = {
        "version": __version__,
        "rng_algorithm": RNG_ALGORITHM,
        "seed": getattr(args, "seed", None),
        "wall_time": wall_time,
    }
    md.update(extra)
    return md


def _table_rows(table: MomentTable) -> list[ReportRow]:
    model, params = _model_strings(table.model)
    quantities = (
        ("mean_Z", "mean_Z"),
        ("second_Z", "second_Z"),
        ("var_Z", "var_Z"),
        ("mean_Y", "mean_Y"),
        ("mean_X", "mean_X"),
        ("mixed_ZY", "mixed_ZY"),
        ("third_Z", "third_Z"),
    )
    rows = []
    for mrow in table.rows:
        for attr, name in quantities:
            value = getattr(mrow, attr)
            if value is None:
                continue
            rows.append(ReportRow(model, params, mrow.n, name, exact=value))
        if mrow.skewness_Z is not None:
            rows.append(
                ReportRow(
                    model, params, mrow.n, "skewness_Z", empirical=mrow.skewness_Z
                )
            )
    return rows


def _exact_table(spec: ModelSpec, n_max: int, checkpoints=None) -> MomentTable:
    if isinstance(spec, ExtendedRRT):
        return ext_rrt_moment_table(n_max, spec.m0, spec.m, checkpoints=checkpoints)
    if isinstance(spec, Port):
        return port_moment_table(n_max, checkpoints=checkpoints)
    return caterpillar_moment_table(n_max, spec.m, checkpoints=checkpoints)


# ---------------------------------------------------------------------------
# Command handlers


def _cmd_simulate(args) -> int:
    spec = _build_spec(args)
    summary = run_replicates(
        spec, args.n, args.replicates, args.seed, workers=args.workers
    )
    model, params = _model_strings(spec)
    rows = [
        ReportRow(
            model, params, args.n, "mean_Z",
            empirical=float(summary.mean), se=summary.se_mean,
        ),
        ReportRow(
            model, params, args.n, "var_Z",
            empirical=float(summary.variance), se=summary.se_variance,
        ),
    ]
    if summary.skewness is not None:
        rows.append(
            ReportRow(
                model, params, args.n, "skewness_Z",
                empirical=summary.skewness, se=summary.se_skewness,
            )
        )
    report = Report(
        command="simulate",
        rows=rows,
        metadata=_metadata(
            args,
            summary.wall_time,
            replicates=summary.replicates,
            workers=summary.workers,
        ),
    )
    emit(report, args.format, args.output)
    return 0


def _cmd_exact(args) -> int:
    spec = _build_spec(args)
    t0 = time.perf_counter()
    table = _exact_table(spec, args.n_max)
    report = Report(
        command="exact",
        rows=_table_rows(table),
        metadata=_metadata(args, time.perf_counter() - t0, n_max=args.n_max),
    )
    emit(report, args.format, args.output)
    return 0


def _cmd_oracle(args) -> int:
    spec = _build_spec(args)
    if args.format != "json":
        raise ParameterError("the oracle distribution dump is JSON only")
    t0 = time.perf_counter()
    dist = enumerate_distribution(spec, args.n)
    model, params = _model_strings(spec)
    atoms = [
        {
            "zagreb": z,
            "cubic": y,
            "quartic": x,
            "probability": f"{p.numerator}/{p.denominator}",
        }
        for (z, y, x), p in dist.sorted_atoms()
    ]
    moments = {
        "mean_Z": _json_exact(dist.moment("Z", 1)),
        "second_Z": _json_exact(dist.moment("Z", 2)),
        "var_Z": _json_exact(dist.variance("Z")),
        "mean_Y": _json_exact(dist.moment("Y", 1)),
        "mean_X": _json_exact(dist.moment("X", 1)),
        "mixed_ZY": _json_exact(dist.mixed_moment(1, 1)),
        "third_Z": _json_exact(dist.moment("Z", 3)),
    }
    report = Report(
        command="oracle",
        rows=[],
        metadata=_metadata(args, time.perf_counter() - t0, n=args.n),
        extra={"model": model, "params": params, "atoms": atoms, "moments": moments},
    )
    emit(report, "json", args.output)
    return 0


def _cmd_compare(args) -> int:
    spec = _build_spec(args)
    table = _exact_table(spec, args.n, checkpoints=[args.n])
    row = table.row(args.n)
    summary = run_replicates(
        spec, args.n, args.replicates, args.seed, workers=args.workers
    )
    model, params = _model_strings(spec)

    def zscore(empirical: float, exact, se: float):
        if se == 0:
            return None
        return (empirical - float(exact)) / se

    rows = []
    mean_emp = float(summary.mean)
    exact_equal = summary.mean == row.mean_Z if row.regime == "exact" else None
    z_mean = zscore(mean_emp, row.mean_Z, summary.se_mean)
    mean_pass = bool(exact_equal) if z_mean is None else abs(z_mean) <= args.gate
    rows.append(
        ReportRow(
            model, params, args.n, "mean_Z",
            exact=row.mean_Z, empirical=mean_emp, se=summary.se_mean,
            z=z_mean, passed=mean_pass,
        )
    )
    var_emp = float(summary.variance)
    z_var = zscore(var_emp, row.var_Z, summary.se_variance)
    if z_var is None:
        var_pass = summary.variance == row.var_Z if row.regime == "exact" else True
    else:
        var_pass = abs(z_var) <= args.gate
    rows.append(
        ReportRow(
            model, params, args.n, "var_Z",
            exact=row.var_Z, empirical=var_emp, se=summary.se_variance,
            z=z_var, passed=bool(var_pass),
        )
    )
    report = Report(
        command="compare",
        rows=rows,
        metadata=_metadata(
            args,
            summary.wall_time,
            replicates=summary.replicates,
            workers=summary.workers,
            gate=args.gate,
        ),
    )
    emit(report, args.format, args.output)
    return 0 if report.gates_passed() else 1


def _cmd_audit(args) -> int:
    spec = _build_spec(args)
    t0 = time.perf_counter()
    report_data: AuditReport = closed_form_audit(spec, (args.n_min, args.n_max))
    model, params = _model_strings(spec)
    rows = []
    for f in report_data.findings:
        rows.append(
            ReportRow(
                model, params, None, f"{f.quantity}:{f.comparison}",
                exact=f.max_abs_delta,
                empirical=f.max_normalized_residual,
                passed=f.stable,
            )
        )
        if f.offset is not None:
            rows.append(
                ReportRow(
                    model, params, None, f"{f.quantity}:offset", exact=f.offset
                )
            )
    report = Report(
        command="audit",
        rows=rows,
        metadata=_metadata(
            args, time.perf_counter() - t0, n_min=args.n_min, n_max=args.n_max
        ),
    )
    emit(report, args.format, args.output)
    return 0 if report_data.all_stable() else 1


# ---------------------------------------------------------------------------
# Parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zagreb-lab",
        description="Zagreb-index simulation and exact computation toolkit",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_model_args(p):
        p.add_argument("--model", required=True, choices=_MODEL_NAMES)
        p.add_argument("--m0", type=int, default=None, help="initial clique size (ext-rrt)")
        p.add_argument("--m", type=int, default=None,
                       help="edges per newcomer (ext-rrt) or spine size (caterpillar)")

    def add_output_args(p):
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--output", "-o", default=None, help="output path (default stdout)")

    p = sub.add_parser("simulate", help="Monte Carlo replication summary")
    add_model_args(p)
    p.add_argument("-n", "--n", type=int, required=True, dest="n")
    p.add_argument("-R", "--replicates", type=int, required=True, dest="replicates")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=None,
                   help=f"parallel workers (default ${WORKERS_ENV_VAR} or 1)")
    add_output_args(p)
    p.set_defaults(handler=_cmd_simulate)

    p = sub.add_parser("exact", help="exact moment table")
    add_model_args(p)
    p.add_argument("--n-max", type=int, required=True, dest="n_max")
    add_output_args(p)
    p.set_defaults(handler=_cmd_exact)

    p = sub.add_parser("oracle", help="exhaustive exact distribution (JSON)")
    add_model_args(p)
    p.add_argument("-n", "--n", type=int, required=True, dest="n")
    p.add_argument("--format", choices=("csv", "json"), default="json")
    p.add_argument("--output", "-o", default=None)
    p.set_defaults(handler=_cmd_oracle)

    p = sub.add_parser("compare", help="exact vs Monte Carlo with z-score gates")
    add_model_args(p)
    p.add_argument("-n", "--n", type=int, required=True, dest="n")
    p.add_argument("-R", "--replicates", type=int, required=True, dest="replicates")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--gate", type=float, default=4.0, help="|z| pass threshold")
    add_output_args(p)
    p.set_defaults(handler=_cmd_compare)

    p = sub.add_parser("audit", help="closed-form audit against the recurrences")
    add_model_args(p)
    p.add_argument("--n-min", type=int, default=None, dest="n_min")
    p.add_argument("--n-max", type=int, required=True, dest="n_max")
    add_output_args(p)
    p.set_defaults(handler=_cmd_audit)

    return parser


def parse_and_dispatch(argv: Optional[Sequence[str]] = None) -> int:
    """Parse arguments and run one command; returns the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse uses 2 for usage errors
        return int(exc.code or 0)
    if getattr(args, "n_min", "absent") is None:
        args.n_min = 0 if args.model == "caterpillar" else 2
    try:
        return args.handler(args)
    except (ParameterError, BudgetExceededError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main(argv: Optional[Sequence[str]] = None) -> int:
    return parse_and_dispatch(argv)


if __name__ == "__main__":
    sys.exit(main())
