"""Command-line interface.

Commands:

* ``solve``          spectra of a model over a range of pair numbers
* ``tables``         comparison with the tabulated lowest levels
* ``check-algebra``  generator commutation relations on the pair Fock space

Exit codes: 0 success, 1 error, 2 when the Bethe solver missed levels.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import warnings
from collections.abc import Sequence
from pathlib import Path
from typing import Any, Optional

import numpy as np

from .bethe_solver import STRATEGIES, RapiditySet, ZeroModeRoots, nonzero_state, zero_state
from .errors import GenpairError, ModelError
from .model import BUILTIN_NAMES, ModelSpace, builtin_model, validate_model
from .pair_basis import enumerate_basis
from .quasispin_oracle import DEFAULT_DIM_CAP, commutator_check, diagonalize_sector
from .spectrum import MODES, SpectrumReport, TableComparison, compute_report, reproduce_table

EXIT_OK, EXIT_ERROR, EXIT_INCOMPLETE = 0, 1, 2
CSV_COLUMNS = ("case", "N", "h", "E_over_G", "degeneracy", "source", "residual")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """Argument parser whose usage errors exit with status 1."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def fmt(value: float) -> str:
    """Text rendering of a float: 9 significant digits."""
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return "nan"
    if value == 0.0:
        return "0"
    return f"{value:.9g}"


def _json_number(value: float) -> Optional[float]:
    if value is None or not math.isfinite(value):
        return None
    return float(value)


def parse_range(text: str, what: str) -> tuple[int, int]:
    """Parse ``a..b`` (or a single integer) into an inclusive range."""
    parts = text.split("..")
    try:
        if len(parts) == 1:
            lo = hi = int(parts[0])
        elif len(parts) == 2:
            lo, hi = int(parts[0]), int(parts[1])
        else:
            raise ValueError
    except ValueError:
        raise UsageError(f"{what}: expected a..b, got {text!r}") from None
    if lo > hi:
        raise UsageError(f"{what}: empty range {text!r}")
    return lo, hi


def load_model(config: str) -> tuple[str, ModelSpace]:
    """Resolve ``--config``: a JSON file path, or a built-in model name."""
    path = Path(config)
    if path.is_file():
        try:
            raw = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ModelError(f"{config}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
        if not isinstance(raw, dict):
            raise ModelError(f"{config}: top level must be an object with key 'shells'")
        try:
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always")
                model = validate_model(raw)
            for w in caught:
                print(f"warning: {w.message}", file=sys.stderr)
        except ModelError as exc:
            raise ModelError(f"{config}: {exc}") from None
        return path.stem, model
    if config in BUILTIN_NAMES:
        return config, builtin_model(config)
    raise ModelError(f"--config {config!r} is neither a readable file nor a built-in model ({', '.join(BUILTIN_NAMES)})")


# ----------------------------------------------------------------------------
# report formatting


def report_rows(report: SpectrumReport) -> list[dict[str, Any]]:
    return [
        {
            "case": ln.case,
            "N": ln.N,
            "h": ln.h,
            "E_over_G": ln.e_over_g,
            "degeneracy": ln.degeneracy,
            "source": ln.source,
            "residual": ln.residual,
        }
        for ln in report.lines()
    ]


def format_report(report: SpectrumReport, model: ModelSpace, style: str) -> str:
    rows = report_rows(report)
    if style == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in rows:
            writer.writerow([r["case"], r["N"], fmt(r["h"]), fmt(r["E_over_G"]), r["degeneracy"], r["source"], fmt(r["residual"])])
        return buf.getvalue()
    if style == "json":
        doc = {
            "case": report.case,
            "mode": report.mode,
            "model": {
                "shells": [{"label": s.label, "omega": s.omega, "c_squared": s.c_squared} for s in model.shells]
            },
            "sectors": [
                {
                    "N": sec.N,
                    "dim": sec.dim,
                    "rank": sec.rank,
                    "bethe_found": sec.bethe_found,
                    "complete": sec.complete,
                    "lines": [
                        {
                            "h": ln.h,
                            "E_over_G": ln.e_over_g,
                            "degeneracy": ln.degeneracy,
                            "source": ln.source,
                            "residual": _json_number(ln.residual),
                        }
                        for ln in sec.lines
                    ],
                    "gaps": sec.gaps,
                }
                for sec in report.sectors
            ],
            "discrepancies": report.discrepancies,
            "incomplete": report.incomplete,
        }
        return json.dumps(doc, indent=2) + "\n"
    out = [f"# case: {report.case}   mode: {report.mode}", f"# model: {report.description}"]
    out.append(f"{'N':>3} {'h':>16} {'E/|G|':>16} {'deg':>4}  {'source':<16} {'residual':>16}")
    for r in rows:
        out.append(
            f"{r['N']:>3} {fmt(r['h']):>16} {fmt(r['E_over_G']):>16} {r['degeneracy']:>4}  "
            f"{r['source']:<16} {fmt(r['residual']):>16}"
        )
    for sec in report.sectors:
        if sec.bethe_found is not None:
            out.append(f"# N={sec.N}: dim {sec.dim}, nonzero levels found {sec.bethe_found} of {sec.rank}")
    for g in report.gaps():
        out.append(f"# gap: {g}")
    for d in report.discrepancies:
        out.append(f"# discrepancy: {d}")
    return "\n".join(out) + "\n"


def format_table(comp: TableComparison, style: str) -> str:
    header = ("case", "N", "computed", "oracle", "reference", "difference", "passed", "partner_N", "partner", "source")
    rows = [
        (c.case, c.N, c.computed, c.oracle, c.reference, c.difference, c.passed, c.partner_N, c.partner, c.source)
        for c in comp.cells
    ]
    if style == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        for r in rows:
            writer.writerow([r[0], r[1], fmt(r[2]), fmt(r[3]), fmt(r[4]), fmt(r[5]), "pass" if r[6] else "FAIL", r[7], fmt(r[8]), r[9]])
        return buf.getvalue()
    if style == "json":
        doc = {
            "table": comp.table_id,
            "passed": comp.passed_count,
            "cells": [dict(zip(header, r)) for r in rows],
            "discrepancies": comp.discrepancies(),
        }
        return json.dumps(doc, indent=2) + "\n"
    out = [f"# table {comp.table_id}: {comp.passed_count} of {len(comp.cells)} cells within tolerance"]
    out.append(f"{'case':<14} {'N':>3} {'computed':>14} {'reference':>10} {'difference':>12}  result")
    for r in rows:
        out.append(f"{r[0]:<14} {r[1]:>3} {fmt(r[2]):>14} {r[4]:>10g} {fmt(r[5]):>12}  {'pass' if r[6] else 'FAIL'}")
    for d in comp.discrepancies():
        out.append(f"# discrepancy: {d}")
    return "\n".join(out) + "\n"


def dump_states(report: SpectrumReport, model: ModelSpace, directory: Path) -> list[Path]:
    """Write one JSON file per sector with the basis and eigenvector amplitudes."""
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for sec in report.sectors:
        basis = enumerate_basis(model, sec.N)
        vectors = []
        if report.mode == "oracle":
            eig = diagonalize_sector(model, sec.N)
            for h, v in zip(eig.h_values, eig.vectors.T):
                vectors.append({"h": float(h), "source": "oracle", "re": v.tolist(), "im": [0.0] * len(v)})
        else:
            for ln in sec.lines:
                for sol in ln.roots:
                    if isinstance(sol, ZeroModeRoots):
                        state, h, roots = zero_state(model, sol), 0.0, sol.x
                    elif isinstance(sol, RapiditySet) and sol.N >= 2:
                        state, h, roots = nonzero_state(model, sol), sol.h, sol.x
                    else:
                        continue
                    vectors.append(
                        {
                            "h": h,
                            "source": sol.strategy,
                            "roots_re": [_json_number(complex(x).real) for x in roots],
                            "roots_im": [_json_number(complex(x).imag) for x in roots],
                            "re": state.amplitudes.real.tolist(),
                            "im": state.amplitudes.imag.tolist(),
                        }
                    )
        doc = {"case": report.case, "N": sec.N, "basis": [list(k) for k in basis.states], "states": vectors}
        path = directory / f"{report.case}_N{sec.N}.json"
        path.write_text(json.dumps(doc, indent=1) + "\n")
        written.append(path)
    return written


# ----------------------------------------------------------------------------
# commands


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_solve(args: argparse.Namespace) -> int:
    case, model = load_model(args.config)
    lo, hi = parse_range(args.pairs, "--pairs")
    if lo < 0 or hi > model.omega_total:
        raise UsageError(f"--pairs must lie within [0, {model.omega_total}] for this model")
    if args.tol <= 0:
        raise UsageError("--tol must be positive")
    report = compute_report(
        model,
        range(lo, hi + 1),
        args.mode,
        case=case,
        strategy=args.strategy,
        seed=args.seed,
        max_starts=args.max_starts,
        oracle_fallback=args.oracle_seeded,
        dim_cap=args.dim_cap,
        cross_tol=args.tol,
    )
    _emit(format_report(report, model, args.format), args.out)
    if args.dump_states:
        dump_states(report, model, Path(args.dump_states))
    if report.incomplete:
        for g in report.gaps():
            print(f"incomplete: {g}", file=sys.stderr)
        return EXIT_INCOMPLETE
    return EXIT_OK


def cmd_tables(args: argparse.Namespace) -> int:
    comp = reproduce_table(int(args.which))
    _emit(format_table(comp, args.format), args.out)
    return EXIT_OK


def cmd_check_algebra(args: argparse.Namespace) -> int:
    case, model = load_model(args.config)
    lo, hi = parse_range(args.m_range, "--m-range")
    rep = commutator_check(model, (lo, hi), cap=args.dim_cap)
    ok = rep.passed(1e-12)
    print(f"case: {case}")
    print(f"m range: [{lo}, {hi}], {rep.checked} identities checked")
    print(f"max commutator deviation: {fmt(rep.max_deviation)} absolute, {fmt(rep.max_scaled_deviation)} relative to operator size")
    print(f"worst identity: {rep.worst}")
    print(f"vacuum condition deviation: {fmt(rep.vacuum_deviation)}")
    print("PASS" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_ERROR


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="genpair", description="Exact spectra of the separable pairing Hamiltonian.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    solve = sub.add_parser("solve", help="spectra over a range of pair numbers")
    solve.add_argument("--config", required=True, help="model JSON file or built-in name")
    solve.add_argument("--pairs", default="0..0", help="pair-number range a..b (default 0..0)")
    solve.add_argument("--mode", choices=MODES, default="oracle")
    solve.add_argument("--format", choices=("table", "csv", "json"), default="table")
    solve.add_argument("--seed", type=int, default=0, help="seed for randomized starts")
    solve.add_argument("--strategy", choices=STRATEGIES, default="continuation")
    solve.add_argument("--max-starts", type=int, default=200)
    solve.add_argument("--oracle-seeded", action="store_true", help="retry missed levels from oracle energies")
    solve.add_argument("--tol", type=float, default=1e-8, help="cross-validation tolerance")
    solve.add_argument("--dim-cap", type=int, default=DEFAULT_DIM_CAP)
    solve.add_argument("--dump-states", metavar="DIR")
    solve.add_argument("--out", metavar="FILE")
    solve.set_defaults(func=cmd_solve)

    tables = sub.add_parser("tables", help="compare with the tabulated lowest levels")
    tables.add_argument("--which", choices=("1", "2"), required=True)
    tables.add_argument("--format", choices=("table", "csv", "json"), default="table")
    tables.add_argument("--out", metavar="FILE")
    tables.set_defaults(func=cmd_tables)

    alg = sub.add_parser("check-algebra", help="verify the generator commutation relations")
    alg.add_argument("--config", required=True, help="model JSON file or built-in name")
    alg.add_argument("--m-range", default="-2..2")
    alg.add_argument("--dim-cap", type=int, default=DEFAULT_DIM_CAP)
    alg.set_defaults(func=cmd_check_algebra)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return int(args.func(args))
    except UsageError as exc:
        print(f"genpair: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (GenpairError, ValueError, OSError) as exc:
        print(f"genpair: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
