"""Per-sector spectra: oracle, Bethe, or both cross-validated.

Every sector ``N`` yields a list of :class:`SpectrumLine` objects (one per
distinct level, with degeneracy) ordered by descending ``h``. In ``cross``
mode each oracle level is matched against the Bethe solutions and their
eigenvectors; levels the solver missed stay marked as ``oracle`` and are
listed as gaps.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .bethe_solver import (
    INF,
    RapiditySet,
    ZeroModeRoots,
    n1_energy,
    nonzero_state,
    solve_lowest,
    solve_nonzero,
    solve_zero,
    zero_state,
)
from .errors import ZeroState
from .model import ModelSpace, builtin_model
from .pair_basis import enumerate_basis
from .quasispin_oracle import (
    DEFAULT_DIM_CAP,
    build_hamiltonian,
    diagonalize_sector,
    lowering_rank,
    zero_multiplicity,
    zero_threshold,
)
from .reference import TABLE_TOLERANCE, TABLES, reference_lowest
from .state_builder import ExpandedState, collective_coeffs, expand_product, verify_eigenpair

MODES = ("oracle", "bethe", "cross")
DEGENERACY_REL = 1e-8
MATCH_REL = 1e-8
CROSS_TOL = 1e-8


@dataclass(frozen=True)
class SpectrumLine:
    """One level of sector ``N`` (``E = -|G| h``)."""

    case: str
    N: int
    h: float
    degeneracy: int
    source: str
    residual: float
    roots: tuple = field(default=(), compare=False, repr=False)

    @property
    def e_over_g(self) -> float:
        return -self.h if self.h != 0.0 else 0.0


@dataclass
class SectorResult:
    """Lines of one sector plus completeness bookkeeping."""

    case: str
    N: int
    dim: int
    lines: list[SpectrumLine]
    rank: Optional[int] = None
    bethe_found: Optional[int] = None
    gaps: list[str] = field(default_factory=list)
    unmatched: list[float] = field(default_factory=list)
    min_overlap: float = math.nan
    max_state_residual: float = math.nan

    @property
    def complete(self) -> bool:
        if self.bethe_found is None:
            return True
        return self.rank is not None and self.bethe_found == self.rank and not self.gaps and not self.unmatched

    @property
    def lowest(self) -> float:
        return max((ln.h for ln in self.lines), default=0.0)


@dataclass
class SpectrumReport:
    """All requested sectors of one model."""

    case: str
    description: str
    mode: str
    sectors: list[SectorResult]
    discrepancies: list[str] = field(default_factory=list)

    @property
    def incomplete(self) -> bool:
        return any(not s.complete for s in self.sectors)

    def lines(self) -> list[SpectrumLine]:
        return [ln for s in self.sectors for ln in s.lines]

    def gaps(self) -> list[str]:
        return [g for s in self.sectors for g in s.gaps]


def group_levels(values: Sequence[float], rel: float = DEGENERACY_REL) -> list[tuple[float, int, list[int]]]:
    """Group descending values whose neighbours differ by at most ``rel * max(1, h_max)``.

    Returns ``(mean value, count, member indices)`` per group.
    """
    vals = np.asarray(values, dtype=np.float64)
    if vals.size == 0:
        return []
    order = np.argsort(-vals, kind="stable")
    tol = rel * max(1.0, float(np.max(np.abs(vals))))
    groups: list[list[int]] = [[int(order[0])]]
    for i in order[1:]:
        if abs(vals[groups[-1][-1]] - vals[i]) <= tol:
            groups[-1].append(int(i))
        else:
            groups.append([int(i)])
    return [(float(np.mean(vals[g])), len(g), g) for g in groups]


def _clean(h: float, h_max: float) -> float:
    """Snap numerically-zero levels to exactly zero."""
    return 0.0 if abs(h) < zero_threshold(h_max) else float(h)


def _oracle_lines(case: str, model: ModelSpace, N: int, cap: int) -> tuple[list[SpectrumLine], object]:
    eig = diagonalize_sector(model, N, cap)
    mat = build_hamiltonian(model, N, cap).entries
    h_max = eig.h_max
    values = np.array([_clean(h, h_max) for h in eig.h_values])
    lines = []
    for h, count, members in group_levels(values):
        vecs = eig.vectors[:, members]
        res = float(np.max(np.linalg.norm(mat @ vecs - vecs * eig.h_values[members], axis=0)))
        lines.append(SpectrumLine(case, N, _clean(h, h_max), count, "oracle", res))
    return lines, eig


def _bethe_nonzero(model: ModelSpace, N: int, strategy: str, seed: int, max_starts: int, cap: int, oracle_h=None, fallback=False):
    if N == 0:
        return [], 0
    if N == 1:
        rs = RapiditySet(N=1, y=(), alpha=INF, h=n1_energy(model), strategy="closed-form", residual=0.0)
        return [rs], 0
    rep = solve_nonzero(
        model, N, strategy, seed, max_starts=max_starts, oracle_h=oracle_h, oracle_fallback=fallback, dim_cap=cap
    )
    return rep.solutions, rep.failures


def full_spectrum(
    model: ModelSpace,
    N: int,
    mode: str = "oracle",
    *,
    case: str = "",
    strategy: str = "continuation",
    seed: int = 0,
    max_starts: int = 200,
    oracle_fallback: bool = False,
    dim_cap: int = DEFAULT_DIM_CAP,
    cross_tol: float = CROSS_TOL,
) -> SectorResult:
    """Spectrum of sector ``N`` in ``oracle``, ``bethe`` or ``cross`` mode."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    if N < 0 or N > model.omega_total:
        raise ValueError(f"pair number {N} outside [0, {model.omega_total}]")
    dim = enumerate_basis(model, N).dim

    if mode == "oracle":
        lines, _ = _oracle_lines(case, model, N, dim_cap)
        return SectorResult(case, N, dim, lines, rank=lowering_rank(model, N))

    if N == 0:
        vac = SpectrumLine(case, 0, 0.0, 1, "bethe" if mode == "bethe" else "cross-validated", 0.0)
        return SectorResult(case, 0, 1, [vac], rank=0, bethe_found=0, min_overlap=1.0, max_state_residual=0.0)

    if mode == "bethe":
        return _bethe_sector(case, model, N, dim, strategy, seed, max_starts, dim_cap)
    return _cross_sector(case, model, N, dim, strategy, seed, max_starts, oracle_fallback, dim_cap, cross_tol)


def _bethe_sector(case, model, N, dim, strategy, seed, max_starts, cap) -> SectorResult:
    sols, _ = _bethe_nonzero(model, N, strategy, seed, max_starts, cap)
    rank = lowering_rank(model, N) if dim <= cap else None
    h_max = max((s.h for s in sols), default=0.0)
    lines = []
    for h, count, members in group_levels([s.h for s in sols]):
        group = [sols[i] for i in members]
        res = max((g.state_residual if not math.isnan(g.state_residual) else g.residual) for g in group)
        lines.append(SpectrumLine(case, N, _clean(h, h_max), count, "bethe", res, tuple(group)))
    zeros = dim - len(sols) if rank is None else zero_multiplicity(model, N)
    if zeros > 0:
        lines.append(SpectrumLine(case, N, 0.0, zeros, "bethe", 0.0))
    result = SectorResult(case, N, dim, lines, rank=rank, bethe_found=len(sols))
    if rank is not None and len(sols) < rank:
        result.gaps.append(f"N={N}: found {len(sols)} of {rank} nonzero levels")
    return result


def _state_check(model, state: ExpandedState, h: float, cap: int) -> tuple[float, float]:
    chk = verify_eigenpair(model, state, h, cap)
    return chk.residual, chk.overlap


def _cross_sector(case, model, N, dim, strategy, seed, max_starts, fallback, cap, cross_tol) -> SectorResult:
    oracle_lines, eig = _oracle_lines(case, model, N, cap)
    h_max = eig.h_max
    tol = MATCH_REL * max(1.0, h_max)
    rank = lowering_rank(model, N)
    sols, _ = _bethe_nonzero(model, N, strategy, seed, max_starts, cap, eig.nonzero(), fallback)
    zero_sols: list[ZeroModeRoots] = []
    if N >= 1:
        zero_sols = solve_zero(model, N, seed, dim_cap=cap).solutions

    result = SectorResult(case, N, dim, [], rank=rank, bethe_found=len(sols))
    matched: dict[int, list] = {i: [] for i in range(len(oracle_lines))}
    for s in sols:
        i = min(range(len(oracle_lines)), key=lambda k: abs(oracle_lines[k].h - s.h))
        if abs(oracle_lines[i].h - s.h) <= tol and oracle_lines[i].h != 0.0:
            matched[i].append(s)
        else:
            result.unmatched.append(s.h)
    zero_index = next((i for i, ln in enumerate(oracle_lines) if ln.h == 0.0), None)
    if zero_index is not None:
        matched[zero_index].extend(zero_sols)

    overlaps, residuals = [], []
    for i, line in enumerate(oracle_lines):
        group = matched[i]
        worst = 0.0
        for s in group:
            try:
                if isinstance(s, ZeroModeRoots):
                    state, h = zero_state(model, s), 0.0
                elif s.N == 1:
                    state, h = _one_pair_state(model), s.h
                else:
                    state, h = nonzero_state(model, s), s.h
            except ZeroState:
                worst = math.inf
                continue
            r, ov = _state_check(model, state, h, cap)
            residuals.append(r)
            overlaps.append(ov)
            worst = max(worst, r, 1.0 - ov, abs(h - line.h))
        if len(group) == line.degeneracy and worst <= cross_tol * max(1.0, h_max):
            result.lines.append(SpectrumLine(case, N, line.h, line.degeneracy, "cross-validated", worst, tuple(group)))
        else:
            result.lines.append(line)
            result.gaps.append(f"N={N}: level h={line.h:.9g} has degeneracy {line.degeneracy}, Bethe matched {len(group)}")
    result.min_overlap = min(overlaps, default=1.0)
    result.max_state_residual = max(residuals, default=0.0)
    return result


def _one_pair_state(model: ModelSpace) -> ExpandedState:
    return expand_product(model, [collective_coeffs(model, 0.0)])


def compute_report(
    model: ModelSpace,
    pairs: Sequence[int],
    mode: str = "oracle",
    *,
    case: str = "",
    strategy: str = "continuation",
    seed: int = 0,
    max_starts: int = 200,
    oracle_fallback: bool = False,
    dim_cap: int = DEFAULT_DIM_CAP,
    cross_tol: float = CROSS_TOL,
) -> SpectrumReport:
    """Spectra for every ``N`` in ``pairs``, with a comparison against tabulated values if the case has one."""
    sectors = [
        full_spectrum(
            model, N, mode, case=case, strategy=strategy, seed=seed, max_starts=max_starts,
            oracle_fallback=oracle_fallback, dim_cap=dim_cap, cross_tol=cross_tol,
        )
        for N in pairs
    ]
    report = SpectrumReport(case=case, description=model.describe(), mode=mode, sectors=sectors)
    ref = reference_lowest(case) if case else None
    if ref is not None:
        for sec in sectors:
            if sec.N < len(ref) and abs(sec.lowest - ref[sec.N]) > TABLE_TOLERANCE:
                report.discrepancies.append(
                    f"{case} N={sec.N}: computed {sec.lowest:.9g}, tabulated {ref[sec.N]:g}, "
                    f"difference {abs(sec.lowest - ref[sec.N]):.3g}"
                )
    return report


# ----------------------------------------------------------------------------
# table reproduction


@dataclass(frozen=True)
class TableCell:
    case: str
    N: int
    computed: float
    oracle: float
    reference: float
    partner_N: int
    partner: float
    source: str

    @property
    def difference(self) -> float:
        return abs(self.computed - self.reference)

    @property
    def passed(self) -> bool:
        return self.difference <= TABLE_TOLERANCE

    @property
    def oracle_agrees(self) -> bool:
        return abs(self.computed - self.oracle) <= 1e-8 * max(1.0, self.oracle)


@dataclass
class TableComparison:
    table_id: int
    cells: list[TableCell]

    @property
    def passed_count(self) -> int:
        return sum(c.passed for c in self.cells)

    def discrepancies(self) -> list[str]:
        """One line per failing cell, with the oracle cross-check."""
        out = []
        for c in self.cells:
            if c.passed:
                continue
            out.append(
                f"{c.case} N={c.N}: tabulated {c.reference:g}, computed {c.computed:.6f} "
                f"(oracle {c.oracle:.6f}, {'agrees' if c.oracle_agrees else 'DISAGREES'}), "
                f"difference {c.difference:.4f}; particle-hole partner N={c.partner_N} has {c.partner:.6f}"
            )
        return out


def reproduce_table(table_id: int, dim_cap: int = DEFAULT_DIM_CAP) -> TableComparison:
    """Compare the most-bound level per ``N`` with a tabulated column set.

    Each cell carries the Bethe value, the oracle value and the oracle value
    of the particle-hole partner sector ``Omega_total + 1 - N`` (whose
    nonzero levels coincide with those of ``N``).
    """
    if table_id not in TABLES:
        raise ValueError(f"unknown table {table_id}; choose from {sorted(TABLES)}")
    cells = []
    for case, column in TABLES[table_id].items():
        model = builtin_model(case)
        for N, ref in enumerate(column):
            oracle = diagonalize_sector(model, N, dim_cap).h_max if N > 0 else 0.0
            oracle = _clean(oracle, oracle)
            partner_N = model.omega_total + 1 - N
            partner = diagonalize_sector(model, partner_N, dim_cap).h_max if 0 < partner_N <= model.omega_total else 0.0
            if N == 0:
                computed, source = 0.0, "vacuum"
            else:
                rs = solve_lowest(model, N, dim_cap=dim_cap)
                computed, source = rs.h, rs.strategy
            cells.append(TableCell(case, N, computed, oracle, ref, partner_N, partner, source))
    return TableComparison(table_id=table_id, cells=cells)
