"""Exact diagonalization of the pairing Hamiltonian on the pair Fock space.

The generators

    S0_m = sum_j c_j^(2m)   S0(j),      S+-_m = sum_j c_j^(2m+1) S+-(j)

are realized as matrices over the orthonormal occupation basis, stored as
one block per pair-number sector. The Hamiltonian ``h = S+_0 S-_0`` is the
dimensionless form of ``H = -|G| S+_0 S-_0``; its spectrum is non-negative.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Literal

import numpy as np
import scipy.linalg
from numpy.typing import NDArray

from .errors import DimensionCapExceeded, EigensolveFailure
from .model import ModelSpace, lambda_m
from .pair_basis import PairBasis, enumerate_basis, raise_index

DEFAULT_DIM_CAP = 20_000
ZERO_REL_THRESHOLD = 1e-9

Mu = Literal["plus", "minus", "zero"]


def fock_dimension(model: ModelSpace) -> int:
    """Total dimension of the pair Fock space, ``prod_j (Omega_j + 1)``."""
    out = 1
    for o in model.omegas:
        out *= int(o) + 1
    return out


def zero_threshold(h_max: float) -> float:
    """Levels with ``|h|`` below this value count as zero-energy."""
    return ZERO_REL_THRESHOLD * max(1.0, abs(h_max))


@dataclass(frozen=True)
class GeneratorMatrix:
    """A generator stored as blocks keyed by the source sector ``N``.

    ``blocks[N]`` maps sector ``N`` to ``N+1`` (plus), ``N-1`` (minus) or
    ``N`` (zero).
    """

    mu: Mu
    m: int
    blocks: dict[int, NDArray[np.float64]] = field(repr=False)
    sector_dims: tuple[int, ...] = field(repr=False)

    def target(self, N: int) -> int:
        return N + {"plus": 1, "minus": -1, "zero": 0}[self.mu]

    def dense(self) -> NDArray[np.float64]:
        """Assemble the matrix on the full Fock space (sectors in increasing N)."""
        offsets = np.concatenate([[0], np.cumsum(self.sector_dims)])
        total = int(offsets[-1])
        out = np.zeros((total, total))
        for N, block in self.blocks.items():
            M = self.target(N)
            if 0 <= M < len(self.sector_dims):
                out[offsets[M] : offsets[M + 1], offsets[N] : offsets[N + 1]] = block
        return out


def _check_cap(dim: int, cap: int, what: str) -> None:
    if dim > cap:
        raise DimensionCapExceeded(f"{what} dimension {dim} exceeds cap {cap}")


@lru_cache(maxsize=512)
def _plus_block(model: ModelSpace, N: int, m: int) -> NDArray[np.float64]:
    """``S+_m`` restricted to sector ``N`` -> ``N+1``."""
    lower, upper = enumerate_basis(model, N), enumerate_basis(model, N + 1)
    block = np.zeros((upper.dim, lower.dim))
    if lower.dim == 0 or upper.dim == 0:
        return block
    occ = lower.as_array()
    cols = np.arange(lower.dim)
    for j, shell in enumerate(model.shells):
        rows = raise_index(lower, upper, j)
        ok = rows >= 0
        k = occ[ok, j]
        amp = np.sqrt((k + 1) * (shell.omega - k))
        block[rows[ok], cols[ok]] += shell.c ** (2 * m + 1) * amp
    block.setflags(write=False)
    return block


@lru_cache(maxsize=512)
def _zero_diag(model: ModelSpace, N: int, m: int) -> NDArray[np.float64]:
    """Diagonal of ``S0_m`` on sector ``N``."""
    basis = enumerate_basis(model, N)
    if basis.dim == 0:
        return np.zeros(0)
    occ = basis.as_array().astype(np.float64)
    weights = model.c_squared ** m
    diag = (occ - 0.5 * model.omegas[None, :]) @ weights
    diag.setflags(write=False)
    return diag


def plus_block(model: ModelSpace, N: int, m: int = 0) -> NDArray[np.float64]:
    return _plus_block(model, N, m)


def minus_block(model: ModelSpace, N: int, m: int = 0) -> NDArray[np.float64]:
    """``S-_m`` restricted to sector ``N`` -> ``N-1`` (transpose of the raising block)."""
    if N == 0:
        return np.zeros((0, enumerate_basis(model, 0).dim))
    return _plus_block(model, N - 1, m).T


def zero_block(model: ModelSpace, N: int, m: int = 0) -> NDArray[np.float64]:
    return np.diag(_zero_diag(model, N, m))


def generator_matrix(model: ModelSpace, mu: Mu, m: int, cap: int = DEFAULT_DIM_CAP) -> GeneratorMatrix:
    """Sector-blocked matrix of ``S+_m``, ``S-_m`` or ``S0_m``."""
    _check_cap(fock_dimension(model), cap, "Fock space")
    dims = tuple(enumerate_basis(model, N).dim for N in range(model.omega_total + 1))
    blocks: dict[int, NDArray[np.float64]] = {}
    for N in range(model.omega_total + 1):
        if mu == "plus":
            if N < model.omega_total:
                blocks[N] = plus_block(model, N, m)
        elif mu == "minus":
            if N > 0:
                blocks[N] = minus_block(model, N, m)
        elif mu == "zero":
            blocks[N] = zero_block(model, N, m)
        else:
            raise ValueError(f"mu must be plus, minus or zero, got {mu!r}")
    return GeneratorMatrix(mu=mu, m=m, blocks=blocks, sector_dims=dims)


@dataclass
class CommutatorReport:
    """Largest deviations found by :func:`commutator_check`.

    ``max_deviation`` is the largest absolute entry of a commutator minus
    its expected value. ``max_scaled_deviation`` divides each entry by the
    size of the products that produced it, which is the quantity bounded
    by floating-point roundoff when amplitudes are small.
    """

    m_range: tuple[int, int]
    max_deviation: float
    max_scaled_deviation: float
    worst: str
    vacuum_deviation: float
    checked: int

    def passed(self, tol: float = 1e-12) -> bool:
        return self.max_scaled_deviation <= tol and self.vacuum_deviation <= tol


def commutator_check(model: ModelSpace, m_range: tuple[int, int], cap: int = DEFAULT_DIM_CAP) -> CommutatorReport:
    """Check the generator algebra and the vacuum (lowest-weight) conditions.

    For every ``m, n`` in the closed interval ``m_range`` and every sector:

    * ``[S+_m, S-_n] = 2 S0_(m+n+1)``
    * ``[S0_m, S+_n] = +S+_(m+n)`` and ``[S0_m, S-_n] = -S-_(m+n)``

    and on the vacuum ``S-_m |0> = 0``, ``S0_m |0> = Lambda_m |0>``.
    """
    lo, hi = m_range
    if lo > hi:
        raise ValueError(f"empty m range {m_range}")
    _check_cap(fock_dimension(model), cap, "Fock space")
    top = model.omega_total
    worst_abs, worst_scaled, worst = 0.0, 0.0, "none"
    checked = 0

    def record(diff: NDArray[np.float64], scale: float, label: str) -> None:
        nonlocal worst_abs, worst_scaled, worst, checked
        checked += 1
        if diff.size == 0:
            return
        dev = float(np.max(np.abs(diff)))
        scaled = dev / max(1.0, scale)
        worst_abs = max(worst_abs, dev)
        if scaled > worst_scaled:
            worst_scaled, worst = scaled, label

    def mat_scale(*mats: NDArray[np.float64]) -> float:
        return max((float(np.max(np.abs(a))) if a.size else 0.0) for a in mats)

    for m in range(lo, hi + 1):
        for n in range(lo, hi + 1):
            for N in range(top + 1):
                # [S+_m, S-_n] acting on sector N
                dimN = enumerate_basis(model, N).dim
                a = plus_block(model, N - 1, m) @ minus_block(model, N, n) if N > 0 else np.zeros((dimN, dimN))
                b = minus_block(model, N + 1, n) @ plus_block(model, N, m) if N < top else np.zeros((dimN, dimN))
                z = zero_block(model, N, m + n + 1)
                record(a - b - 2.0 * z, mat_scale(a, b, z), f"[S+_{m},S-_{n}] N={N}")
                z_m = zero_block(model, N, m)
                if N < top:
                    p = plus_block(model, N, n)
                    lhs1, lhs2 = zero_block(model, N + 1, m) @ p, p @ z_m
                    expected = plus_block(model, N, m + n)
                    record(lhs1 - lhs2 - expected, mat_scale(lhs1, lhs2, expected), f"[S0_{m},S+_{n}] N={N}")
                if N > 0:
                    q = minus_block(model, N, n)
                    lhs1, lhs2 = zero_block(model, N - 1, m) @ q, q @ z_m
                    expected = minus_block(model, N, m + n)
                    record(lhs1 - lhs2 + expected, mat_scale(lhs1, lhs2, expected), f"[S0_{m},S-_{n}] N={N}")

    vac = 0.0
    for m in range(lo, hi + 1):
        # the vacuum column of S-_m is empty by construction: no sector below N = 0
        lam = lambda_m(model, m)
        vac = max(vac, abs(float(_zero_diag(model, 0, m)[0]) - lam) / max(1.0, abs(lam)))
        checked += 1
    return CommutatorReport(
        m_range=(lo, hi),
        max_deviation=worst_abs,
        max_scaled_deviation=worst_scaled,
        worst=worst,
        vacuum_deviation=vac,
        checked=checked,
    )


@dataclass(frozen=True)
class SectorMatrix:
    """Dense matrix of ``S+_0 S-_0`` on the ``N``-pair sector."""

    N: int
    entries: NDArray[np.float64] = field(repr=False)
    basis: PairBasis = field(repr=False)


@dataclass(frozen=True)
class OracleEigenpairs:
    """Eigenvalues (descending) and orthonormal eigenvectors of one sector."""

    N: int
    h_values: NDArray[np.float64]
    vectors: NDArray[np.float64] = field(repr=False)

    @property
    def h_max(self) -> float:
        return float(self.h_values[0]) if self.h_values.size else 0.0

    def nonzero(self) -> NDArray[np.float64]:
        return self.h_values[np.abs(self.h_values) >= zero_threshold(self.h_max)]


def build_hamiltonian(model: ModelSpace, N: int, cap: int = DEFAULT_DIM_CAP) -> SectorMatrix:
    """Matrix of ``S+_0 S-_0`` on the ``N``-pair sector."""
    basis = enumerate_basis(model, N)
    if basis.dim == 0:
        raise ValueError(f"sector N={N} is empty for this model")
    _check_cap(basis.dim, cap, f"sector N={N}")
    if N == 0:
        return SectorMatrix(N=0, entries=np.zeros((1, 1)), basis=basis)
    lowering = minus_block(model, N, 0)
    h = lowering.T @ lowering
    h = 0.5 * (h + h.T)
    return SectorMatrix(N=N, entries=h, basis=basis)


@lru_cache(maxsize=128)
def _diagonalize(model: ModelSpace, N: int, cap: int) -> OracleEigenpairs:
    mat = build_hamiltonian(model, N, cap)
    try:
        values, vectors = scipy.linalg.eigh(mat.entries)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise EigensolveFailure(f"eigensolver failed for N={N}: {exc}") from exc
    order = np.argsort(-values, kind="stable")
    values, vectors = values[order], vectors[:, order]
    values.setflags(write=False)
    vectors.setflags(write=False)
    return OracleEigenpairs(N=N, h_values=values, vectors=vectors)


def diagonalize_sector(model: ModelSpace, N: int, cap: int = DEFAULT_DIM_CAP) -> OracleEigenpairs:
    """Full eigendecomposition of the sector matrix, ``h`` sorted descending."""
    return _diagonalize(model, N, cap)


def lowering_rank(model: ModelSpace, N: int) -> int:
    """Numerical rank of ``S-_0`` from sector ``N`` to ``N - 1``."""
    if N == 0:
        return 0
    block = minus_block(model, N, 0)
    if block.size == 0:
        return 0
    s = np.linalg.svd(block, compute_uv=False)
    s_max = float(s[0]) if s.size else 0.0
    return int(np.sum(s * s >= zero_threshold(s_max * s_max)))


def zero_multiplicity(model: ModelSpace, N: int) -> int:
    """Dimension of the zero-energy eigenspace of sector ``N``.

    This is the kernel dimension of ``S-_0``, ``dim(N) - rank``. The vacuum
    sector counts its single state.
    """
    dim = enumerate_basis(model, N).dim
    if dim == 0:
        raise ValueError(f"sector N={N} is empty for this model")
    return dim - lowering_rank(model, N)
