"""Eigenvectors from products of collective pair operators.

A root ``x`` defines the collective pair

    S+(x) = sum_j c_j / (1 - c_j^2 x) S+(j).

``x = 0`` gives ``S+_0`` itself. A root at infinity stands for the limit
``x -> inf`` after rescaling by ``-x``, i.e. the operator ``S+_(-1)`` with
amplitudes ``1/c_j``. Products of such operators acting on the vacuum are
expanded over the orthonormal occupation basis.
"""

from __future__ import annotations

import cmath
import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .errors import PoleProximity, ZeroState
from .model import ModelSpace
from .pair_basis import enumerate_basis, norm_squared_array, raise_indices
from .quasispin_oracle import (
    DEFAULT_DIM_CAP,
    build_hamiltonian,
    diagonalize_sector,
    minus_block,
)

POLE_RADIUS = 1e-8
# relative size below which an expansion counts as the zero vector
ZERO_STATE_REL = 1e-10


@dataclass(frozen=True)
class CollectivePair:
    """Amplitudes ``a_j`` of one collective pair operator."""

    a: tuple[complex, ...]
    x: complex = 0.0

    def as_array(self) -> NDArray[np.complex128]:
        return np.array(self.a, dtype=np.complex128)


@dataclass(frozen=True)
class ExpandedState:
    """Normalized amplitudes over the ``N``-pair occupation basis."""

    N: int
    amplitudes: NDArray[np.complex128] = field(repr=False)
    norm: float


def _is_infinite(x: complex) -> bool:
    return cmath.isinf(complex(x))


def collective_coeffs(model: ModelSpace, x: complex) -> CollectivePair:
    """Amplitudes ``c_j/(1 - c_j^2 x)``; for infinite ``x`` the rescaled ``1/c_j``."""
    c, c2 = model.c, model.c_squared
    if _is_infinite(x):
        return CollectivePair(a=tuple(complex(v) for v in 1.0 / c), x=complex(math.inf, 0.0))
    x = complex(x)
    denom = 1.0 - c2 * x
    if np.any(np.abs(denom) <= POLE_RADIUS):
        raise PoleProximity(f"root x={x} is within {POLE_RADIUS} of a pole 1/c_j^2")
    return CollectivePair(a=tuple(complex(v) for v in c / denom), x=x)


def coeffs_from_w(model: ModelSpace, w: complex) -> CollectivePair:
    """Collective pair for the inverse root ``w = 1/x``, rescaled to stay finite at ``w = 0``."""
    c, c2 = model.c, model.c_squared
    denom = c2 - complex(w)
    if np.any(np.abs(denom) <= POLE_RADIUS * np.maximum(1.0, c2)):
        raise PoleProximity(f"inverse root w={w} is within the exclusion radius of a pole c_j^2")
    x = complex(math.inf, 0.0) if w == 0 else 1.0 / complex(w)
    return CollectivePair(a=tuple(complex(v) for v in c / denom), x=x)


def expand_product(model: ModelSpace, factors: Sequence[CollectivePair]) -> ExpandedState:
    """Expand ``prod_r S+(a^(r)) |0>`` over the orthonormal basis.

    The coefficients on the unnormalized monomials ``prod_j S+(j)^k_j |0>``
    are accumulated factor by factor; monomials that exceed a Pauli cap are
    dropped. Multiplying by the monomial norms gives the amplitudes on the
    orthonormal basis, which are then normalized.
    """
    N = len(factors)
    if N > model.omega_total:
        raise ZeroState(f"{N} pairs exceed the capacity {model.omega_total}")
    coeff = np.ones(1, dtype=np.complex128)
    # the same recursion on magnitudes bounds the expansion without cancellations
    bound = np.ones(1)
    for r, factor in enumerate(factors):
        a = factor.as_array()
        dim_next = enumerate_basis(model, r + 1).dim
        nxt = np.zeros(dim_next, dtype=np.complex128)
        nxt_bound = np.zeros(dim_next)
        table = raise_indices(model, r)
        for j in range(model.p):
            target = table[j]
            ok = target >= 0
            np.add.at(nxt, target[ok], a[j] * coeff[ok])
            np.add.at(nxt_bound, target[ok], abs(a[j]) * bound[ok])
        coeff, bound = nxt, nxt_bound
    weights = np.sqrt(norm_squared_array(enumerate_basis(model, N), model))
    amps = coeff * weights
    norm = float(np.linalg.norm(amps))
    reference = float(np.linalg.norm(bound * weights))
    if not math.isfinite(norm) or norm <= ZERO_STATE_REL * reference or norm == 0.0:
        raise ZeroState("the collective pair product vanishes (Pauli-blocked)")
    return ExpandedState(N=N, amplitudes=amps / norm, norm=norm)


def state_from_roots(model: ModelSpace, roots: Sequence[complex], include_s0: bool) -> ExpandedState:
    """State built from roots ``x`` (infinite entries allowed), optionally with a leading ``S+_0``."""
    factors = [collective_coeffs(model, 0.0)] if include_s0 else []
    factors.extend(collective_coeffs(model, x) for x in roots)
    return expand_product(model, factors)


@dataclass(frozen=True)
class EigenCheck:
    """Result of :func:`verify_eigenpair`."""

    residual: float
    overlap: float
    nearest_h: float


def verify_eigenpair(
    model: ModelSpace, state: ExpandedState, h: float, cap: int = DEFAULT_DIM_CAP, with_overlap: bool = True
) -> EigenCheck:
    """Hamiltonian residual and overlap with the oracle eigenspace nearest ``h``.

    ``residual = |M v - h v| / |v|``; ``overlap`` is the squared norm of the
    projection of ``v`` onto the eigenspace whose eigenvalue is closest to
    ``h`` (degenerate eigenvalues grouped).
    """
    v = state.amplitudes
    vnorm = float(np.linalg.norm(v))
    mat = build_hamiltonian(model, state.N, cap).entries
    residual = float(np.linalg.norm(mat @ v - h * v)) / vnorm
    if not with_overlap:
        return EigenCheck(residual=residual, overlap=math.nan, nearest_h=math.nan)
    eig = diagonalize_sector(model, state.N, cap)
    values = eig.h_values
    i = int(np.argmin(np.abs(values - h)))
    group = np.abs(values - values[i]) <= 1e-8 * max(1.0, eig.h_max)
    proj = eig.vectors[:, group].T @ v
    overlap = float(np.vdot(proj, proj).real) / vnorm**2
    return EigenCheck(residual=residual, overlap=overlap, nearest_h=float(values[i]))


def kernel_residual(model: ModelSpace, state: ExpandedState) -> float:
    """``|S-_0 v| / |v|``; zero exactly for states annihilated by the pair lowering operator."""
    if state.N == 0:
        return 0.0
    v = state.amplitudes
    return float(np.linalg.norm(minus_block(model, state.N, 0) @ v)) / float(np.linalg.norm(v))


def hamiltonian_residual(model: ModelSpace, state: ExpandedState, h: float, cap: int = DEFAULT_DIM_CAP) -> float:
    return verify_eigenpair(model, state, h, cap, with_overlap=False).residual


__all__ = [
    "CollectivePair",
    "ExpandedState",
    "EigenCheck",
    "collective_coeffs",
    "coeffs_from_w",
    "expand_product",
    "state_from_roots",
    "verify_eigenpair",
    "kernel_residual",
    "hamiltonian_residual",
]
