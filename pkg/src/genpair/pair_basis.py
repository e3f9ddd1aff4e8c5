"""Seniority-zero pair basis with Pauli caps.

A basis state is an occupation tuple ``k`` giving the number of pairs in
each shell, with ``0 <= k_j <= Omega_j``. States of a sector with ``N``
pairs are listed in lexicographic order so that every matrix and vector
built on top of them is reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.typing import NDArray

from .model import ModelSpace

Occupation = tuple[int, ...]


@dataclass(frozen=True)
class PairBasis:
    """Ordered occupations of the ``N``-pair sector."""

    N: int
    states: tuple[Occupation, ...]
    index: dict[Occupation, int] = field(compare=False, repr=False)

    @property
    def dim(self) -> int:
        return len(self.states)

    def as_array(self) -> NDArray[np.int64]:
        """Occupations as a ``(dim, p)`` integer array."""
        if not self.states:
            return np.zeros((0, 0), dtype=np.int64)
        return np.array(self.states, dtype=np.int64)


def _occupations(caps: tuple[int, ...], N: int) -> list[Occupation]:
    """All ``k`` with ``sum k = N`` and ``k_j <= caps[j]``, lexicographically."""
    out: list[Occupation] = []
    p = len(caps)
    # suffix capacity lets us prune branches that cannot reach N
    room = [0] * (p + 1)
    for j in range(p - 1, -1, -1):
        room[j] = room[j + 1] + caps[j]

    def rec(j: int, left: int, prefix: list[int]) -> None:
        if j == p:
            if left == 0:
                out.append(tuple(prefix))
            return
        lo = max(0, left - room[j + 1])
        for k in range(lo, min(caps[j], left) + 1):
            prefix.append(k)
            rec(j + 1, left - k, prefix)
            prefix.pop()

    rec(0, N, [])
    return out


@lru_cache(maxsize=256)
def _cached_basis(caps: tuple[int, ...], N: int) -> PairBasis:
    states = tuple(_occupations(caps, N)) if 0 <= N <= sum(caps) else ()
    return PairBasis(N=N, states=states, index={k: i for i, k in enumerate(states)})


def enumerate_basis(model: ModelSpace, N: int) -> PairBasis:
    """Return the ``N``-pair sector basis; empty when ``N > Omega_total``."""
    if N < 0:
        raise ValueError(f"pair number must be non-negative, got {N}")
    return _cached_basis(tuple(int(o) for o in model.omegas), int(N))


def dimension_bound(p: int, N: int) -> int:
    """Number of occupations without Pauli caps, ``binomial(p + N - 1, N)``."""
    if p < 1 or N < 0:
        raise ValueError(f"need p >= 1 and N >= 0, got p={p}, N={N}")
    return math.comb(p + N - 1, N)


def norm_squared(occ: Occupation, model: ModelSpace) -> float:
    """Squared norm of ``prod_j S+(j)^k_j |0>``.

    Each shell contributes ``k! * Omega!/(Omega - k)!``, accumulated as a
    running product of the ladder factors ``i * (Omega - i + 1)``.
    """
    value = 1.0
    for k, omega in zip(occ, model.omegas):
        if k < 0 or k > omega:
            raise ValueError(f"occupation {occ} violates the Pauli cap of its shell")
        for i in range(1, int(k) + 1):
            value *= i * (int(omega) - i + 1)
    return value


def norm_squared_array(basis: PairBasis, model: ModelSpace) -> NDArray[np.float64]:
    """``norm_squared`` for every state of ``basis``."""
    return np.array([norm_squared(k, model) for k in basis.states], dtype=np.float64)


def raise_index(lower: PairBasis, upper: PairBasis, j: int) -> NDArray[np.int64]:
    """Index in ``upper`` of ``k + e_j`` for every ``k`` in ``lower``; -1 if Pauli-forbidden."""
    out = np.full(lower.dim, -1, dtype=np.int64)
    for i, k in enumerate(lower.states):
        target = k[:j] + (k[j] + 1,) + k[j + 1 :]
        out[i] = upper.index.get(target, -1)
    return out


@lru_cache(maxsize=256)
def _raise_table(caps: tuple[int, ...], N: int) -> NDArray[np.int64]:
    lower, upper = _cached_basis(caps, N), _cached_basis(caps, N + 1)
    table = np.stack([raise_index(lower, upper, j) for j in range(len(caps))]) if lower.dim else np.zeros(
        (len(caps), 0), dtype=np.int64
    )
    table.setflags(write=False)
    return table


def raise_indices(model: ModelSpace, N: int) -> NDArray[np.int64]:
    """``(p, dim(N))`` table of :func:`raise_index` for every shell."""
    return _raise_table(tuple(int(o) for o in model.omegas), int(N))
