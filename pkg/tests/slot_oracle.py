"""Independent reference spectra built in the pair-slot (m-substate) space.

Each shell with capacity ``Omega`` is split into ``Omega`` slots, one per
time-reversed pair ``(m, -m)`` with ``m > 0``. A slot is empty or holds one
pair, and pair operators on different slots commute, so a configuration is
a bit mask. The collective lowering operator is ``sum_s c_(j(s)) b_s``.

Seniority-zero states are the slot configurations symmetrized within every
shell. Projecting the slot-space Hamiltonian onto them gives the sector
spectrum without any of the package's occupation-basis matrix elements.
"""

from __future__ import annotations

import itertools
import math

import numpy as np
from numpy.typing import NDArray


def slot_layout(omegas: list[int]) -> list[int]:
    """Shell index of every slot."""
    return [j for j, om in enumerate(omegas) for _ in range(om)]


def slot_hamiltonian(omegas: list[int], c: list[float], N: int) -> tuple[NDArray[np.float64], dict[int, int]]:
    """``S+_0 S-_0`` on all ``N``-pair slot configurations."""
    shell_of = slot_layout(omegas)
    n_slots = len(shell_of)
    configs = [sum(1 << s for s in occ) for occ in itertools.combinations(range(n_slots), N)]
    index = {cfg: i for i, cfg in enumerate(configs)}
    H = np.zeros((len(configs), len(configs)))
    for col, cfg in enumerate(configs):
        for s in range(n_slots):
            if not cfg >> s & 1:
                continue
            lowered = cfg & ~(1 << s)
            for t in range(n_slots):
                if lowered >> t & 1:
                    continue
                H[index[lowered | 1 << t], col] += c[shell_of[s]] * c[shell_of[t]]
    return H, index


def symmetric_isometry(omegas: list[int], N: int, index: dict[int, int]) -> NDArray[np.float64]:
    """Columns: normalized shell-symmetric states, one per occupation vector."""
    shell_slots: list[list[int]] = []
    start = 0
    for om in omegas:
        shell_slots.append(list(range(start, start + om)))
        start += om
    columns = []
    for occ in itertools.product(*(range(om + 1) for om in omegas)):
        if sum(occ) != N:
            continue
        vec = np.zeros(len(index))
        choices = [itertools.combinations(slots, k) for slots, k in zip(shell_slots, occ)]
        for pick in itertools.product(*choices):
            cfg = sum(1 << s for group in pick for s in group)
            vec[index[cfg]] = 1.0
        columns.append(vec / math.sqrt(vec.sum()))
    return np.array(columns).T


def seniority_zero_spectrum(omegas: list[int], c_squared: list[float], N: int) -> NDArray[np.float64]:
    """Eigenvalues ``h`` of sector ``N``, descending."""
    c = [math.sqrt(x) for x in c_squared]
    H, index = slot_hamiltonian(omegas, c, N)
    V = symmetric_isometry(omegas, N, index)
    values = np.linalg.eigvalsh(V.T @ H @ V)
    return values[::-1]


def slot_raising(omegas: list[int], c_squared: list[float], m: int, N: int) -> NDArray[np.float64]:
    """``sum_s c^(2m+1) b+_s`` from sector ``N`` to ``N + 1``, projected on the symmetric states."""
    shell_of = slot_layout(omegas)
    n_slots = len(shell_of)
    amp = [math.sqrt(c_squared[shell_of[s]]) ** (2 * m + 1) for s in range(n_slots)]
    lower = {sum(1 << s for s in occ): i for i, occ in enumerate(itertools.combinations(range(n_slots), N))}
    upper = {sum(1 << s for s in occ): i for i, occ in enumerate(itertools.combinations(range(n_slots), N + 1))}
    P = np.zeros((len(upper), len(lower)))
    for cfg, col in lower.items():
        for s in range(n_slots):
            if not cfg >> s & 1:
                P[upper[cfg | 1 << s], col] += amp[s]
    return symmetric_isometry(omegas, N + 1, upper).T @ P @ symmetric_isometry(omegas, N, lower)
