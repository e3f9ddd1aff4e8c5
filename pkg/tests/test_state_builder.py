"""Collective pair operators and their expansion into the occupation basis."""

from __future__ import annotations

import math

import numpy as np
import pytest

from genpair.errors import PoleProximity, ZeroState
from genpair.model import builtin_model, validate_model
from genpair.quasispin_oracle import plus_block
from genpair.state_builder import (
    CollectivePair,
    coeffs_from_w,
    collective_coeffs,
    expand_product,
    hamiltonian_residual,
    kernel_residual,
    state_from_roots,
    verify_eigenpair,
)

FIG1 = builtin_model("fig1")


class TestCoefficients:
    def test_origin_is_s0(self):
        assert np.allclose(collective_coeffs(FIG1, 0.0).as_array(), FIG1.c)

    def test_infinity_is_inverse_amplitudes(self):
        assert np.allclose(collective_coeffs(FIG1, complex(math.inf, 0)).as_array(), 1.0 / FIG1.c)

    @pytest.mark.parametrize("x", [0.5, -3.0, 2.0 + 1.0j, 7.5])
    def test_inverse_variable_is_proportional(self, x):
        direct = collective_coeffs(FIG1, x).as_array()
        inverse = coeffs_from_w(FIG1, 1.0 / x).as_array()
        ratio = inverse / direct
        assert np.allclose(ratio, ratio[0])

    def test_w_zero_matches_infinity(self):
        assert np.allclose(coeffs_from_w(FIG1, 0.0).as_array(), 1.0 / FIG1.c)

    def test_pole(self):
        with pytest.raises(PoleProximity):
            collective_coeffs(FIG1, 1.0 / 0.6)
        with pytest.raises(PoleProximity):
            coeffs_from_w(FIG1, 0.3)


class TestExpansion:
    def test_single_pair_is_raising_column(self):
        state = expand_product(FIG1, [collective_coeffs(FIG1, 0.0)])
        column = plus_block(FIG1, 0, 0)[:, 0]
        assert np.allclose(state.amplitudes, column / np.linalg.norm(column))

    def test_two_pairs_match_matrix_product(self):
        x = 0.7
        a = collective_coeffs(FIG1, x).as_array()
        state = expand_product(FIG1, [collective_coeffs(FIG1, 0.0), collective_coeffs(FIG1, x)])
        # S+(x) = sum_j a_j S+(j) applied to the vacuum, then S+_0
        raise_x = sum(a[j] * _shell_raising(FIG1, 0, j) for j in range(FIG1.p))
        v = plus_block(FIG1, 1, 0) @ raise_x[:, 0]
        assert np.allclose(state.amplitudes, v / np.linalg.norm(v))

    def test_order_independent(self):
        xs = [0.3, -1.2, 2.2]
        one = state_from_roots(FIG1, xs, include_s0=True)
        two = state_from_roots(FIG1, xs[::-1], include_s0=True)
        assert np.allclose(one.amplitudes, two.amplitudes)

    def test_normalized(self):
        state = state_from_roots(FIG1, [0.4, 5.0], include_s0=False)
        assert np.linalg.norm(state.amplitudes) == pytest.approx(1.0, abs=1e-14)

    def test_pauli_blocked(self):
        single_shell = CollectivePair(a=(1.0, 0.0, 0.0))
        with pytest.raises(ZeroState):
            expand_product(FIG1, [single_shell, single_shell])

    def test_over_capacity(self):
        with pytest.raises(ZeroState):
            expand_product(FIG1, [collective_coeffs(FIG1, 0.0)] * 7)

    def test_full_sector_unique_state(self):
        state = state_from_roots(FIG1, [0.1, 0.2, 0.3, 0.4, 0.5, 0.6], include_s0=False)
        assert state.amplitudes.shape == (1,)


class TestVerification:
    def test_one_pair_eigenstate(self):
        state = state_from_roots(FIG1, [], include_s0=True)
        check = verify_eigenpair(FIG1, state, 2.5)
        assert check.residual < 1e-14
        assert check.overlap == pytest.approx(1.0, abs=1e-14)
        assert check.nearest_h == pytest.approx(2.5)

    def test_wrong_energy_has_residual(self):
        state = state_from_roots(FIG1, [], include_s0=True)
        assert hamiltonian_residual(FIG1, state, 2.0) == pytest.approx(0.5, abs=1e-12)

    def test_zero_mode_one_pair(self):
        # root of sum_j Omega_j c_j^2 / (1 - x c_j^2) = 0 between the poles 1/0.3 and 1/0.1
        g = lambda x: sum(o * c2 / (1 - x * c2) for o, c2 in zip(FIG1.omegas, FIG1.c_squared))
        lo, hi = 1 / 0.3 + 1e-9, 10 - 1e-9
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            lo, hi = (mid, hi) if g(mid) * g(lo) > 0 else (lo, mid)
        state = state_from_roots(FIG1, [0.5 * (lo + hi)], include_s0=False)
        assert kernel_residual(FIG1, state) < 1e-12

    def test_kernel_residual_of_collective_pair(self):
        assert kernel_residual(FIG1, state_from_roots(FIG1, [], include_s0=True)) == pytest.approx(math.sqrt(2.5))

    def test_two_shell_model(self):
        model = validate_model([{"label": "a", "omega": 1, "c_squared": 0.4}, {"label": "b", "omega": 1, "c_squared": 0.6}])
        state = state_from_roots(model, [], include_s0=True)
        assert verify_eigenpair(model, state, 1.0).residual < 1e-14


def _shell_raising(model, N, j):
    """``S+(j)`` from sector ``N`` to ``N+1`` in the orthonormal basis (via a one-hot model amplitude)."""
    from genpair.pair_basis import enumerate_basis

    lower, upper = enumerate_basis(model, N), enumerate_basis(model, N + 1)
    out = np.zeros((upper.dim, lower.dim))
    for col, k in enumerate(lower.states):
        if k[j] < model.omegas[j]:
            target = k[:j] + (k[j] + 1,) + k[j + 1 :]
            out[upper.index[target], col] = math.sqrt((k[j] + 1) * (model.omegas[j] - k[j]))
    return out
