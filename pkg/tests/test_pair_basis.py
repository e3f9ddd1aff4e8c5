"""Occupation basis enumeration, norms and raising tables."""

from __future__ import annotations

import math

import numpy as np
import pytest

from genpair.model import BUILTIN_NAMES, builtin_model
from genpair.pair_basis import (
    dimension_bound,
    enumerate_basis,
    norm_squared,
    norm_squared_array,
    raise_index,
    raise_indices,
)

# sector dimensions, counted by hand for the three-shell models (Omega = 1, 2, 3)
THREE_SHELL_DIMS = [1, 3, 5, 6, 5, 3, 1]


class TestEnumeration:
    @pytest.mark.parametrize("N,dim", list(enumerate(THREE_SHELL_DIMS)))
    def test_three_shell_dims(self, N, dim):
        assert enumerate_basis(builtin_model("fig1"), N).dim == dim

    def test_lexicographic(self):
        basis = enumerate_basis(builtin_model("fig1"), 2)
        assert basis.states == ((0, 0, 2), (0, 1, 1), (0, 2, 0), (1, 0, 1), (1, 1, 0))
        assert list(basis.states) == sorted(basis.states)

    def test_index_inverse(self):
        basis = enumerate_basis(builtin_model("table2-shell5"), 5)
        assert all(basis.index[k] == i for i, k in enumerate(basis.states))

    @pytest.mark.parametrize("name", BUILTIN_NAMES)
    def test_caps_and_sum(self, name):
        model = builtin_model(name)
        for N in range(model.omega_total + 1):
            arr = enumerate_basis(model, N).as_array()
            assert np.all(arr.sum(axis=1) == N)
            assert np.all(arr <= model.omegas[None, :])

    @pytest.mark.parametrize("name", BUILTIN_NAMES)
    def test_total_is_fock_dimension(self, name):
        model = builtin_model(name)
        total = sum(enumerate_basis(model, N).dim for N in range(model.omega_total + 1))
        assert total == math.prod(int(o) + 1 for o in model.omegas)

    def test_beyond_capacity_is_empty(self):
        assert enumerate_basis(builtin_model("fig1"), 7).dim == 0

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            enumerate_basis(builtin_model("fig1"), -1)


class TestDimensionBound:
    @pytest.mark.parametrize("p,N,expected", [(3, 2, 6), (1, 5, 1), (4, 0, 1), (5, 3, 35)])
    def test_values(self, p, N, expected):
        assert dimension_bound(p, N) == expected

    @pytest.mark.parametrize("name", BUILTIN_NAMES)
    def test_never_exceeded(self, name):
        model = builtin_model(name)
        for N in range(model.omega_total + 1):
            assert enumerate_basis(model, N).dim <= dimension_bound(model.p, N)

    def test_invalid(self):
        with pytest.raises(ValueError):
            dimension_bound(0, 1)


class TestNorms:
    @pytest.mark.parametrize("occ,expected", [((0, 0, 0), 1.0), ((1, 0, 0), 1.0), ((0, 2, 0), 4.0), ((0, 0, 3), 36.0), ((1, 1, 2), 2 * 12.0)])
    def test_fig1_values(self, occ, expected):
        # shell factor k! * Omega! / (Omega - k)!
        assert norm_squared(occ, builtin_model("fig1")) == expected

    def test_matches_factorials(self):
        model = builtin_model("table2-shell6")
        basis = enumerate_basis(model, 8)
        expected = [
            math.prod(math.factorial(k) * math.perm(int(o), k) for k, o in zip(occ, model.omegas)) for occ in basis.states
        ]
        assert np.allclose(norm_squared_array(basis, model), expected, rtol=1e-14)

    def test_pauli_violation(self):
        with pytest.raises(ValueError):
            norm_squared((2, 0, 0), builtin_model("fig1"))


class TestRaising:
    def test_raise_index(self):
        model = builtin_model("fig1")
        lower, upper = enumerate_basis(model, 1), enumerate_basis(model, 2)
        idx = raise_index(lower, upper, 0)
        # (0,0,1)->(1,0,1), (0,1,0)->(1,1,0), (1,0,0) blocked
        assert [upper.states[i] if i >= 0 else None for i in idx] == [(1, 0, 1), (1, 1, 0), None]

    def test_table_shape_and_readonly(self):
        model = builtin_model("table1a")
        table = raise_indices(model, 3)
        assert table.shape == (3, enumerate_basis(model, 3).dim)
        with pytest.raises(ValueError):
            table[0, 0] = 7
