"""Generator matrices, sector Hamiltonians and the exact-diagonalization oracle."""

from __future__ import annotations

import numpy as np
import pytest
from slot_oracle import seniority_zero_spectrum, slot_raising

from genpair.errors import DimensionCapExceeded
from genpair.model import BUILTIN_NAMES, builtin_model, lambda_m, validate_model
from genpair.pair_basis import enumerate_basis
from genpair.quasispin_oracle import (
    build_hamiltonian,
    commutator_check,
    diagonalize_sector,
    fock_dimension,
    generator_matrix,
    lowering_rank,
    minus_block,
    plus_block,
    zero_block,
    zero_multiplicity,
)

from conftest import SMALL_BUILTINS

# most-bound level per N from the pair-slot construction (tests/slot_oracle.py)
SLOT_LOWEST = {
    "fig1": (0.0, 2.5, 4.027140462381, 4.724028167112, 4.724028167112, 4.027140462381, 2.5),
    "table1a": (0.0, 2.6, 4.083630430472, 4.735280704838, 4.735280704838, 4.083630430472, 2.6),
    "table1b": (0.0, 2.5, 3.866436325195, 4.441324390896, 4.441324390896, 3.866436325195, 2.5),
    "table1c": (0.0, 1.9, 2.858113469728, 3.277701895362, 3.277701895362, 2.858113469728, 1.9),
    "table1d": (0.0, 1.4, 2.136423150583, 2.480733903227, 2.480733903227, 2.136423150583, 1.4),
    "table2-shell5": (
        0.0, 2.86, 5.192097766568, 7.0008093267, 8.289898879641, 9.062187957472,
        9.319421030706, 9.062187957472, 8.289898879641, 7.0008093267, 5.192097766568, 2.86,
    ),
}

FIG1_FULL = {
    2: (4.027140462381, 2.260595087028, 1.71226445059, 0.0, 0.0),
    3: (4.724028167112, 3.398501600976, 2.371941500465, 1.452117552947, 0.9534111785, 0.0),
}


def _params(model):
    return [int(o) for o in model.omegas], [float(x) for x in model.c_squared]


class TestHamiltonian:
    @pytest.mark.parametrize("name", sorted(SLOT_LOWEST))
    def test_lowest_matches_frozen_slot_values(self, name):
        model = builtin_model(name)
        for N, expected in enumerate(SLOT_LOWEST[name]):
            assert diagonalize_sector(model, N).h_max == pytest.approx(expected, abs=1e-9)

    @pytest.mark.parametrize("N", [2, 3])
    def test_fig1_full_spectrum(self, N):
        values = diagonalize_sector(builtin_model("fig1"), N).h_values
        assert np.allclose(values, FIG1_FULL[N], atol=1e-9)

    @pytest.mark.parametrize("name", SMALL_BUILTINS)
    def test_every_sector_matches_slot_construction(self, name):
        model = builtin_model(name)
        omegas, c2 = _params(model)
        for N in range(model.omega_total + 1):
            ours = diagonalize_sector(model, N).h_values
            assert np.allclose(ours, seniority_zero_spectrum(omegas, c2, N), atol=1e-10)

    @pytest.mark.parametrize("N", [1, 2, 3])
    def test_shell6_low_sectors_match_slot_construction(self, N):
        model = builtin_model("table2-shell6")
        omegas, c2 = _params(model)
        assert np.allclose(diagonalize_sector(model, N).h_values, seniority_zero_spectrum(omegas, c2, N), atol=1e-10)

    @pytest.mark.parametrize("name", BUILTIN_NAMES)
    def test_symmetric_psd(self, name):
        model = builtin_model(name)
        for N in range(model.omega_total + 1):
            mat = build_hamiltonian(model, N).entries
            assert np.array_equal(mat, mat.T)
            assert diagonalize_sector(model, N).h_values.min() >= -1e-10

    def test_vacuum_sector(self):
        mat = build_hamiltonian(builtin_model("fig1"), 0)
        assert mat.entries.shape == (1, 1) and mat.entries[0, 0] == 0.0

    def test_empty_sector_rejected(self):
        with pytest.raises(ValueError):
            build_hamiltonian(builtin_model("fig1"), 7)

    def test_cap(self):
        with pytest.raises(DimensionCapExceeded):
            build_hamiltonian(builtin_model("table2-shell6"), 8, cap=100)

    def test_eigenvectors_orthonormal(self):
        eig = diagonalize_sector(builtin_model("table2-shell5"), 5)
        assert np.allclose(eig.vectors.T @ eig.vectors, np.eye(len(eig.h_values)), atol=1e-12)


class TestGenerators:
    @pytest.mark.parametrize("m", [-2, -1, 0, 1, 2])
    @pytest.mark.parametrize("name", ["fig1", "table1c", "table2-shell5"])
    def test_raising_matches_slot_operator(self, name, m):
        model = builtin_model(name)
        omegas, c2 = _params(model)
        for N in range(min(model.omega_total, 6)):
            assert np.allclose(plus_block(model, N, m), slot_raising(omegas, c2, m, N), atol=1e-12)

    def test_lowering_is_transpose(self):
        model = builtin_model("table1b")
        assert np.array_equal(minus_block(model, 3, 1), plus_block(model, 2, 1).T)

    @pytest.mark.parametrize("m", [-1, 0, 1, 2])
    def test_zero_on_vacuum(self, m):
        model = builtin_model("table2-shell5")
        assert zero_block(model, 0, m)[0, 0] == pytest.approx(lambda_m(model, m), rel=1e-14)

    def test_dense_assembly(self):
        model = builtin_model("fig1")
        plus = generator_matrix(model, "plus", 0).dense()
        minus = generator_matrix(model, "minus", 0).dense()
        assert plus.shape == (fock_dimension(model),) * 2
        assert np.array_equal(plus.T, minus)

    def test_bad_mu(self):
        with pytest.raises(ValueError):
            generator_matrix(builtin_model("fig1"), "up", 0)  # type: ignore[arg-type]


class TestCommutators:
    @pytest.mark.parametrize("name", BUILTIN_NAMES)
    def test_builtins_pass(self, name):
        report = commutator_check(builtin_model(name), (-2, 2))
        assert report.passed(1e-12), report
        assert report.vacuum_deviation <= 1e-14

    def test_counts_identities(self):
        report = commutator_check(builtin_model("fig1"), (0, 0))
        # 7 sectors: one [S+,S-] each, [S0,S+] for N<6, [S0,S-] for N>0, plus one vacuum check
        assert report.checked == 7 + 6 + 6 + 1

    def test_detects_broken_algebra(self, monkeypatch):
        import genpair.quasispin_oracle as qo

        model = builtin_model("fig1")
        original = qo.zero_block
        monkeypatch.setattr(qo, "zero_block", lambda mod, N, m: 1.01 * original(mod, N, m))
        assert not commutator_check(model, (0, 1)).passed(1e-12)

    def test_cap(self):
        big = validate_model([{"label": f"s{i}", "omega": 3, "c_squared": w} for i, w in enumerate(np.linspace(1, 2, 8) / np.linspace(1, 2, 8).sum())])
        with pytest.raises(DimensionCapExceeded):
            commutator_check(big, (0, 0), cap=1000)

    def test_empty_range(self):
        with pytest.raises(ValueError):
            commutator_check(builtin_model("fig1"), (1, 0))


class TestZeroModes:
    @pytest.mark.parametrize("N,expected", [(0, 1), (1, 2), (2, 2), (3, 1), (4, 0), (5, 0), (6, 0)])
    def test_fig1_multiplicities(self, N, expected):
        assert zero_multiplicity(builtin_model("fig1"), N) == expected

    @pytest.mark.parametrize("name", BUILTIN_NAMES)
    def test_rank_plus_kernel_is_dim(self, name):
        model = builtin_model(name)
        for N in range(1, model.omega_total + 1):
            dim = enumerate_basis(model, N).dim
            zeros = int(np.sum(np.abs(diagonalize_sector(model, N).h_values) < 1e-9 * max(1.0, diagonalize_sector(model, N).h_max)))
            assert lowering_rank(model, N) + zeros == dim
            assert zero_multiplicity(model, N) == zeros

    def test_vacuum_rank(self):
        assert lowering_rank(builtin_model("fig1"), 0) == 0
