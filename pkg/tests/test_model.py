"""Model validation, built-in models and vacuum eigenvalues."""

from __future__ import annotations

import math
import warnings

import pytest

from genpair.errors import DuplicateLabel, InvalidShell, ModelError, NormalizationError
from genpair.model import (
    BUILTIN_NAMES,
    DegenerateCouplingWarning,
    ModelSpace,
    ShellLevel,
    builtin_model,
    lambda_m,
    validate_model,
)

BUILTIN_OMEGA_TOTAL = {
    "fig1": 6,
    "table1a": 6,
    "table1b": 6,
    "table1c": 6,
    "table1d": 6,
    "table2-shell5": 11,
    "table2-shell6": 16,
}


class TestBuiltins:
    @pytest.mark.parametrize("name", BUILTIN_NAMES)
    def test_normalized(self, name):
        model = builtin_model(name)
        assert math.fsum(model.c_squared) == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("name,total", sorted(BUILTIN_OMEGA_TOTAL.items()))
    def test_capacity(self, name, total):
        assert builtin_model(name).omega_total == total

    def test_fig1_parameters(self):
        model = builtin_model("fig1")
        assert model.labels == ("1/2", "3/2", "5/2")
        assert list(model.omegas) == [1, 2, 3]
        assert list(model.c_squared) == pytest.approx([0.1, 0.3, 0.6], abs=1e-15)

    def test_unknown_builtin(self):
        with pytest.raises(ModelError, match="unknown built-in"):
            builtin_model("table3")


class TestValidation:
    def test_accepts_two_j_and_omega(self):
        model = validate_model(
            {"shells": [{"label": "a", "two_j": 3, "c_squared": 0.4}, {"label": "b", "omega": 2, "c_squared": 0.6}]}
        )
        assert list(model.omegas) == [2, 2]

    def test_accepts_shell_objects(self):
        shells = [ShellLevel.from_omega("a", 1, 0.25), ShellLevel.from_omega("b", 3, 0.75)]
        assert validate_model(shells).p == 2

    def test_roundtrip_model(self):
        model = builtin_model("table1a")
        assert validate_model(model) == model

    @pytest.mark.parametrize(
        "shells,error,fragment",
        [
            ([{"label": "a", "two_j": 2, "c_squared": 1.0}], InvalidShell, "shells[0]"),
            ([{"label": "a", "two_j": 1, "omega": 1, "c_squared": 1.0}], InvalidShell, "exactly one"),
            ([{"label": "a", "omega": 0, "c_squared": 1.0}], InvalidShell, "omega"),
            ([{"label": "a", "omega": 1, "c_squared": -1.0}], InvalidShell, "positive"),
            ([{"label": "a", "omega": 1, "c_squared": "1"}], InvalidShell, "number"),
            ([{"label": "a", "omega": 1}], InvalidShell, "c_squared"),
            ([{"omega": 1, "c_squared": 1.0}], InvalidShell, "label"),
            ([{"label": "a", "omega": 1, "c_squared": 1.0, "j": 1}], InvalidShell, "unknown key"),
            ([{"label": "a", "omega": 1, "c_squared": 0.5}], NormalizationError, "sum of c_squared"),
            (
                [{"label": "a", "omega": 1, "c_squared": 0.5}, {"label": "a", "omega": 2, "c_squared": 0.5}],
                DuplicateLabel,
                "duplicate",
            ),
            ([], ModelError, "at least one shell"),
        ],
    )
    def test_rejects(self, shells, error, fragment):
        with pytest.raises(error) as info:
            validate_model({"shells": shells})
        assert fragment in str(info.value)

    def test_second_shell_context(self):
        with pytest.raises(InvalidShell, match=r"shells\[1\]"):
            validate_model([{"label": "a", "omega": 1, "c_squared": 0.5}, {"label": "b", "two_j": 4, "c_squared": 0.5}])

    def test_top_level_keys(self):
        with pytest.raises(ModelError, match="missing top-level key"):
            validate_model({"levels": []})
        with pytest.raises(ModelError, match="unknown top-level"):
            validate_model({"shells": [{"label": "a", "omega": 1, "c_squared": 1.0}], "G": 1})

    def test_normalization_tolerance(self):
        validate_model([{"label": "a", "omega": 1, "c_squared": 0.5 + 4e-13}, {"label": "b", "omega": 1, "c_squared": 0.5}])
        with pytest.raises(NormalizationError):
            validate_model([{"label": "a", "omega": 1, "c_squared": 0.5 + 1e-11}, {"label": "b", "omega": 1, "c_squared": 0.5}])

    def test_equal_amplitudes_warn(self):
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            validate_model([{"label": "a", "omega": 1, "c_squared": 0.5}, {"label": "b", "omega": 2, "c_squared": 0.5}])
        assert any(issubclass(w.category, DegenerateCouplingWarning) for w in caught)


class TestLambda:
    @pytest.mark.parametrize("name", BUILTIN_NAMES)
    def test_m0_is_half_capacity(self, name):
        model = builtin_model(name)
        assert lambda_m(model, 0) == pytest.approx(-0.5 * model.omega_total, abs=1e-14)

    @pytest.mark.parametrize("name,expected", [("fig1", -1.25), ("table1a", -1.3), ("table1d", -0.7), ("table2-shell5", -1.43)])
    def test_m1(self, name, expected):
        assert lambda_m(builtin_model(name), 1) == pytest.approx(expected, abs=1e-14)

    def test_describe_lists_shells(self):
        text = builtin_model("fig1").describe()
        assert "5/2(omega=3, c2=0.6)" in text

    def test_model_is_hashable(self):
        assert isinstance(hash(builtin_model("fig1")), int)
        assert isinstance(builtin_model("fig1"), ModelSpace)
