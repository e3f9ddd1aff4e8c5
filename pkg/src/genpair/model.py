"""Model space for the separable pairing Hamiltonian.

A model is an ordered list of shells. Shell ``j`` holds at most ``Omega_j``
zero-coupled pairs and couples to the collective pair with a real positive
amplitude ``c_j``; the amplitudes are normalized so that ``sum c_j^2 = 1``.
"""

from __future__ import annotations

import math
import warnings
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from typing import Any, Union

import numpy as np
from numpy.typing import NDArray

from .errors import DuplicateLabel, InvalidShell, ModelError, NormalizationError

NORMALIZATION_TOL = 1e-12


class DegenerateCouplingWarning(UserWarning):
    """Two shells share the same amplitude, so their poles coincide."""


@dataclass(frozen=True)
class ShellLevel:
    """One shell: a label, its pair capacity ``omega`` and amplitude ``c``."""

    label: str
    omega: int
    c: float

    @property
    def c_squared(self) -> float:
        return self.c * self.c

    @classmethod
    def from_two_j(cls, label: str, two_j: int, c_squared: float) -> "ShellLevel":
        if not _is_int(two_j) or two_j < 1 or two_j % 2 != 1:
            raise InvalidShell(f"shell {label!r}: two_j must be an odd positive integer, got {two_j!r}")
        return cls.from_omega(label, (int(two_j) + 1) // 2, c_squared)

    @classmethod
    def from_omega(cls, label: str, omega: int, c_squared: float) -> "ShellLevel":
        if not _is_int(omega) or omega < 1:
            raise InvalidShell(f"shell {label!r}: omega must be an integer >= 1, got {omega!r}")
        if isinstance(c_squared, bool) or not isinstance(c_squared, (int, float)):
            raise InvalidShell(f"shell {label!r}: c_squared must be a number, got {c_squared!r}")
        if not math.isfinite(c_squared) or c_squared <= 0.0:
            raise InvalidShell(f"shell {label!r}: c_squared must be positive and finite, got {c_squared!r}")
        return cls(label=str(label), omega=int(omega), c=math.sqrt(float(c_squared)))


@dataclass(frozen=True)
class ModelSpace:
    """Validated, immutable collection of shells."""

    shells: tuple[ShellLevel, ...]

    @property
    def p(self) -> int:
        return len(self.shells)

    @property
    def omega_total(self) -> int:
        return sum(s.omega for s in self.shells)

    @property
    def omegas(self) -> NDArray[np.int64]:
        return np.array([s.omega for s in self.shells], dtype=np.int64)

    @property
    def c(self) -> NDArray[np.float64]:
        return np.array([s.c for s in self.shells], dtype=np.float64)

    @property
    def c_squared(self) -> NDArray[np.float64]:
        return np.array([s.c_squared for s in self.shells], dtype=np.float64)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(s.label for s in self.shells)

    def describe(self) -> str:
        parts = [f"{s.label}(omega={s.omega}, c2={s.c_squared:.6g})" for s in self.shells]
        return " ".join(parts)


RawShell = Union[ShellLevel, Mapping[str, Any]]


def _is_int(value: Any) -> bool:
    return isinstance(value, (int, np.integer)) and not isinstance(value, bool)


def _shell_from_mapping(index: int, raw: Mapping[str, Any]) -> ShellLevel:
    where = f"shells[{index}]"
    unknown = set(raw) - {"label", "two_j", "omega", "c_squared"}
    if unknown:
        raise InvalidShell(f"{where}: unknown key(s) {sorted(unknown)}")
    if "label" not in raw:
        raise InvalidShell(f"{where}: missing 'label'")
    if "c_squared" not in raw:
        raise InvalidShell(f"{where}: missing 'c_squared'")
    has_two_j, has_omega = "two_j" in raw, "omega" in raw
    if has_two_j == has_omega:
        raise InvalidShell(f"{where}: give exactly one of 'two_j' or 'omega'")
    label = raw["label"]
    if not isinstance(label, str) or not label:
        raise InvalidShell(f"{where}.label: must be a non-empty string")
    try:
        if has_two_j:
            return ShellLevel.from_two_j(label, raw["two_j"], raw["c_squared"])
        return ShellLevel.from_omega(label, raw["omega"], raw["c_squared"])
    except InvalidShell as exc:
        raise InvalidShell(f"{where}: {exc}") from None


def validate_model(raw: Union[ModelSpace, Iterable[RawShell], Mapping[str, Any]]) -> ModelSpace:
    """Validate shell data and return a :class:`ModelSpace`.

    ``raw`` may be an existing model (returned unchanged after re-checking),
    a config mapping with a ``"shells"`` key, or an iterable whose items are
    :class:`ShellLevel` objects or mappings with keys ``label``,
    ``two_j``/``omega`` and ``c_squared``. Amplitudes are stored as given.
    """
    if isinstance(raw, ModelSpace):
        items: list[RawShell] = list(raw.shells)
    elif isinstance(raw, Mapping):
        if "shells" not in raw:
            raise ModelError("config: missing top-level key 'shells'")
        extra = set(raw) - {"shells"}
        if extra:
            raise ModelError(f"config: unknown top-level key(s) {sorted(extra)}")
        if not isinstance(raw["shells"], (list, tuple)):
            raise ModelError("config.shells: must be a list")
        items = list(raw["shells"])
    else:
        items = list(raw)
    if not items:
        raise ModelError("a model needs at least one shell")

    shells: list[ShellLevel] = []
    for i, item in enumerate(items):
        if isinstance(item, ShellLevel):
            if item.omega < 1 or not item.c > 0.0 or not math.isfinite(item.c):
                raise InvalidShell(f"shells[{i}]: invalid shell {item!r}")
            shells.append(item)
        elif isinstance(item, Mapping):
            shells.append(_shell_from_mapping(i, item))
        else:
            raise InvalidShell(f"shells[{i}]: expected an object, got {type(item).__name__}")

    seen: set[str] = set()
    for s in shells:
        if s.label in seen:
            raise DuplicateLabel(f"duplicate shell label {s.label!r}")
        seen.add(s.label)

    total = math.fsum(s.c_squared for s in shells)
    if abs(total - 1.0) > NORMALIZATION_TOL:
        raise NormalizationError(f"sum of c_squared is {total!r}, expected 1 within {NORMALIZATION_TOL}")

    c2 = [s.c_squared for s in shells]
    if len(set(c2)) < len(c2):
        warnings.warn(
            "shells with equal amplitudes share a pole; the model is equivalent to merged shells",
            DegenerateCouplingWarning,
            stacklevel=2,
        )
    return ModelSpace(shells=tuple(shells))


def lambda_m(model: ModelSpace, m: int) -> float:
    """Vacuum eigenvalue of the m-th diagonal generator: -1/2 sum_j c_j^(2m) Omega_j."""
    return -0.5 * math.fsum(s.c_squared ** m * s.omega for s in model.shells)


# Built-in models. Labels are the single-particle j values.
_BUILTIN_SHELLS: dict[str, list[tuple[str, int, float]]] = {
    "fig1": [("1/2", 1, 0.1), ("3/2", 3, 0.3), ("5/2", 5, 0.6)],
    "table1a": [("1/2", 1, 0.1), ("3/2", 3, 0.2), ("5/2", 5, 0.7)],
    "table1b": [("1/2", 1, 0.2), ("3/2", 3, 0.1), ("5/2", 5, 0.7)],
    "table1c": [("1/2", 1, 0.2), ("3/2", 3, 0.7), ("5/2", 5, 0.1)],
    "table1d": [("1/2", 1, 0.7), ("3/2", 3, 0.2), ("5/2", 5, 0.1)],
    "table2-shell5": [("1/2", 1, 0.2), ("3/2", 3, 0.3), ("5/2", 5, 0.22), ("9/2", 9, 0.28)],
    "table2-shell6": [
        ("1/2", 1, 0.2),
        ("3/2", 3, 0.14),
        ("5/2", 5, 0.22),
        ("7/2", 7, 0.28),
        ("11/2", 11, 0.16),
    ],
}

BUILTIN_NAMES: tuple[str, ...] = tuple(_BUILTIN_SHELLS)


def builtin_model(name: str) -> ModelSpace:
    """Return one of the built-in models by name (see ``BUILTIN_NAMES``)."""
    try:
        shells = _BUILTIN_SHELLS[name]
    except KeyError:
        raise ModelError(f"unknown built-in model {name!r}; choose from {', '.join(BUILTIN_NAMES)}") from None
    return validate_model([{"label": lab, "two_j": tj, "c_squared": c2} for lab, tj, c2 in shells])
