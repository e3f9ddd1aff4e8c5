"""Algebraic (Bethe-type) equations for the separable pairing Hamiltonian.

Nonzero levels of the ``N``-pair sector are written as

    S+_0 S+(x_1) ... S+(x_(N-1)) |0>,     x_i = alpha * y_i,

where the ``y_i`` and ``alpha`` solve

    F_i = -1/2 sum_j Omega_j c_j^2 alpha / (1 - alpha y_i c_j^2)
          - 1/y_i - sum_(k != i) 1/(y_i - y_k) = 0,
    G   = sum_i 1/y_i - 1 = 0,

and the energy is ``h = -2/alpha - 2 Lambda_1``. Zero-energy states are
products ``S+(x_1) ... S+(x_N) |0>`` whose roots solve

    sum_j Omega_j c_j^2 / (1 - x_i c_j^2) + 2 sum_(k != i) 1/(x_i - x_k) = 0.

Roots are found by homotopy continuation in the inverse variables
``w = 1/x``, where a root at ``x = inf`` is the regular point ``w = 0``.
The root-root interaction is switched on by a parameter ``lam`` running
from 0 to 1 along a complex path. At ``lam = 0`` every root independently
solves a one-variable rational equation; a cluster of ``n`` coincident
starting roots is split with the zeros of the Hermite polynomial ``H_n``,
which solve the small-``lam`` limit exactly.

Above half filling every nonzero eigenstate of sector ``N`` is
``S+_(-1)^r`` applied to an eigenstate of sector ``N' = Omega_total + 1 - N``
with the same energy, ``r = N - N'``. Those sectors reuse the roots of
sector ``N'`` plus ``r`` roots at infinity.

Damped Newton multistart (random or oracle-seeded starts, with deflation)
is available as an alternative strategy and as a fallback.
"""

from __future__ import annotations

import cmath
import dataclasses
import itertools
import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np
import scipy.optimize
from numpy.polynomial import hermite as _hermite
from numpy.polynomial import polynomial as _poly
from numpy.typing import NDArray

from .errors import NoConvergence, NonPhysicalSolution, PoleProximity, ZeroState
from .model import ModelSpace, lambda_m
from .pair_basis import enumerate_basis
from .quasispin_oracle import DEFAULT_DIM_CAP, diagonalize_sector, lowering_rank, zero_multiplicity
from .state_builder import (
    coeffs_from_w,
    collective_coeffs,
    expand_product,
    hamiltonian_residual,
    kernel_residual,
)

log = logging.getLogger(__name__)

RESIDUAL_POLE_EPS = 1e-12
POLE_RADIUS = 1e-8
DUPLICATE_TOL = 1e-6
NEWTON_TOL = 1e-12
NEWTON_MAX_ITER = 200
SOLVER_TOL = 1e-10
IMAG_H_TOL = 1e-9
STATE_TOL = 1e-8

STRATEGIES = ("continuation", "random", "oracle", "brackets")

INF = complex(math.inf, 0.0)


# ----------------------------------------------------------------------------
# result types


@dataclass(frozen=True)
class RapiditySet:
    """One nonzero-energy solution: ``N - 1`` rapidities ``y`` and ``alpha``.

    Infinite entries of ``y`` are roots at ``x = inf``. The full sector
    ``N = Omega_total`` has every root at infinity and ``alpha = inf``.
    """

    N: int
    y: tuple[complex, ...]
    alpha: complex
    h: float
    strategy: str
    residual: float
    state_residual: float = math.nan

    @property
    def x(self) -> tuple[complex, ...]:
        return tuple(INF if cmath.isinf(yi) or cmath.isinf(self.alpha) else self.alpha * yi for yi in self.y)


@dataclass(frozen=True)
class ZeroModeRoots:
    """Roots ``x`` of one zero-energy state of the ``N``-pair sector."""

    N: int
    x: tuple[complex, ...]
    strategy: str
    residual: float
    state_residual: float = math.nan


@dataclass
class SolveReport:
    """Solutions for one sector together with bookkeeping for completeness."""

    N: int
    kind: str
    solutions: list = field(default_factory=list)
    expected: Optional[int] = None
    failures: int = 0
    strategy: str = ""

    @property
    def found(self) -> int:
        return len(self.solutions)

    @property
    def complete(self) -> bool:
        return self.expected is not None and self.found == self.expected

    def __iter__(self):
        return iter(self.solutions)

    def __len__(self) -> int:
        return len(self.solutions)


# ----------------------------------------------------------------------------
# closed forms and residuals


def n1_energy(model: ModelSpace) -> float:
    """The single nonzero level of the one-pair sector, ``sum_j c_j^2 Omega_j``."""
    return math.fsum(s.c_squared * s.omega for s in model.shells)


def _is_inf(z: complex) -> bool:
    return cmath.isinf(complex(z))


def nonzero_residuals(model: ModelSpace, y: Sequence[complex], alpha: complex) -> NDArray[np.complex128]:
    """Residuals ``F_1 .. F_(N-1)`` followed by the constraint ``G``.

    Entries of ``y`` at infinity contribute nothing to the other equations
    and their own residual is taken as zero (the limiting value).
    """
    y = np.asarray(y, dtype=np.complex128)
    alpha = complex(alpha)
    c2 = model.c_squared
    om = model.omegas.astype(np.float64)
    out = np.zeros(len(y) + 1, dtype=np.complex128)
    finite = ~np.isinf(y)
    yf = y[finite]
    if np.any(np.abs(yf) < RESIDUAL_POLE_EPS):
        raise PoleProximity("a rapidity is at zero")
    if _is_inf(alpha):
        if yf.size:
            raise NonPhysicalSolution("alpha is infinite but some rapidities are finite")
        out[-1] = -1.0
        return out
    denom = 1.0 - alpha * yf[:, None] * c2[None, :]
    if np.any(np.abs(denom) < RESIDUAL_POLE_EPS):
        raise PoleProximity("a root is on a pole 1/c_j^2")
    diff = yf[:, None] - yf[None, :]
    np.fill_diagonal(diff, 1.0)
    if yf.size > 1 and np.any(np.abs(diff) < RESIDUAL_POLE_EPS):
        raise PoleProximity("two rapidities coincide")
    inv = 1.0 / diff
    np.fill_diagonal(inv, 0.0)
    F = -0.5 * (om * c2 * alpha / denom).sum(axis=1) - 1.0 / yf - inv.sum(axis=1)
    out[:-1][finite] = F
    out[-1] = (1.0 / yf).sum() - 1.0
    return out


def rapidity_residual(model: ModelSpace, rs: RapiditySet) -> float:
    """Largest residual of a solution; the constraint is skipped when no root is finite."""
    if not any(not _is_inf(v) for v in rs.y):
        return 0.0
    return float(np.max(np.abs(nonzero_residuals(model, rs.y, rs.alpha))))


def energy_from_alpha(model: ModelSpace, alpha: complex) -> float:
    """``h = -2/alpha - 2 Lambda_1``; raises if the result is not real."""
    alpha = complex(alpha)
    if alpha == 0:
        raise NonPhysicalSolution("alpha must be nonzero")
    beta = 0.0 if _is_inf(alpha) else 1.0 / alpha
    h = -2.0 * beta - 2.0 * lambda_m(model, 1)
    if abs(h.imag) > IMAG_H_TOL:
        raise NonPhysicalSolution(f"energy has imaginary part {h.imag:.3e}")
    return float(h.real)


def alpha_from_energy(model: ModelSpace, h: float) -> complex:
    """Inverse of :func:`energy_from_alpha`; ``h = -2 Lambda_1`` is its pole."""
    beta = -(h + 2.0 * lambda_m(model, 1)) / 2.0
    if abs(beta) < 1e-14 * max(1.0, abs(h)):
        raise NonPhysicalSolution(f"h = {h} sits on the pole of alpha(h)")
    return complex(1.0 / beta)


def _two_pair_function(model: ModelSpace, x: float) -> float:
    c2, om = model.c_squared, model.omegas
    return 0.5 * float(np.sum(om * c2 * x / (x * c2 - 1.0))) - 1.0


def n2_energies(model: ModelSpace) -> list[float]:
    """All two-pair nonzero levels from the scalar equation, descending.

    The function ``1/2 sum_j Omega_j c_j^2 x/(x c_j^2 - 1) - 1`` decreases
    strictly between consecutive poles ``1/c_j^2``, so each bounded interval
    holds one root. The outer intervals hold a root when the limit
    ``Omega_total/2 - 1`` has the right sign; when it vanishes the root sits
    at ``x = inf``. Roots whose pair state is Pauli-blocked are dropped.
    """
    poles = np.unique(1.0 / model.c_squared)
    limit = 0.5 * model.omega_total - 1.0
    roots: list[float] = []

    def bracket(lo: float, hi: float) -> None:
        roots.append(scipy.optimize.brentq(lambda x: _two_pair_function(model, x), lo, hi, xtol=1e-15, rtol=1e-15, maxiter=500))

    for a, b in zip(poles[:-1], poles[1:]):
        eps = 1e-13 * (b - a)
        bracket(a + eps, b - eps)
    if limit > 0:
        lo = poles[0] - 1.0
        while _two_pair_function(model, lo) <= 0:
            lo = poles[0] - 2.0 * (poles[0] - lo)
        bracket(lo, poles[0] * (1 - 1e-15))
    elif limit < 0:
        hi = poles[-1] + 1.0
        while _two_pair_function(model, hi) >= 0:
            hi = poles[-1] + 2.0 * (hi - poles[-1])
        bracket(poles[-1] * (1 + 1e-15), hi)
    if limit == 0:
        roots.append(math.inf)
    energies = []
    for x in roots:
        # a root whose two-pair state vanishes (Pauli blocking) is not a level
        try:
            expand_product(model, [collective_coeffs(model, 0.0), collective_coeffs(model, complex(x))])
        except ZeroState:
            continue
        energies.append(-2.0 * lambda_m(model, 1) - (0.0 if math.isinf(x) else 2.0 / x))
    return sorted(energies, reverse=True)


def zero_residuals(model: ModelSpace, x: Sequence[complex]) -> NDArray[np.complex128]:
    """Residuals of the zero-energy equations, one per root."""
    x = np.asarray(x, dtype=np.complex128)
    c2 = model.c_squared
    om = model.omegas.astype(np.float64)
    denom = 1.0 - x[:, None] * c2[None, :]
    if np.any(np.abs(denom) < RESIDUAL_POLE_EPS):
        raise PoleProximity("a root is on a pole 1/c_j^2")
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    if x.size > 1 and np.any(np.abs(diff) < RESIDUAL_POLE_EPS):
        raise PoleProximity("two roots coincide")
    inv = 1.0 / diff
    np.fill_diagonal(inv, 0.0)
    return (om * c2 / denom).sum(axis=1) + 2.0 * inv.sum(axis=1)


# ----------------------------------------------------------------------------
# continuation in inverse roots w = 1/x


@dataclass
class _Homotopy:
    """``K_b(w; lam) = q(lam)/w_b - sum_j (Omega_j/2)/(w_b - f_j) + lam sum_a 1/(w_b - w_a)``.

    ``q(lam) = q0 - lam (M - 1)``. Nonzero levels use ``q0 = Omega_total/2 - 1``
    with ``M = N - 1`` free roots; zero-energy states use ``q0 = Omega_total/2``
    with ``M = N`` roots.
    """

    f: NDArray[np.float64]
    half_omega: NDArray[np.float64]
    q0: float
    M: int

    def system(self, w: NDArray[np.complex128], lam: complex):
        d = w[:, None] - self.f[None, :]
        diff = w[:, None] - w[None, :]
        np.fill_diagonal(diff, 1.0)
        inv = 1.0 / diff
        np.fill_diagonal(inv, 0.0)
        q = self.q0 - lam * (self.M - 1)
        F = q / w - (self.half_omega / d).sum(axis=1) + lam * inv.sum(axis=1)
        J = lam * inv**2
        np.fill_diagonal(J, -q / w**2 + (self.half_omega / d**2).sum(axis=1) - lam * (inv**2).sum(axis=1))
        dlam = -(self.M - 1) / w + inv.sum(axis=1)
        return F, J, dlam

    def decoupled_roots(self) -> NDArray[np.complex128]:
        """Roots of ``K`` at ``lam = 0`` (one-variable rational equation)."""
        num = _poly.polymul([self.q0], _poly.polyfromroots(self.f))
        for j in range(len(self.f)):
            others = np.delete(self.f, j)
            term = _poly.polymul([0.0, self.half_omega[j]], _poly.polyfromroots(others))
            num = _poly.polysub(num, term)
        num = _poly.polytrim(num, tol=1e-14 * max(1.0, float(np.max(np.abs(num)))))
        if len(num) <= 1:
            return np.zeros(0, dtype=np.complex128)
        roots = _poly.polyroots(num).astype(np.complex128)
        return np.array([self._polish_single(r) for r in roots])

    def _polish_single(self, r: complex) -> complex:
        for _ in range(50):
            F = self.q0 / r - np.sum(self.half_omega / (r - self.f))
            dF = -self.q0 / r**2 + np.sum(self.half_omega / (r - self.f) ** 2)
            step = F / dF
            r -= step
            if abs(step) < 1e-15 * max(1.0, abs(r)):
                break
        return complex(r)

    def decoupled_slope(self, r: complex) -> complex:
        return -self.q0 / r**2 + complex(np.sum(self.half_omega / (r - self.f) ** 2))


# complex path for lam: leaves the real axis to avoid singular points
_T0 = 1e-8
_T_END = 1.0 - 1e-7
_GAMMAS = (0.7, -0.9, 1.6, -0.4)
_ABANDON_RADIUS = 1e-7


def _lam(t: float, gamma: float) -> complex:
    return t * (1.0 + 1j * gamma * (1.0 - t))


def _dlam(t: float, gamma: float) -> complex:
    return 1.0 + 1j * gamma * (1.0 - 2.0 * t)


def _root_separation(w: NDArray[np.complex128], f: NDArray[np.float64]) -> NDArray[np.float64]:
    """Distance from each root to the nearest other root, pole or the origin."""
    sep = np.min(np.abs(w[:, None] - f[None, :]), axis=1)
    sep = np.minimum(sep, np.abs(w))
    if w.size > 1:
        diff = np.abs(w[:, None] - w[None, :])
        np.fill_diagonal(diff, np.inf)
        sep = np.minimum(sep, np.min(diff, axis=1))
    return sep


def _min_separation(w: NDArray[np.complex128], f: NDArray[np.float64]) -> float:
    return float(np.min(_root_separation(w, f))) if w.size else math.inf


def _newton_w(hom: _Homotopy, w: NDArray[np.complex128], lam: complex, max_iter: int, tol: float):
    """Plain Newton on ``K(w; lam)``; returns ``(w, converged, first_step)``."""
    first = math.nan
    for it in range(max_iter):
        F, J, _ = hom.system(w, lam)
        try:
            step = np.linalg.solve(J, F)
        except np.linalg.LinAlgError:
            return w, False, first
        if not np.all(np.isfinite(step)):
            return w, False, first
        w = w - step
        size = float(np.max(np.abs(step)))
        if it == 0:
            first = size
        if size <= tol * max(1.0, float(np.max(np.abs(w)))):
            return w, True, first
    return w, False, first


def _tangent(hom: _Homotopy, w, t: float, gamma: float):
    _, J, dlam = hom.system(w, _lam(t, gamma))
    return -np.linalg.solve(J, dlam) * _dlam(t, gamma)


def _track(hom: _Homotopy, w0: NDArray[np.complex128], gamma: float) -> Optional[NDArray[np.complex128]]:
    """Follow one path from ``t = _T0`` to ``t = 1``; ``None`` on failure."""
    t = _T0
    w, ok, _ = _newton_w(hom, w0.copy(), _lam(t, gamma), 20, 1e-12)
    if not ok:
        return None
    dt = _T0
    while t < _T_END:
        dt = min(dt, _T_END - t)
        try:
            k1 = _tangent(hom, w, t, gamma)
            k2 = _tangent(hom, w + 0.5 * dt * k1, t + 0.5 * dt, gamma)
            k3 = _tangent(hom, w + 0.5 * dt * k2, t + 0.5 * dt, gamma)
            k4 = _tangent(hom, w + dt * k3, t + dt, gamma)
        except np.linalg.LinAlgError:
            dt *= 0.5
            if dt < 1e-15:
                return None
            continue
        pred = w + dt * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0
        sep = _root_separation(w, hom.f)
        if float(np.min(sep)) < _ABANDON_RADIUS:
            # a root is running into a pole or another root: a Pauli-blocked path
            return None
        corrected, ok, first = (pred, False, math.nan)
        if np.all(np.isfinite(pred)):
            corrected, ok, first = _newton_w(hom, pred, _lam(t + dt, gamma), 4, 1e-11)
        moved = np.abs(corrected - w)
        if ok and first < 0.01 * float(np.min(sep)) and bool(np.all(moved < 0.3 * sep)):
            t += dt
            w = corrected
            dt *= 2.0 if first < 1e-4 * float(np.min(sep)) and bool(np.all(moved < 0.1 * sep)) else 1.2
        else:
            dt *= 0.5
            if dt < 1e-14:
                return None
    w, ok, _ = _newton_w(hom, w, 1.0, 60, 1e-14)
    if not ok or not np.all(np.isfinite(w)):
        return None
    return w


def _start_points(hom: _Homotopy) -> list[NDArray[np.complex128]]:
    """Asymptotic ``lam -> 0`` solutions, one per multiset of decoupled roots."""
    roots = hom.decoupled_roots()
    if hom.M == 0:
        return [np.zeros(0, dtype=np.complex128)]
    lam0 = _lam(_T0, 0.0)
    starts = []
    for combo in itertools.combinations_with_replacement(range(len(roots)), hom.M):
        pts: list[complex] = []
        for idx in sorted(set(combo)):
            n = combo.count(idx)
            r = roots[idx]
            if n == 1:
                pts.append(r)
                continue
            xi = _hermite.hermroots([0] * n + [1])
            scale = cmath.sqrt(-lam0 / hom.decoupled_slope(r))
            pts.extend(r + scale * xi)
        starts.append(np.array(pts, dtype=np.complex128))
    return starts


def _same_roots(a: NDArray[np.complex128], b: NDArray[np.complex128], tol: float = DUPLICATE_TOL) -> bool:
    """Root sets agree up to ordering within ``tol * (1 + |root|)``."""
    if a.shape != b.shape:
        return False
    if a.size == 0:
        return True
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = scipy.optimize.linear_sum_assignment(cost)
    scale = 1.0 + np.maximum(np.abs(a[rows]), np.abs(b[cols]))
    return bool(np.all(cost[rows, cols] <= tol * scale))


def _conjugate_closed(roots: NDArray[np.complex128], tol: float = 1e-6) -> bool:
    """Non-real roots come in complex-conjugate pairs."""
    return _same_roots(roots, np.conj(roots), tol)


def _homotopy_for(model: ModelSpace, N: int, zero_energy: bool) -> _Homotopy:
    f, inverse = np.unique(model.c_squared, return_inverse=True)
    half = np.zeros(len(f))
    np.add.at(half, inverse, 0.5 * model.omegas.astype(np.float64))
    if zero_energy:
        return _Homotopy(f=f, half_omega=half, q0=0.5 * model.omega_total, M=N)
    return _Homotopy(f=f, half_omega=half, q0=0.5 * model.omega_total - 1.0, M=N - 1)


@lru_cache(maxsize=256)
def _continuation_pass(model: ModelSpace, N: int, zero_energy: bool, gamma: float):
    """Distinct path endpoints ``w`` for one choice of the complex path; cached."""
    hom = _homotopy_for(model, N, zero_energy)
    found: list[NDArray[np.complex128]] = []
    failures = 0
    for w0 in _start_points(hom):
        w = _track(hom, w0, gamma)
        if w is None or _min_separation(w, hom.f) < POLE_RADIUS:
            failures += 1
            continue
        if any(_same_roots(w, other) for other in found):
            continue
        w.setflags(write=False)
        found.append(w)
    return tuple(found), failures


def _lowest_path(model: ModelSpace, N: int) -> Optional[NDArray[np.complex128]]:
    """Track only the path that starts with every root at the negative decoupled root.

    On the models tested this path ends on the most-bound level; callers
    verify the result and fall back to the full solve otherwise.
    """
    hom = _homotopy_for(model, N, False)
    roots = hom.decoupled_roots()
    if roots.size == 0:
        return None
    r = roots[int(np.argmin(roots.real))]
    if hom.M == 1:
        start = np.array([r], dtype=np.complex128)
    else:
        xi = _hermite.hermroots([0] * hom.M + [1])
        start = r + cmath.sqrt(-_lam(_T0, 0.0) / hom.decoupled_slope(r)) * xi
    w = _track(hom, start.astype(np.complex128), _GAMMAS[0])
    if w is None or _min_separation(w, hom.f) < POLE_RADIUS:
        return None
    return w


# ----------------------------------------------------------------------------
# damped Newton in (y, alpha): the 2N-real-variable formulation


def _nonzero_jacobian(model: ModelSpace, y: NDArray[np.complex128], alpha: complex) -> NDArray[np.complex128]:
    c2 = model.c_squared
    om = model.omegas.astype(np.float64)
    n = len(y)
    denom = 1.0 - alpha * y[:, None] * c2[None, :]
    diff = y[:, None] - y[None, :]
    np.fill_diagonal(diff, 1.0)
    inv2 = 1.0 / diff**2
    np.fill_diagonal(inv2, 0.0)
    J = np.zeros((n + 1, n + 1), dtype=np.complex128)
    J[:n, :n] = -inv2
    diag = -0.5 * (om * c2 * c2 * alpha * alpha / denom**2).sum(axis=1) + 1.0 / y**2 + inv2.sum(axis=1)
    J[np.arange(n), np.arange(n)] = diag
    J[:n, n] = -0.5 * (om * c2 / denom**2).sum(axis=1)
    J[n, :n] = -1.0 / y**2
    return J


def _realify(J: NDArray[np.complex128]) -> NDArray[np.float64]:
    """Real ``2n x 2n`` Jacobian of a holomorphic map in (Re, Im) coordinates."""
    return np.block([[J.real, -J.imag], [J.imag, J.real]])


def _to_real(z: NDArray[np.complex128]) -> NDArray[np.float64]:
    return np.concatenate([z.real, z.imag])


def _to_complex(v: NDArray[np.float64]) -> NDArray[np.complex128]:
    n = len(v) // 2
    return v[:n] + 1j * v[n:]


def _damped_newton(residual, jacobian, z0: NDArray[np.complex128], known: Sequence[NDArray[np.complex128]], valid):
    """Damped Newton on the real form of a holomorphic system with deflation.

    ``known`` solutions multiply the residual by ``prod (1/|z - z_k|^2 + 1)``;
    the step is rescaled accordingly (Sherman-Morrison on the deflated
    Jacobian). ``valid`` rejects iterates near poles.
    """
    with np.errstate(all="ignore"):
        return _damped_newton_inner(residual, jacobian, z0, known, valid)


def _damped_newton_inner(residual, jacobian, z0, known, valid):
    z = z0.copy()
    try:
        F = residual(z)
    except (PoleProximity, FloatingPointError, ZeroDivisionError):
        raise NoConvergence("start point on a pole") from None
    for _ in range(NEWTON_MAX_ITER):
        norm = float(np.max(np.abs(F)))
        if norm < NEWTON_TOL:
            return z
        try:
            Jr = _realify(jacobian(z))
            delta = np.linalg.solve(Jr, -_to_real(F))
        except (np.linalg.LinAlgError, PoleProximity):
            raise NoConvergence("singular Jacobian") from None
        if known:
            zr = _to_real(z)
            grad = np.zeros_like(zr)
            for k in known:
                dz = zr - _to_real(k)
                d2 = float(dz @ dz)
                if d2 == 0.0:
                    raise NoConvergence("iterate hit a deflated solution")
                grad += -2.0 * dz / (d2 * (1.0 + d2))
            denom = 1.0 - float(grad @ delta)
            if abs(denom) > 1e-12:
                delta = delta / denom
        step = 1.0
        while True:
            trial = z + step * _to_complex(delta)
            try:
                if valid(trial):
                    Ft = residual(trial)
                    if np.all(np.isfinite(Ft)) and float(np.max(np.abs(Ft))) < (1.0 - 1e-4 * step) * norm:
                        break
            except (PoleProximity, NonPhysicalSolution):
                pass
            step *= 0.5
            if step < 1.0 / 1024:
                break
        if step < 1.0 / 1024:
            # accept the full step anyway when the residual is already tiny
            trial = z + _to_complex(delta)
            try:
                Ft = residual(trial)
            except PoleProximity:
                raise NoConvergence("iterate entered a pole neighbourhood") from None
            if not valid(trial) or not np.all(np.isfinite(Ft)):
                raise NoConvergence("iterate entered a pole neighbourhood")
        z, F = trial, Ft
        if float(np.max(np.abs(_to_complex(delta)))) < 1e-15 * max(1.0, float(np.max(np.abs(z)))):
            break
    if float(np.max(np.abs(F))) < SOLVER_TOL:
        return z
    raise NoConvergence(f"no convergence after {NEWTON_MAX_ITER} iterations")


def _newton_nonzero(model: ModelSpace, y0, alpha0, known=()):
    """Solve for ``(y, alpha)`` from a start; returns ``(y, alpha)``."""
    n = len(y0)
    c2 = model.c_squared

    def residual(z):
        return nonzero_residuals(model, z[:n], z[n])

    def jacobian(z):
        return _nonzero_jacobian(model, z[:n], z[n])

    def valid(z):
        if not np.all(np.isfinite(z)) or abs(z[n]) < 1e-14:
            return False
        x = z[:n] * z[n]
        return bool(np.all(np.abs(1.0 - x[:, None] * c2[None, :]) > POLE_RADIUS))

    z0 = np.concatenate([np.asarray(y0, dtype=np.complex128), [complex(alpha0)]])
    z = _damped_newton(residual, jacobian, z0, list(known), valid)
    return z[:n], complex(z[n])


def _zero_jacobian(model: ModelSpace, x: NDArray[np.complex128]) -> NDArray[np.complex128]:
    c2 = model.c_squared
    om = model.omegas.astype(np.float64)
    denom = 1.0 - x[:, None] * c2[None, :]
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    inv2 = 1.0 / diff**2
    np.fill_diagonal(inv2, 0.0)
    J = 2.0 * inv2
    J[np.arange(len(x)), np.arange(len(x))] = (om * c2 * c2 / denom**2).sum(axis=1) - 2.0 * inv2.sum(axis=1)
    return J


def _newton_zero(model: ModelSpace, x0, known=()):
    c2 = model.c_squared

    def valid(x):
        return bool(np.all(np.isfinite(x)) and np.all(np.abs(1.0 - x[:, None] * c2[None, :]) > POLE_RADIUS))

    return _damped_newton(
        lambda x: zero_residuals(model, x),
        lambda x: _zero_jacobian(model, x),
        np.asarray(x0, dtype=np.complex128),
        list(known),
        valid,
    )


# ----------------------------------------------------------------------------
# candidate verification


def _sector_cap_ok(model: ModelSpace, N: int, cap: int) -> bool:
    return enumerate_basis(model, N).dim <= cap


def _make_rapidity_set(
    model: ModelSpace, N: int, w: NDArray[np.complex128], strategy: str, verify: bool, cap: int
) -> Optional[RapiditySet]:
    """Convert inverse roots to a verified :class:`RapiditySet`, or ``None``."""
    finite = w != 0
    beta = complex(np.sum(w))
    if not _conjugate_closed(w):
        return None
    if N == model.omega_total and not np.any(finite):
        alpha = INF
        y: tuple[complex, ...] = tuple(INF for _ in w)
    else:
        if beta == 0:
            return None
        alpha = 1.0 / beta
        y = tuple(INF if wi == 0 else complex(beta / wi) for wi in w)
    try:
        h = energy_from_alpha(model, alpha)
    except NonPhysicalSolution:
        return None
    if h <= 0:
        return None
    finite_y = np.array([v for v in y if not _is_inf(v)], dtype=np.complex128)
    if finite_y.size:
        # polish in the (y, alpha) variables so the residual is small in that form too
        try:
            yp, ap = _newton_nonzero(model, finite_y, alpha)
        except NoConvergence:
            yp, ap = finite_y, alpha
        if _same_roots(np.append(yp, ap), np.append(finite_y, alpha), 1e-8):
            finite_y, alpha = yp, ap
            it = iter(finite_y)
            y = tuple(INF if _is_inf(v) else complex(next(it)) for v in y)
            try:
                h = energy_from_alpha(model, alpha)
            except NonPhysicalSolution:
                return None
    rs = RapiditySet(N=N, y=y, alpha=alpha, h=h, strategy=strategy, residual=0.0)
    try:
        res = rapidity_residual(model, rs)
    except PoleProximity:
        return None
    if res > SOLVER_TOL * max(1.0, float(np.max(np.abs(finite_y))) if finite_y.size else 1.0):
        return None
    state_res = math.nan
    if verify and _sector_cap_ok(model, N, cap):
        try:
            state = _nonzero_state(model, w)
        except (ZeroState, PoleProximity):
            return None
        state_res = hamiltonian_residual(model, state, h, cap)
        if state_res > STATE_TOL * max(1.0, h):
            return None
    return RapiditySet(N=N, y=y, alpha=alpha, h=h, strategy=strategy, residual=res, state_residual=state_res)


def _nonzero_state(model: ModelSpace, w: NDArray[np.complex128]):
    factors = [collective_coeffs(model, 0.0)] + [coeffs_from_w(model, wi) for wi in w]
    return expand_product(model, factors)


def nonzero_state(model: ModelSpace, rs: RapiditySet):
    """Normalized eigenvector ``S+_0 prod_i S+(x_i) |0>`` of a solution."""
    factors = [collective_coeffs(model, 0.0)] + [collective_coeffs(model, x) for x in rs.x]
    return expand_product(model, factors)


def zero_state(model: ModelSpace, zr: ZeroModeRoots):
    """Normalized zero-energy eigenvector ``prod_i S+(x_i) |0>``."""
    return expand_product(model, [collective_coeffs(model, x) for x in zr.x])


def _make_zero_roots(
    model: ModelSpace, N: int, x: NDArray[np.complex128], strategy: str, verify: bool, cap: int
) -> Optional[ZeroModeRoots]:
    if not _conjugate_closed(x):
        return None
    try:
        xp = _newton_zero(model, x)
        if _same_roots(xp, x, 1e-8):
            x = xp
        res = float(np.max(np.abs(zero_residuals(model, x))))
    except (NoConvergence, PoleProximity):
        return None
    if res > SOLVER_TOL * max(1.0, float(np.max(np.abs(x)))):
        return None
    zr = ZeroModeRoots(N=N, x=tuple(complex(v) for v in x), strategy=strategy, residual=res)
    if verify and _sector_cap_ok(model, N, cap):
        try:
            kr = kernel_residual(model, zero_state(model, zr))
        except (ZeroState, PoleProximity):
            return None
        if kr > STATE_TOL:
            return None
        zr = ZeroModeRoots(N=N, x=zr.x, strategy=strategy, residual=res, state_residual=kr)
    return zr


def _is_new(candidates: list, roots: NDArray[np.complex128], key) -> bool:
    return not any(_same_roots(roots, key(c)) for c in candidates)


def _rs_key(rs: RapiditySet) -> NDArray[np.complex128]:
    return np.array([0.0 if _is_inf(x) else 1.0 / x for x in rs.x] + [0.0 if _is_inf(rs.alpha) else 1.0 / rs.alpha], dtype=np.complex128)


# ----------------------------------------------------------------------------
# public solvers


def _expected_nonzero(model: ModelSpace, N: int, cap: int) -> Optional[int]:
    if not _sector_cap_ok(model, N, cap):
        return None
    return lowering_rank(model, N)


def _oracle_levels(model: ModelSpace, N: int, oracle_h, cap: int) -> NDArray[np.float64]:
    if oracle_h is not None:
        return np.asarray(oracle_h, dtype=np.float64)
    return diagonalize_sector(model, N, cap).nonzero()


def solve_nonzero(
    model: ModelSpace,
    N: int,
    strategy: str = "continuation",
    seed: int = 0,
    *,
    max_starts: int = 200,
    oracle_h: Optional[Sequence[float]] = None,
    oracle_fallback: bool = False,
    verify: bool = True,
    dim_cap: int = DEFAULT_DIM_CAP,
) -> SolveReport:
    """All nonzero-energy solutions of the ``N``-pair sector (``N >= 2``).

    ``strategy`` is one of ``continuation`` (default), ``random``, ``oracle``
    (starts built from oracle energies) or ``brackets`` (``N = 2`` only).
    With ``oracle_fallback`` the oracle-seeded search runs for levels that
    the chosen strategy missed. Solutions are sorted by descending ``h``.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; choose from {STRATEGIES}")
    if N < 2:
        raise ValueError("solve_nonzero needs N >= 2; use n1_energy for one pair")
    total = model.omega_total
    report = SolveReport(N=N, kind="nonzero", strategy=strategy)
    if N > total:
        report.expected = 0
        return report
    report.expected = _expected_nonzero(model, N, dim_cap)
    if N == total:
        rs = RapiditySet(
            N=N, y=tuple(INF for _ in range(N - 1)), alpha=INF, h=-2.0 * lambda_m(model, 1),
            strategy="closed-form", residual=0.0,
        )
        if verify and _sector_cap_ok(model, N, dim_cap):
            state_res = hamiltonian_residual(model, nonzero_state(model, rs), rs.h, dim_cap)
            rs = dataclasses.replace(rs, state_residual=state_res)
        report.solutions = [rs]
        return report

    half = (total + 1) // 2
    if N > half:
        # N < total here, so the partner sector has at least two pairs
        partner = total + 1 - N
        r = N - partner
        # the partner sector has the same nonzero levels, so oracle energies carry over
        sub = solve_nonzero(
            model, partner, strategy, seed, max_starts=max_starts, oracle_h=oracle_h,
            oracle_fallback=oracle_fallback, verify=False, dim_cap=dim_cap,
        )
        for b in sub.solutions:
            w = np.array([1.0 / x for x in b.x] + [0.0] * r, dtype=np.complex128)
            rs = _make_rapidity_set(model, N, w, b.strategy + "+mirror", verify, dim_cap)
            if rs is None:
                report.failures += 1
            else:
                report.solutions.append(rs)
        report.failures += sub.failures
        report.solutions.sort(key=lambda s: -s.h)
        return report

    solutions: list[RapiditySet] = []

    def add(rs: Optional[RapiditySet]) -> bool:
        if rs is None or not _is_new(solutions, _rs_key(rs), _rs_key):
            return False
        solutions.append(rs)
        return True

    if strategy == "brackets":
        if N != 2:
            raise ValueError("the brackets strategy applies to N = 2 only")
        for h in n2_energies(model):
            alpha = alpha_from_energy(model, h)
            add(_make_rapidity_set(model, N, np.array([1.0 / alpha]), "brackets", verify, dim_cap))
    elif strategy == "continuation":
        for gamma in _GAMMAS:
            ends, failures = _continuation_pass(model, N, False, gamma)
            report.failures += failures
            for w in ends:
                add(_make_rapidity_set(model, N, np.array(w), "continuation", verify, dim_cap))
            if report.expected is None or len(solutions) >= report.expected:
                break
    elif strategy == "random":
        report.failures += _random_nonzero(model, N, seed, max_starts, solutions, add, report.expected, verify, dim_cap)
    if strategy == "oracle" or (oracle_fallback and report.expected is not None and len(solutions) < report.expected):
        levels = _oracle_levels(model, N, oracle_h, dim_cap)
        report.failures += _oracle_seeded_nonzero(model, N, seed, max_starts, levels, solutions, add, verify, dim_cap)
    solutions.sort(key=lambda s: -s.h)
    report.solutions = solutions
    return report


def _random_x_starts(model: ModelSpace, N: int, zero_energy: bool, rng: np.random.Generator, count: int):
    """Random start points: perturbed multisets of the decoupled roots, as ``x``."""
    hom = _homotopy_for(model, N, zero_energy)
    roots = hom.decoupled_roots()
    if roots.size == 0 or hom.M == 0:
        return
    spread = float(np.ptp(np.concatenate([roots.real, hom.f]))) or 1.0
    for _ in range(count):
        pick = roots[rng.integers(0, roots.size, size=hom.M)]
        noise = (rng.normal(size=hom.M) + 1j * rng.normal(size=hom.M)) * 0.05 * spread
        w = pick + noise
        if np.any(np.abs(w) < 1e-6):
            continue
        yield 1.0 / w


def _random_nonzero(model, N, seed, max_starts, solutions, add, expected, verify, cap) -> int:
    rng = np.random.default_rng(seed)
    failures = 0
    for x0 in _random_x_starts(model, N, False, rng, max_starts):
        if expected is not None and len(solutions) >= expected:
            break
        beta = complex(np.sum(1.0 / x0))
        if abs(beta) < 1e-9:
            continue
        alpha0 = 1.0 / beta
        known = [np.append(np.array(s.y, dtype=np.complex128), s.alpha) for s in solutions]
        w = None
        try:
            y, alpha = _newton_nonzero(model, x0 / alpha0, alpha0, known)
            w = 1.0 / (alpha * y)
        except NoConvergence:
            # the same equations in the inverse variables converge from other starts
            known_w = [np.array([0.0 if _is_inf(x) else 1.0 / x for x in s.x], dtype=np.complex128) for s in solutions]
            try:
                w = _newton_inverse(model, N, 1.0 / x0, known_w)
            except NoConvergence:
                pass
        if w is None or not add(_make_rapidity_set(model, N, w, "random", verify, cap)):
            failures += 1
    return failures


def _newton_inverse(model: ModelSpace, N: int, w0, known=()) -> NDArray[np.complex128]:
    """Damped Newton on the nonzero-level equations written in ``w = 1/x``."""
    hom = _homotopy_for(model, N, False)

    def valid(w):
        return bool(np.all(np.isfinite(w)) and _min_separation(w, hom.f) > POLE_RADIUS)

    return _damped_newton(
        lambda w: hom.system(w, 1.0)[0], lambda w: hom.system(w, 1.0)[1], np.asarray(w0, dtype=np.complex128), list(known), valid
    )


def _oracle_seeded_nonzero(model, N, seed, max_starts, levels, solutions, add, verify, cap) -> int:
    """For each oracle energy not yet matched, start Newton at ``alpha(h)`` with random ``y``."""
    rng = np.random.default_rng(seed)
    failures = 0
    per_level = max(1, max_starts // max(1, len(levels)))
    for h in levels:
        if any(abs(s.h - h) <= 1e-8 * max(1.0, abs(h)) for s in solutions):
            continue
        try:
            alpha = alpha_from_energy(model, float(h))
        except NonPhysicalSolution:
            failures += 1
            continue
        for x0 in _random_x_starts(model, N, False, rng, per_level):
            # rescale the start so that it satisfies the constraint sum 1/y = 1 exactly
            y0 = x0 / alpha
            s1 = complex(np.sum(1.0 / y0))
            if abs(s1) < 1e-9:
                continue
            y0 = y0 * s1
            try:
                y, alpha_fit = _newton_nonzero(model, y0, alpha)
            except NoConvergence:
                failures += 1
                continue
            rs = _make_rapidity_set(model, N, 1.0 / (alpha_fit * y), "oracle", verify, cap)
            if rs is not None and abs(rs.h - h) <= 1e-8 * max(1.0, abs(h)) and add(rs):
                break
            failures += 1
    return failures


def _newton_fixed_alpha(model: ModelSpace, y0, alpha: complex):
    """Solve the ``F_i`` equations for ``y`` at fixed ``alpha``."""
    n = len(y0)
    c2 = model.c_squared

    def residual(y):
        return nonzero_residuals(model, y, alpha)[:n]

    def jacobian(y):
        return _nonzero_jacobian(model, y, alpha)[:n, :n]

    def valid(y):
        return bool(np.all(np.isfinite(y)) and np.all(np.abs(1.0 - alpha * y[:, None] * c2[None, :]) > POLE_RADIUS))

    y = _damped_newton(residual, jacobian, np.asarray(y0, dtype=np.complex128), [], valid)
    return y, alpha


def solve_zero(
    model: ModelSpace,
    N: int,
    seed: int = 0,
    strategy: str = "continuation",
    *,
    max_starts: int = 200,
    verify: bool = True,
    dim_cap: int = DEFAULT_DIM_CAP,
) -> SolveReport:
    """Root sets of the zero-energy states of sector ``N`` (``N >= 1``).

    A zero-energy state is annihilated by ``S-_0``; it is a lowest-weight
    vector of the total quasi-spin with projection ``N - Omega_total/2``,
    so none exists for ``2N > Omega_total``.
    """
    if N < 1:
        raise ValueError("solve_zero needs N >= 1")
    if strategy not in ("continuation", "random", "brackets"):
        raise ValueError(f"unknown strategy {strategy!r} for zero-energy roots")
    report = SolveReport(N=N, kind="zero", strategy=strategy)
    if N > model.omega_total:
        report.expected = 0
        return report
    if _sector_cap_ok(model, N, dim_cap):
        report.expected = zero_multiplicity(model, N)
    if 2 * N > model.omega_total:
        return report
    found: list[ZeroModeRoots] = []

    def add(zr: Optional[ZeroModeRoots]) -> bool:
        if zr is None or not _is_new(found, np.array(zr.x), lambda z: np.array(z.x)):
            return False
        found.append(zr)
        return True

    if strategy == "brackets":
        if N != 1:
            raise ValueError("the brackets strategy applies to N = 1 only")
        for x in _zero_brackets(model):
            add(_make_zero_roots(model, 1, np.array([x], dtype=np.complex128), "brackets", verify, dim_cap))
    elif strategy == "continuation":
        for gamma in _GAMMAS:
            ends, failures = _continuation_pass(model, N, True, gamma)
            report.failures += failures
            for w in ends:
                add(_make_zero_roots(model, N, 1.0 / np.array(w), "continuation", verify, dim_cap))
            if report.expected is None or len(found) >= report.expected:
                break
    else:
        rng = np.random.default_rng(seed)
        scale = 1.0 / float(np.min(model.c_squared))
        for _ in range(max_starts):
            if report.expected is not None and len(found) >= report.expected:
                break
            x0 = (rng.random(N) + 0.2j * rng.normal(size=N)) * scale * 1.5
            try:
                x = _newton_zero(model, x0, [np.array(z.x) for z in found])
            except NoConvergence:
                report.failures += 1
                continue
            if not add(_make_zero_roots(model, N, x, "random", verify, dim_cap)):
                report.failures += 1
    found.sort(key=lambda z: tuple((v.real, v.imag) for v in sorted(z.x, key=lambda v: (v.real, v.imag))))
    report.solutions = found
    return report


def _zero_brackets(model: ModelSpace) -> list[float]:
    """Real one-pair zero-energy roots, one between each pair of consecutive poles."""
    poles = np.unique(1.0 / model.c_squared)

    def g(x: float) -> float:
        return float(np.sum(model.omegas * model.c_squared / (1.0 - x * model.c_squared)))

    out = []
    for a, b in zip(poles[:-1], poles[1:]):
        eps = 1e-13 * (b - a)
        out.append(scipy.optimize.brentq(g, a + eps, b - eps, xtol=1e-15, rtol=1e-15, maxiter=500))
    return out


def solve_lowest(model: ModelSpace, N: int, *, verify: bool = True, dim_cap: int = DEFAULT_DIM_CAP) -> RapiditySet:
    """The most-bound (largest ``h``) nonzero level of sector ``N >= 1``.

    Tracks a single continuation path that starts with every root at the
    most negative decoupled root, which ends on the most-bound level for
    every built-in model. Falls back to the full solve if that path fails.
    Callers needing a certified answer compare with the oracle, as the
    table reproduction does.
    """
    total = model.omega_total
    if N < 1 or N > total:
        raise ValueError(f"sector N={N} has no nonzero level")
    if N == 1:
        return RapiditySet(N=1, y=(), alpha=INF, h=n1_energy(model), strategy="closed-form", residual=0.0)
    if N == total:
        return solve_nonzero(model, N, verify=verify, dim_cap=dim_cap).solutions[0]
    # 2 <= partner <= N because 2 <= N < total
    partner = total + 1 - N if N > (total + 1) // 2 else N
    w = _lowest_path(model, partner)
    rs = None
    if w is not None:
        w_full = np.concatenate([w, np.zeros(N - partner, dtype=np.complex128)])
        rs = _make_rapidity_set(model, N, w_full, "continuation" + ("+mirror" if partner != N else ""), verify, dim_cap)
    if rs is None:
        full = solve_nonzero(model, N, verify=verify, dim_cap=dim_cap)
        if not full.solutions:
            raise NoConvergence(f"no nonzero solution found for N={N}")
        rs = full.solutions[0]
    return rs
