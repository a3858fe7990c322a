"""Spin-1 / spin-1/2 Heisenberg pair in a field on the spin-1/2 site.

    H = J (S1x sx + S1y sy + S1z sz) + B (1 x sz)

The qubit operators are full Pauli matrices (eigenvalues +-1), not sigma/2.
Units are dimensionless with k_B = 1.

Basis ordering used for every 6x6 matrix in the package is |x, y> with the
qutrit value x in (1, 0, -1) as the slow index and the qubit value y in
(1, 0) ("up", "down") as the fast one::

    0: |1,1>   1: |1,0>   2: |0,1>   3: |0,0>   4: |-1,1>   5: |-1,0>

This is the ``numpy.kron`` layout of S1z = diag(1, 0, -1) and sz = diag(1, -1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from . import linalg
from .errors import CrossCheckError, DegenerateCoupling, NegativeField, NonPositiveTemperature

BASIS = ((1, 1), (1, 0), (0, 1), (0, 0), (-1, 1), (-1, 0))

#: |J| below this routes to the numeric-only path (c, d coefficients blow up)
CLOSED_FORM_MIN_COUPLING = 1e-3
#: levels within this distance of the minimum form the ground manifold
GROUND_DEGENERACY_TOL = 1e-9
CROSS_CHECK_TOL = 1e-9

FINITE_T = "finite_T"
T0_LIMIT = "t0_limit"
MODES = (FINITE_T, T0_LIMIT)


def basis_index(x: int, y: int) -> int:
    """Row of |x, y> in the product basis."""
    if x not in (1, 0, -1) or y not in (1, 0):
        raise ValueError(f"no basis state |{x},{y}>")
    return 2 * (1 - x) + (1 - y)


@dataclass(frozen=True)
class ModelParams:
    """One physical configuration (J, B, T).

    ``B < 0`` is rejected unless ``allow_negative_field`` is set; ``T = 0`` is
    stored as-is and only accepted by routines with a ground-state mode.
    """

    J: float
    B: float
    T: float = 1.0
    allow_negative_field: bool = field(default=False, compare=False)

    def __post_init__(self):
        for name in ("J", "B", "T"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, float(value))
        if self.T < 0:
            raise NonPositiveTemperature(f"temperature must be >= 0, got {self.T}")
        if self.B < 0 and not self.allow_negative_field:
            raise NegativeField(
                f"B = {self.B} < 0; pass allow_negative_field=True to use a reversed field"
            )


class SpinOperators(NamedTuple):
    Sx: np.ndarray
    Sy: np.ndarray
    Sz: np.ndarray
    sx: np.ndarray
    sy: np.ndarray
    sz: np.ndarray


def spin_operators() -> SpinOperators:
    """Spin-1 matrices for the qutrit and Pauli matrices for the qubit."""
    r = 1.0 / math.sqrt(2.0)
    Sx = r * np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=complex)
    Sy = r * np.array([[0, -1j, 0], [1j, 0, -1j], [0, 1j, 0]], dtype=complex)
    Sz = np.diag([1.0, 0.0, -1.0]).astype(complex)
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sy = np.array([[0, -1j], [1j, 0]], dtype=complex)
    sz = np.diag([1.0, -1.0]).astype(complex)
    return SpinOperators(Sx, Sy, Sz, sx, sy, sz)


@lru_cache(maxsize=None)
def _hamiltonian_terms():
    ops = spin_operators()
    coupling = (
        linalg.kron(ops.Sx, ops.sx) + linalg.kron(ops.Sy, ops.sy) + linalg.kron(ops.Sz, ops.sz)
    )
    zeeman = linalg.kron(np.eye(3), ops.sz)
    for m in (coupling, zeeman):
        m.setflags(write=False)
    return coupling, zeeman


def build_hamiltonian(p: ModelParams) -> np.ndarray:
    """J * (S1 . s2) + B * (1 x sz) in the fixed product basis."""
    coupling, field_term = _hamiltonian_terms()
    h = p.J * coupling + p.B * field_term
    return 0.5 * (h + h.conj().T)


class Level(NamedTuple):
    label: str
    energy: float
    vector: np.ndarray


class Spectrum(NamedTuple):
    levels: tuple

    @property
    def energies(self) -> np.ndarray:
        return np.array([lv.energy for lv in self.levels])

    def level(self, label: str) -> Level:
        for lv in self.levels:
            if lv.label == label:
                return lv
        raise KeyError(label)


class ClosedFormCoefficients(NamedTuple):
    a_plus: float
    a_minus: float
    b_plus: float
    b_minus: float
    c_plus: float
    c_minus: float
    d_plus: float
    d_minus: float


def closed_form_coefficients(p: ModelParams) -> ClosedFormCoefficients:
    """The a, b, c, d quantities that parametrize the exact eigensystem."""
    J, B = p.J, p.B
    if abs(J) < CLOSED_FORM_MIN_COUPLING:
        raise DegenerateCoupling(
            f"|J| = {abs(J):.3g} < {CLOSED_FORM_MIN_COUPLING}; use the numeric spectrum"
        )
    lam_minus = math.sqrt(4 * B * B - 4 * B * J + 9 * J * J)
    lam_plus = math.sqrt(4 * B * B + 4 * B * J + 9 * J * J)
    a_plus, a_minus = J + lam_minus, J - lam_minus
    b_plus, b_minus = J + lam_plus, J - lam_plus
    k = 2.0 * math.sqrt(2.0) * J
    return ClosedFormCoefficients(
        a_plus,
        a_minus,
        b_plus,
        b_minus,
        (a_plus - 2 * B) / k,
        (a_minus - 2 * B) / k,
        (b_plus + 2 * B) / k,
        (b_minus + 2 * B) / k,
    )


def _two_state(first, second, amp_first, amp_second) -> np.ndarray:
    v = np.zeros(6, dtype=complex)
    v[basis_index(*first)] = amp_first
    v[basis_index(*second)] = amp_second
    return v / np.linalg.norm(v)


def closed_form_spectrum(p: ModelParams) -> Spectrum:
    """Exact labeled eigensystem.

    psi3(+/-) has energy -a(+/-)/2 and carries the *opposite* coefficient
    c(-/+) on |0,0>; psi4(+/-) has energy -b(+/-)/2 with d(+/-) on |1,0>.
    The pairing is verified against the numeric Hamiltonian in the tests.
    """
    cf = closed_form_coefficients(p)
    J, B = p.J, p.B
    e1 = np.zeros(6, dtype=complex)
    e1[basis_index(-1, 0)] = 1.0
    e2 = np.zeros(6, dtype=complex)
    e2[basis_index(1, 1)] = 1.0
    levels = (
        Level("psi1", J - B, e1),
        Level("psi2", J + B, e2),
        Level("psi3+", -cf.a_plus / 2, _two_state((-1, 1), (0, 0), 1.0, cf.c_minus)),
        Level("psi3-", -cf.a_minus / 2, _two_state((-1, 1), (0, 0), 1.0, cf.c_plus)),
        Level("psi4+", -cf.b_plus / 2, _two_state((0, 1), (1, 0), 1.0, -cf.d_plus)),
        Level("psi4-", -cf.b_minus / 2, _two_state((0, 1), (1, 0), 1.0, -cf.d_minus)),
    )
    return Spectrum(levels)


def numeric_spectrum(p: ModelParams, method: str = "lapack") -> linalg.EigenSystem:
    return linalg.hermitian_eigensystem(build_hamiltonian(p), method=method)


def _require_positive_t(T: float) -> None:
    if not T > 0:
        raise NonPositiveTemperature(f"temperature must be > 0 here, got {T}")


def partition_function(p: ModelParams) -> float:
    """Closed-form partition function.

    Z = 2 e^{-J/T} [cosh(B/T) + e^{3J/(2T)} (cosh(L+/(2T)) + cosh(L-/(2T)))]
    with L(+/-) = sqrt(4B^2 +/- 4BJ + 9J^2). Valid for any J, including 0.
    """
    _require_positive_t(p.T)
    J, B, T = p.J, p.B, p.T
    lam_plus = math.sqrt(4 * B * B + 4 * B * J + 9 * J * J)
    lam_minus = math.sqrt(4 * B * B - 4 * B * J + 9 * J * J)
    return 2.0 * math.exp(-J / T) * (
        math.cosh(B / T)
        + math.exp(3 * J / (2 * T)) * (math.cosh(lam_plus / (2 * T)) + math.cosh(lam_minus / (2 * T)))
    )


def boltzmann_partition_function(energies, T: float) -> float:
    _require_positive_t(T)
    return float(np.sum(np.exp(-np.asarray(energies, dtype=float) / T)))


@dataclass(frozen=True, eq=False)
class ThermalState:
    """Gibbs state of the pair.

    In ``t0_limit`` mode ``Z`` is the ground-state degeneracy, i.e. the limit
    of ``Z * exp(E0 / T)`` as T -> 0+. ``Z`` overflows to ``inf`` for very
    small T; ``log_Z`` stays finite.
    """

    params: ModelParams
    rho: np.ndarray
    Z: float
    mode: str = FINITE_T
    ground_degeneracy: int = 0
    log_Z: float = 0.0


def _cross_check(p: ModelParams, values: np.ndarray) -> None:
    if abs(p.J) < CLOSED_FORM_MIN_COUPLING:
        return
    closed = np.sort(closed_form_spectrum(p).energies)
    err = np.max(np.abs(closed - values))
    if err > CROSS_CHECK_TOL:
        raise CrossCheckError(
            f"closed-form and numeric spectra differ by {err:.3g} at J={p.J}, B={p.B}"
        )


def thermal_state(p: ModelParams, mode: str = FINITE_T, cross_check: bool = True) -> ThermalState:
    """Gibbs state from the numeric eigensystem.

    ``finite_T`` requires T > 0. ``t0_limit`` ignores T and returns the
    equal-weight mixture over every level within ``GROUND_DEGENERACY_TOL`` of
    the minimum energy. Unless ``cross_check`` is off, the numeric energies
    are compared to the closed form (skipped for |J| < 1e-3).
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    es = numeric_spectrum(p)
    if cross_check:
        _cross_check(p, es.values)
    shifted = es.values - es.values[0]
    ground = int(np.count_nonzero(shifted <= GROUND_DEGENERACY_TOL))
    if mode == T0_LIMIT:
        weights = np.where(shifted <= GROUND_DEGENERACY_TOL, 1.0, 0.0)
        log_z = math.log(ground)
    else:
        _require_positive_t(p.T)
        weights = np.exp(-shifted / p.T)
        log_z = math.log(np.sum(weights)) - es.values[0] / p.T
    Z = math.exp(log_z) if log_z < 709.0 else math.inf
    weights = weights / np.sum(weights)
    v = es.vectors
    rho = (v * weights) @ v.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return ThermalState(p, rho, Z, mode, ground, log_z)
