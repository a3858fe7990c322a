"""Negativity, mutual information and measurement-induced disturbance (MID).

All entropies are base 2, so every correlation quantity is in bits.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import linalg
from .model import (
    FINITE_T,
    ModelParams,
    ThermalState,
    _require_positive_t,
    closed_form_coefficients,
    closed_form_spectrum,
    thermal_state,
)

log = logging.getLogger(__name__)

#: |mu| below this is not counted as a negative partial-transpose eigenvalue
NEGATIVE_EIGENVALUE_CUTOFF = 1e-12
#: reported correlations in [-CLAMP_TOL, 0) are rounded up to zero
CLAMP_TOL = 1e-10
DIAGONAL_TOL = 1e-12


def _negative_part(eigenvalues, cutoff: float) -> float:
    neg = eigenvalues[eigenvalues < -cutoff]
    return float(-np.sum(neg)) if neg.size else 0.0


def negativity(rho, raw: bool = False) -> float:
    """Sum of |negative eigenvalues| of the qutrit partial transpose.

    Eigenvalues in [-1e-12, 0) count as zero unless ``raw`` is set.
    """
    linalg.density_spectrum(rho)
    mu = linalg.hermitian_eigenvalues(linalg.partial_transpose_first(rho))
    return _negative_part(mu, 0.0 if raw else NEGATIVE_EIGENVALUE_CUTOFF)


def negativity_from_trace_norm(rho) -> float:
    """``(||rho^T1||_1 - 1) / 2``."""
    linalg.density_spectrum(rho)
    return (linalg.trace_norm(linalg.partial_transpose_first(rho)) - 1.0) / 2.0


def closed_form_partial_transpose(p: ModelParams) -> np.ndarray:
    """Analytic partial transpose of the Gibbs state.

    Only the diagonal and two off-diagonal pairs are nonzero::

        (0,3): -sum_s d_s w(-b_s/2) / (1 + d_s^2)
        (2,5):  c_- w(-a_+/2) / (1 + c_-^2) + c_+ w(-a_-/2) / (1 + c_+^2)

    where ``w(E) = exp(-E/T)``. Note the first coupling is linear in d_s for
    both branches, which is what the numeric partial transpose gives. Weights
    are computed relative to the ground energy to avoid overflow; the common
    factor cancels against the partition function.
    """
    _require_positive_t(p.T)
    cf = closed_form_coefficients(p)
    J, B, T = p.J, p.B, p.T
    e0 = float(np.min(closed_form_spectrum(p).energies))

    def w(energy):
        return math.exp(-(energy - e0) / T)

    wa_p, wa_m = w(-cf.a_plus / 2), w(-cf.a_minus / 2)
    wb_p, wb_m = w(-cf.b_plus / 2), w(-cf.b_minus / 2)
    nd_p, nd_m = 1 + cf.d_plus**2, 1 + cf.d_minus**2
    nc_p, nc_m = 1 + cf.c_plus**2, 1 + cf.c_minus**2

    r22 = cf.d_minus**2 * wb_m / nd_m + cf.d_plus**2 * wb_p / nd_p
    r33 = wb_m / nd_m + wb_p / nd_p
    r44 = cf.c_minus**2 * wa_p / nc_m + cf.c_plus**2 * wa_m / nc_p
    r55 = wa_p / nc_m + wa_m / nc_p
    r23 = -cf.d_minus * wb_m / nd_m - cf.d_plus * wb_p / nd_p
    r45 = cf.c_minus * wa_p / nc_m + cf.c_plus * wa_m / nc_p
    corner_up, corner_down = w(J + B), w(J - B)

    m = np.diag([corner_up, r22, r33, r44, r55, corner_down]).astype(complex)
    m[0, 3] = m[3, 0] = r23
    m[2, 5] = m[5, 2] = r45
    return m / (corner_up + r22 + r33 + r44 + r55 + corner_down)


def _block_min_eigenvalue(a: float, b: float, c: float) -> float:
    # smaller root of [[a, c], [c, b]], via det / larger root to avoid cancellation
    big = 0.5 * (a + b) + math.hypot(0.5 * (a - b), c)
    return (a * b - c * c) / big if big > 0 else 0.5 * (a + b) - math.hypot(0.5 * (a - b), c)


def negativity_closed_form(p: ModelParams) -> float:
    """Negativity from the analytic partial transpose.

    The matrix splits into two 2x2 blocks, on rows {0, 3} and {2, 5}, plus
    two nonnegative diagonal entries, so only the blocks' smaller roots
    can be negative.
    """
    m = closed_form_partial_transpose(p).real
    roots = np.array(
        [
            _block_min_eigenvalue(m[0, 0], m[3, 3], m[0, 3]),
            _block_min_eigenvalue(m[2, 2], m[5, 5], m[2, 5]),
        ]
    )
    return _negative_part(roots, NEGATIVE_EIGENVALUE_CUTOFF)


def _phase_fix(vectors: np.ndarray) -> np.ndarray:
    out = vectors.copy()
    for k in range(out.shape[1]):
        col = out[:, k]
        idx = np.flatnonzero(np.abs(col) > 1e-12)
        if idx.size:
            z = col[idx[0]]
            out[:, k] = col * (abs(z) / z)
    return out


def marginal_eigenbases(rho):
    """Measurement bases for MID: eigenbases of both reduced states.

    When a marginal is diagonal to within 1e-12 (always the case for the
    thermal states of this model) the computational basis is returned as-is.
    Otherwise eigenvectors are ordered by ascending eigenvalue and phased so
    their first nonzero component is real positive; a degenerate marginal
    makes MID basis dependent and triggers a ``UserWarning``.

    Returns ``None`` when both bases are computational, else a pair of
    unitaries for :func:`local_dephase`.
    """
    bases = []
    for keep in ("first", "second"):
        r = linalg.partial_trace(rho, keep)
        off = r - np.diag(np.diag(r))
        if np.max(np.abs(off), initial=0.0) <= DIAGONAL_TOL:
            bases.append(None)
            continue
        es = linalg.hermitian_eigensystem(r)
        if np.any(np.diff(es.values) < 1e-10):
            warnings.warn(
                f"reduced state on the {keep} factor is degenerate; MID depends on the "
                "choice of eigenbasis",
                stacklevel=2,
            )
        bases.append(_phase_fix(es.vectors))
    if all(b is None for b in bases):
        return None
    return tuple(np.eye(d, dtype=complex) if b is None else b for b, d in zip(bases, (3, 2)))


def local_dephase(rho, bases=None) -> np.ndarray:
    """Apply complete local projective measurements on both factors.

    With ``bases=None`` the projectors are the computational basis states and
    the result is simply the diagonal of ``rho``. Otherwise ``bases`` is a
    pair of unitaries whose columns define the projectors of each factor.
    """
    linalg.density_spectrum(rho)
    rho = linalg.as_matrix(rho)
    if bases is None:
        return np.diag(np.diag(rho))
    u = linalg.kron(*bases)
    rotated = u.conj().T @ rho @ u
    return u @ np.diag(np.diag(rotated)) @ u.conj().T


def _entropies(rho):
    return (
        linalg.von_neumann_entropy(rho),
        linalg.von_neumann_entropy(linalg.partial_trace(rho, "first")),
        linalg.von_neumann_entropy(linalg.partial_trace(rho, "second")),
    )


def mutual_information(rho) -> float:
    """``S(rho_1) + S(rho_2) - S(rho)`` in bits."""
    joint, first, second = _entropies(rho)
    return first + second - joint


def measurement_induced_disturbance(rho) -> float:
    """MID of an arbitrary 3x2 state, measured in its marginal eigenbases."""
    return mutual_information(rho) - _classical_correlation(rho, marginal_eigenbases(rho))


def _clamp(name: str, value: float, params) -> float:
    if value >= 0.0:
        return value
    if value >= -CLAMP_TOL:
        return 0.0
    log.warning("%s = %.3g < 0 at %s; reporting raw value", name, value, params)
    return value


@dataclass(frozen=True)
class CorrelationReport:
    """Per-point results. Unsuffixed correlations are clamped, ``*_raw`` are not."""

    params: ModelParams
    mode: str
    Z: float
    negativity: float
    mid: float
    mutual_information: float
    classical_correlation: float
    entropy_joint: float
    entropy_qutrit: float
    entropy_qubit: float
    negativity_raw: float
    mid_raw: float
    mutual_information_raw: float
    classical_correlation_raw: float

    def as_dict(self) -> dict:
        out = {"J": self.params.J, "B": self.params.B, "T": self.params.T, "mode": self.mode}
        for name in self.__dataclass_fields__:
            if name not in ("params", "mode"):
                out[name] = getattr(self, name)
        return out


def _classical_correlation(rho, bases) -> float:
    if bases is None:
        # product-basis measurement: all three entropies are Shannon entropies
        # of diagonals, no eigensolve needed
        joint = np.diag(rho).real
        first = joint.reshape(3, 2).sum(axis=1)
        second = joint.reshape(3, 2).sum(axis=0)
        return (linalg.shannon_entropy(first) + linalg.shannon_entropy(second)
                - linalg.shannon_entropy(joint))
    return mutual_information(local_dephase(rho, bases))


def correlation_report(state: ThermalState) -> CorrelationReport:
    rho = state.rho
    joint, first, second = _entropies(rho)
    mi = first + second - joint
    cc = _classical_correlation(rho, marginal_eigenbases(rho))
    q = mi - cc
    p = state.params
    mu = linalg.hermitian_eigenvalues(linalg.partial_transpose_first(rho))
    n_raw = _negative_part(mu, 0.0)
    n = _negative_part(mu, NEGATIVE_EIGENVALUE_CUTOFF)
    mi_c = _clamp("mutual_information", mi, p)
    cc_c = _clamp("classical_correlation", cc, p)
    return CorrelationReport(
        params=p,
        mode=state.mode,
        Z=state.Z,
        negativity=n,
        # keeps mid == mutual_information - classical_correlation after clamping
        mid=_clamp("mid", mi_c - cc_c, p),
        mutual_information=mi_c,
        classical_correlation=cc_c,
        entropy_joint=joint,
        entropy_qutrit=first,
        entropy_qubit=second,
        negativity_raw=n_raw,
        mid_raw=q,
        mutual_information_raw=mi,
        classical_correlation_raw=cc,
    )


def mid(p: ModelParams, mode: str = FINITE_T) -> CorrelationReport:
    """Full correlation report for the Gibbs state at ``p``."""
    return correlation_report(thermal_state(p, mode))
