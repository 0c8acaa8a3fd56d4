"""Discrete integral operators for the boundary-value kernel pair.

The continuous kernel is (1/pi) Im[...], its companion (1/pi) Re[...]
of the same Cauchy-type expression; the companion kernel's cotangent
singularity is peeled off and applied spectrally per component, leaving
a continuous remainder that the trapezoidal rule handles.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import accel
from .geometry import Discretization

__all__ = [
    "RHCoefficient",
    "coefficient",
    "kernel_value",
    "assemble_N",
    "apply_M",
    "conjugate",
    "DiscreteOperators",
]


@dataclass(frozen=True)
class RHCoefficient:
    """Coefficient A(t) of the boundary relation Re[A f] = data.

    theta is 0 on Dirichlet (plate) intervals and pi/2 on Neumann
    (wall) intervals.  For a bounded field A = exp(-i theta)(eta - alpha)
    with alpha an interior anchor; for an unbounded field A = exp(-i theta).
    """

    theta: np.ndarray
    values: np.ndarray
    bounded: bool
    alpha: complex | None = None

    def adot_over_a(self, disc: Discretization) -> np.ndarray:
        """Logarithmic derivative dA/dt / A at the nodes."""
        if not self.bounded:
            return np.zeros(disc.total, dtype=complex)
        return disc.deta / (disc.eta - self.alpha)


def coefficient(disc: Discretization, n_plates: int, bounded: bool, alpha=None) -> RHCoefficient:
    """Build A(t) for a discretization whose first n_plates components
    are plates and the rest walls."""
    theta = np.zeros(disc.total)
    theta[n_plates * disc.n :] = 0.5 * np.pi
    values = np.exp(-1j * theta)
    if bounded:
        if alpha is None:
            raise ValueError("bounded field requires the anchor point alpha")
        alpha = complex(alpha)
        values = values * (disc.eta - alpha)
        if np.min(np.abs(values)) == 0.0:
            raise ValueError("alpha lies on the boundary")
    return RHCoefficient(theta=theta, values=values, bounded=bounded,
                         alpha=None if not bounded else alpha)


def _diag_ratio(disc: Discretization, coef: RHCoefficient) -> np.ndarray:
    """eta''/(2 eta') - Adot/A at the nodes (the diagonal kernel limit)."""
    return disc.ddeta / (2.0 * disc.deta) - coef.adot_over_a(disc)


def kernel_value(disc: Discretization, coef: RHCoefficient, i: int, j: int) -> float:
    """Continuous-kernel entry at node pair (s_i, t_j), diagonal by limit."""
    if i == j:
        return float(_diag_ratio(disc, coef)[i].imag) / np.pi
    dz = disc.eta[j] - disc.eta[i]
    if dz == 0.0:
        raise ValueError(f"coincident nodes {i} and {j} on distinct components")
    q = coef.values[i] / coef.values[j] * disc.deta[j] / dz
    return float(q.imag) / np.pi


def conjugate(values: np.ndarray, n: int) -> np.ndarray:
    """Periodic conjugation applied blockwise: e^{ikt} -> i sgn(k) e^{ikt},
    with the k = 0 and Nyquist modes mapped to zero."""
    values = np.asarray(values, dtype=float)
    out = np.empty_like(values)
    for b0 in range(0, values.shape[0], n):
        coef = np.fft.rfft(values[b0 : b0 + n])
        coef[0] = 0.0
        coef[1 : n // 2] *= 1j
        coef[n // 2] = 0.0
        out[b0 : b0 + n] = np.fft.irfft(coef, n)
    return out


class DiscreteOperators:
    """Nystrom operators, dense when they fit, entrywise otherwise.

    ``apply_N``/``apply_M1`` use stored matrices below ``max_dense``
    total nodes and recompute entries on the fly above it.
    """

    def __init__(self, disc: Discretization, coef: RHCoefficient, max_dense: int = 16384):
        self.disc = disc
        self.coef = coef
        self._avals = np.ascontiguousarray(coef.values)
        self._diag = np.ascontiguousarray(_diag_ratio(disc, coef))
        self.dense = disc.total <= int(max_dense)
        self.nmat = None
        self.m1mat = None
        if self.dense:
            self.nmat, self.m1mat = accel.operator_matrices(
                np.ascontiguousarray(disc.eta),
                np.ascontiguousarray(disc.deta),
                self._avals,
                self._diag,
                disc.n,
            )

    def apply_N(self, x: np.ndarray) -> np.ndarray:
        if self.nmat is not None:
            return self.nmat @ x
        return accel.n_matvec(
            self.disc.eta, self.disc.deta, self._avals, self._diag, self.disc.n,
            np.ascontiguousarray(x, dtype=float),
        )

    def apply_M1(self, x: np.ndarray) -> np.ndarray:
        if self.m1mat is not None:
            return self.m1mat @ x
        return accel.m1_matvec(
            self.disc.eta, self.disc.deta, self._avals, self._diag, self.disc.n,
            np.ascontiguousarray(x, dtype=float),
        )

    def apply_M(self, phi: np.ndarray) -> np.ndarray:
        """Full companion operator: spectral cotangent part + remainder."""
        return conjugate(phi, self.disc.n) + self.apply_M1(phi)


def assemble_N(disc: Discretization, coef: RHCoefficient) -> np.ndarray:
    """Dense weighted Nystrom matrix of the continuous kernel."""
    return DiscreteOperators(disc, coef, max_dense=disc.total).nmat


def apply_M(disc: Discretization, coef: RHCoefficient, phi: np.ndarray) -> np.ndarray:
    """One-shot application of the companion operator to node values."""
    return DiscreteOperators(disc, coef, max_dense=0).apply_M(phi)
