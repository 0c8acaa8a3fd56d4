"""Second-kind solver for the boundary integral equation.

Given boundary data g sampled at the nodes, computes the density mu
solving (I - N) mu = -M g and the piecewise-constant part
h = [M mu - (I - N) g] / 2, whose per-component means feed the
constants system of the condenser layer.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
from scipy.sparse.linalg import LinearOperator, gmres

from .geometry import Discretization
from .kernels import DiscreteOperators, RHCoefficient

__all__ = ["SolverOptions", "SolverError", "BieSolution", "GnkSolver", "solve_gnk", "linear_solve"]

DIRECT_MAX = 4096  # dense LU below this many total nodes (in auto mode)
DENSE_MAX = 16384  # above this, operators are applied entrywise


class SolverError(RuntimeError):
    """Linear solve failed (no convergence or singular operator)."""


@dataclass(frozen=True)
class SolverOptions:
    tol: float = 1e-14
    maxit: int = 100
    mode: str = "auto"  # 'direct' | 'iterative' | 'auto'
    max_dense: int = DENSE_MAX

    def resolve_mode(self, total: int) -> str:
        if self.mode != "auto":
            return self.mode
        return "direct" if total <= DIRECT_MAX else "iterative"


@dataclass
class BieSolution:
    """Density mu, piecewise part h, and per-component means of h."""

    mu: np.ndarray
    h: np.ndarray
    h_means: np.ndarray
    h_deviation: float
    iterations: int = 0
    residual: float = 0.0


def linear_solve(op, rhs: np.ndarray, options: SolverOptions | None = None):
    """Solve op x = rhs; op is a dense matrix or a LinearOperator.

    Direct mode factorizes the dense matrix; iterative mode runs
    restart-free GMRES at the requested relative-residual tolerance.
    """
    options = options or SolverOptions()
    n = rhs.shape[0]
    mode = options.resolve_mode(n)
    if mode == "direct":
        if not isinstance(op, np.ndarray):
            raise SolverError("direct mode needs a dense matrix")
        try:
            return sla.solve(op, rhs)
        except sla.LinAlgError as exc:
            raise SolverError(f"singular operator: {exc}") from exc
    x, info = gmres(
        op, rhs, rtol=options.tol, atol=0.0, restart=options.maxit, maxiter=1
    )
    if info != 0:
        res = float(np.linalg.norm(op @ x - rhs) / np.linalg.norm(rhs))
        raise SolverError(
            f"GMRES did not reach tol={options.tol} within {options.maxit} "
            f"iterations (relative residual {res:.3e})"
        )
    return x


class GnkSolver:
    """Shared-operator solver for several right-hand boundary data sets.

    Assembles the discrete operators once; in direct mode the LU
    factorization of (I - N) is reused across all data sets.
    """

    def __init__(self, disc: Discretization, coef: RHCoefficient,
                 options: SolverOptions | None = None):
        self.disc = disc
        self.coef = coef
        self.options = options or SolverOptions()
        self.ops = DiscreteOperators(disc, coef, max_dense=self.options.max_dense)
        self.mode = self.options.resolve_mode(disc.total)
        if self.mode == "direct" and not self.ops.dense:
            raise SolverError("direct mode requested beyond the dense-assembly limit")
        self._lu = None

    def _system_matrix(self) -> np.ndarray:
        a = -self.ops.nmat
        np.fill_diagonal(a, a.diagonal() + 1.0)
        return a

    def solve(self, gamma: np.ndarray) -> BieSolution:
        gamma = np.ascontiguousarray(gamma, dtype=float)
        rhs = -self.ops.apply_M(gamma)
        iters = 0
        if self.mode == "direct":
            if self._lu is None:
                try:
                    self._lu = sla.lu_factor(self._system_matrix())
                except sla.LinAlgError as exc:
                    raise SolverError(f"singular discrete operator: {exc}") from exc
            mu = sla.lu_solve(self._lu, rhs)
        else:
            counter = _IterCounter()
            op = LinearOperator(
                (self.disc.total, self.disc.total),
                matvec=lambda x: x - self.ops.apply_N(x),
                dtype=float,
            )
            mu, info = gmres(
                op, rhs, rtol=self.options.tol, atol=0.0,
                restart=self.options.maxit, maxiter=1, callback=counter,
                callback_type="pr_norm",
            )
            iters = counter.count
            if info != 0:
                res = float(
                    np.linalg.norm(mu - self.ops.apply_N(mu) - rhs)
                    / max(np.linalg.norm(rhs), 1e-300)
                )
                raise SolverError(
                    f"GMRES did not reach tol={self.options.tol} within "
                    f"{self.options.maxit} iterations (relative residual {res:.3e})"
                )
        h = 0.5 * (self.ops.apply_M(mu) - gamma + self.ops.apply_N(gamma))
        per = h.reshape(self.disc.n_components, self.disc.n)
        means = per.mean(axis=1)
        dev = float(np.max(np.abs(per - means[:, None])))
        res = float(
            np.linalg.norm(mu - self.ops.apply_N(mu) - rhs)
            / max(np.linalg.norm(rhs), 1e-300)
        )
        return BieSolution(mu=mu, h=h, h_means=means, h_deviation=dev,
                           iterations=iters, residual=res)


class _IterCounter:
    def __init__(self):
        self.count = 0

    def __call__(self, _):
        self.count += 1


def solve_gnk(disc: Discretization, coef: RHCoefficient, gamma: np.ndarray,
              options: SolverOptions | None = None) -> BieSolution:
    """One-shot convenience wrapper around :class:`GnkSolver`."""
    return GnkSolver(disc, coef, options).solve(gamma)
