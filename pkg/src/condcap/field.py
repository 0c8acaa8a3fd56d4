"""Potential evaluation at interior points, masked grids, harmonic measure."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import geometry
from .bie import SolverOptions
from .condenser import CondenserProblem, CondenserResult, run
from .geometry import Discretization, GeometryError

__all__ = ["cauchy_eval", "PotentialField", "FieldGrid", "harmonic_measure"]


def cauchy_eval(disc: Discretization, f_values: np.ndarray, z, bounded: bool):
    """Analytic extension of boundary values by the Cauchy integral.

    For a bounded field the quotient (normalized) form is used, which is
    exact for constants and keeps accuracy near the boundary; for an
    unbounded field the function decays at infinity and plain
    trapezoidal weights apply.
    """
    from .accel import cauchy_sums

    z_arr = np.atleast_1d(np.asarray(z, dtype=complex))
    num, den = cauchy_sums(disc.eta, disc.deta, f_values, z_arr)
    if bounded:
        out = num / den
    else:
        out = num / (1j * disc.n)
    return out if np.ndim(z) else out[0]


@dataclass
class FieldGrid:
    """Rectangular sample of the potential with location mask.

    ``u`` is NaN wherever ``mask`` is not 'in-field'.
    """

    xs: np.ndarray
    ys: np.ndarray
    u: np.ndarray
    mask: np.ndarray  # array of label strings, shape (ny, nx)

    def rows(self):
        """Yield (x, y, u-or-None, label) in deterministic order."""
        for iy, y in enumerate(self.ys):
            for ix, x in enumerate(self.xs):
                val = self.u[iy, ix]
                yield float(x), float(y), (None if np.isnan(val) else float(val)), str(
                    self.mask[iy, ix]
                )


class PotentialField:
    """Evaluator of the potential from a finished condenser run."""

    def __init__(self, result: CondenserResult):
        self.result = result
        self.case = result.case
        self.disc = result.disc
        self.problem = result.problem

    def evaluate_f(self, z):
        return cauchy_eval(self.disc, self.result.f_boundary, z, self.case.g_bounded)

    def potential_at(self, z):
        """Potential at points of the field (caller keeps z inside)."""
        z_arr = np.atleast_1d(np.asarray(z, dtype=complex))
        fz = self.evaluate_f(z_arr)
        con = self.result.constants
        if self.case.g_bounded:
            u = con.c + ((z_arr - self.problem.alpha) * fz).real
        else:
            u = con.c + fz.real
        for k in range(self.case.m_prime):
            u = u - con.a[k] * np.log(np.abs(z_arr - self.problem.alphas[k]))
        return u if np.ndim(z) else float(u[0])

    def _location_label(self, code: int) -> str:
        if code == geometry.LOC_FIELD:
            return "in-field"
        if code == geometry.LOC_NEAR:
            return "near-boundary"
        if code == geometry.LOC_OUTSIDE:
            ext = self.case.external_index
            if ext is not None and ext < self.problem.m:
                return f"plate-{ext + 1}"
            return "wall"
        j = code - 1
        return f"plate-{code}" if j < self.problem.m else "wall"

    def grid(self, bounds, nx: int, ny: int) -> FieldGrid:
        """Evaluate the potential on a masked rectangular grid.

        bounds = (xmin, xmax, ymin, ymax); points inside plates or walls,
        outside a bounded field, or within the near-boundary band are
        masked and carry no value.
        """
        xmin, xmax, ymin, ymax = (float(b) for b in bounds)
        xs = np.linspace(xmin, xmax, int(nx))
        ys = np.linspace(ymin, ymax, int(ny))
        zz = xs[None, :] + 1j * ys[:, None]
        codes = geometry.locate_points(self.disc, self.case.g_bounded, zz.ravel())
        codes = codes.reshape(zz.shape)
        u = np.full(zz.shape, np.nan)
        infield = codes == geometry.LOC_FIELD
        if np.any(infield):
            u[infield] = self.potential_at(zz[infield])
        labels = np.empty(zz.shape, dtype=object)
        for code in np.unique(codes):
            labels[codes == code] = self._location_label(int(code))
        return FieldGrid(xs=xs, ys=ys, u=u, mask=labels)


def harmonic_measure(components, j: int, z, n: int, alpha=None,
                     options: SolverOptions | None = None,
                     result_out: list | None = None):
    """Harmonic measure of component j: the potential with level 1 on
    component j and 0 on the others, for a wall-free geometry.

    All components must be plates (the construction keeps the measure
    bounded at infinity because the flux constants sum to zero).  For a
    bounded field an interior anchor ``alpha`` is required.
    """
    components = list(components)
    if any(c.role != "plate" for c in components):
        raise GeometryError("harmonic measure is defined for wall-free geometries")
    m = len(components)
    if not 1 <= j <= m:
        raise GeometryError(f"component index {j} outside 1..{m}")
    levels = [1.0 if i == j - 1 else 0.0 for i in range(m)]
    problem = CondenserProblem(plates=components, walls=[], levels=levels, alpha=alpha)
    result = run(problem, n, options)
    if result_out is not None:
        result_out.append(result)
    return PotentialField(result).potential_at(z)
