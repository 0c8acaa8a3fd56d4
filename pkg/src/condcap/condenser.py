"""Condenser model: classification, boundary data, constants, capacity.

A condenser is a set of plate components held at prescribed potentials
inside a host domain whose remaining boundary walls are insulating.
The capacity is 2*pi * sum_k levels_k * a_k where the a_k are the flux
constants recovered from the piecewise-constant parts of the integral
equation solutions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import geometry
from .bie import BieSolution, GnkSolver, SolverError, SolverOptions
from .geometry import (
    BoundaryComponent,
    Discretization,
    GeometryError,
    discretize,
    signed_area,
    winding_number,
)
from .kernels import RHCoefficient, coefficient

__all__ = [
    "CondenserProblem",
    "CaseInfo",
    "ConstantsSolution",
    "CondenserResult",
    "classify",
    "build_coefficient",
    "build_gamma",
    "solve_constants",
    "constants_system",
    "capacity",
    "run",
]


@dataclass
class CondenserProblem:
    """Plates with potential levels, walls, and anchor points.

    ``alphas[k]`` anchors the logarithmic source of plate k; it defaults
    to the plate's centroid.  ``alpha`` is a point of the field domain,
    required whenever the field is bounded.
    """

    plates: list
    walls: list = field(default_factory=list)
    levels: list = field(default_factory=list)
    alphas: list | None = None
    alpha: complex | None = None

    def __post_init__(self):
        if len(self.plates) < 2:
            raise GeometryError("a condenser needs at least two plates")
        if len(self.levels) != len(self.plates):
            raise GeometryError(
                f"{len(self.plates)} plates but {len(self.levels)} potential levels"
            )
        for c in self.plates:
            if c.role != "plate":
                raise GeometryError("component in plate list has role " + c.role)
        for c in self.walls:
            if c.role != "neumann":
                raise GeometryError("component in wall list has role " + c.role)
        if self.alphas is None:
            self.alphas = [c.interior_point() for c in self.plates]
        else:
            self.alphas = [
                complex(a) if a is not None else c.interior_point()
                for a, c in zip(self.alphas, self.plates)
            ]
        if len(self.alphas) != len(self.plates):
            raise GeometryError("need one anchor point per plate")
        self.levels = [float(v) for v in self.levels]
        if self.alpha is not None:
            self.alpha = complex(self.alpha)

    @property
    def m(self) -> int:
        return len(self.plates)

    @property
    def ell(self) -> int:
        return len(self.walls)

    @property
    def components(self) -> list:
        return list(self.plates) + list(self.walls)


@dataclass(frozen=True)
class CaseInfo:
    """Boundedness classification of the field and host domains."""

    g_bounded: bool
    b_bounded: bool
    m_prime: int
    ell_prime: int
    external_index: int | None  # 0-based index into components, or None

    @property
    def label(self) -> str:
        return "II" if self.g_bounded and not self.b_bounded else "I"


def _check_separation(disc: Discretization) -> None:
    """Sampled guard against touching components."""
    step = max(1, disc.n // 128)
    pts = [disc.eta[disc.block(j)][::step] for j in range(disc.n_components)]
    scale = max(np.max(np.abs(p)) for p in pts) + 1.0
    for j in range(disc.n_components):
        for i in range(j + 1, disc.n_components):
            d = np.min(np.abs(pts[j][:, None] - pts[i][None, :]))
            if d < 1e-9 * scale:
                raise GeometryError(f"components {j} and {i} touch or overlap")


def _encloses(disc: Discretization, j: int, i: int) -> bool:
    """Does component j wind around component i?"""
    nodes = disc.eta[disc.block(i)]
    last = None
    for off in (0, disc.n // 4, disc.n // 2, 3 * disc.n // 4):
        try:
            return winding_number(disc, j, nodes[off]) != 0
        except GeometryError as exc:
            last = exc
    raise GeometryError(
        f"components {i} and {j} are too close to separate: {last}"
    )


def classify(problem: CondenserProblem, disc: Discretization | None = None,
             n: int = 256) -> CaseInfo:
    """Determine boundedness, the external component, and m', l'.

    Validates orientations ("field on the left"), the ordering
    convention (an external plate must be the last plate, an external
    wall the last wall), disjointness, and the anchor points.
    """
    comps = problem.components
    if disc is None or disc.components != tuple(comps):
        disc = discretize(comps, n)
    m, ell = problem.m, problem.ell
    nc = m + ell

    enclosed_by = [
        [i for i in range(nc) if i != j and _encloses(disc, j, i)] for j in range(nc)
    ]
    external = None
    for j in range(nc):
        if len(enclosed_by[j]) == nc - 1:
            external = j
        elif enclosed_by[j]:
            inner = enclosed_by[j][0]
            raise GeometryError(
                f"component {j} encloses component {inner} without enclosing all "
                "others; nested plates/walls do not bound a connected field"
            )

    for j in range(nc):
        area = signed_area(disc, j)
        want_ccw = j == external
        if want_ccw != (area > 0):
            raise GeometryError(
                f"component {j} is oriented {'ccw' if area > 0 else 'cw'} but must "
                f"be {'ccw' if want_ccw else 'cw'} so the field stays on its left"
            )

    if external is None:
        info = CaseInfo(g_bounded=False, b_bounded=False, m_prime=m,
                        ell_prime=ell, external_index=None)
    elif external < m:
        if external != m - 1:
            raise GeometryError(
                f"the external plate must be listed last (found at plate {external})"
            )
        info = CaseInfo(g_bounded=True, b_bounded=False, m_prime=m - 1,
                        ell_prime=ell, external_index=external)
    else:
        if external != nc - 1:
            raise GeometryError(
                f"the external wall must be listed last (found at wall {external - m})"
            )
        info = CaseInfo(g_bounded=True, b_bounded=True, m_prime=m,
                        ell_prime=ell - 1, external_index=external)

    _check_separation(disc)
    for k in range(info.m_prime):
        # source plates are always holes of the field, traversed cw
        if winding_number(disc, k, problem.alphas[k]) != -1:
            raise GeometryError(
                f"anchor point {problem.alphas[k]} is not inside plate {k}"
            )
    if info.g_bounded:
        if problem.alpha is None:
            raise GeometryError("bounded field requires the anchor point alpha")
        loc = geometry.locate_points(disc, True, problem.alpha)[0]
        if loc != geometry.LOC_FIELD:
            raise GeometryError(f"alpha={problem.alpha} does not lie in the field")
    return info


def build_coefficient(case: CaseInfo, problem: CondenserProblem,
                      disc: Discretization) -> RHCoefficient:
    return coefficient(disc, problem.m, case.g_bounded, problem.alpha)


def _unwrapped_arg(w: np.ndarray) -> tuple[np.ndarray, float]:
    """Continuous argument along a closed node loop and its closure gap.

    The gap is the net angle swept over one full loop (2*pi times the
    winding number about the origin); it must vanish for the data to be
    periodic on the component.
    """
    inc = np.empty(len(w))
    inc[0] = np.angle(w[0])
    inc[1:] = np.angle(w[1:] / w[:-1])
    arg = np.cumsum(inc)
    closure = float(arg[-1] - arg[0] + np.angle(w[0] / w[-1]))
    return arg, closure


def build_gamma(case: CaseInfo, problem: CondenserProblem, disc: Discretization,
                k: int) -> np.ndarray:
    """Boundary data of the k-th logarithmic source (0-based, k < m').

    On plate intervals this is log|eta - alpha_k| (minus log|eta - alpha|
    when the external component is a wall); on wall intervals it is the
    continuously tracked argument, which closes up because the source
    points never lie inside a wall.
    """
    if not 0 <= k < case.m_prime:
        raise ValueError(f"source index {k} outside 0..{case.m_prime - 1}")
    ratio_form = case.ell_prime == problem.ell - 1
    w = disc.eta - problem.alphas[k]
    if ratio_form:
        w = w / (disc.eta - problem.alpha)
    gamma = np.empty(disc.total)
    n = disc.n
    for j in range(disc.n_components):
        blk = disc.block(j)
        wj = w[blk]
        if j < problem.m:
            gamma[blk] = np.log(np.abs(wj))
        else:
            arg, closure = _unwrapped_arg(wj)
            scale = 1.0 + float(np.max(np.abs(arg)))
            if abs(closure) > 1e-8 * scale:
                raise GeometryError(
                    f"argument of the source term does not return to its start on "
                    f"wall {j - problem.m} (gap {closure:.3e}); the anchor points "
                    "are misplaced"
                )
            gamma[blk] = arg
    return gamma


@dataclass(frozen=True)
class ConstantsSolution:
    """Flux constants a, additive constant c, wall constants nu."""

    a: np.ndarray
    c: float
    nu: np.ndarray


def constants_system(case: CaseInfo, h_means: np.ndarray,
                     levels) -> tuple[np.ndarray, np.ndarray]:
    """Dense system for (a_1..a_m', c, nu_1..nu_l).

    Rows: plate means with a +1 column for c against the levels, wall
    means with a -identity block for nu against zero; when every plate
    is a source (m' = m) the flux-balance row sum(a) = 0 closes the
    system.
    """
    mp = case.m_prime
    m = len(levels)
    ell = h_means.shape[0] - m
    extra = 1 if mp == m else 0
    size = m + ell + extra  # == mp + 1 + ell unknowns
    mat = np.zeros((size, size))
    rhs = np.zeros(size)
    mat[: m + ell, :mp] = h_means[:, :mp]
    mat[:m, mp] = 1.0
    mat[m : m + ell, mp + 1 : mp + 1 + ell] = -np.eye(ell)
    rhs[:m] = levels
    if extra:
        mat[m + ell, :mp] = 1.0
    return mat, rhs


def solve_constants(case: CaseInfo, h_means: np.ndarray, levels) -> ConstantsSolution:
    levels = np.asarray(levels, dtype=float)
    mat, rhs = constants_system(case, h_means, levels)
    try:
        x = np.linalg.solve(mat, rhs)
    except np.linalg.LinAlgError as exc:
        raise SolverError(f"constants system is singular: {exc}") from exc
    mp = case.m_prime
    a = x[:mp]
    if mp == len(levels) - 1:
        a = np.append(a, -np.sum(a))
    ell = h_means.shape[0] - len(levels)
    return ConstantsSolution(a=a, c=float(x[mp]), nu=x[mp + 1 : mp + 1 + ell])


def capacity(constants: ConstantsSolution, levels) -> float:
    return 2.0 * np.pi * float(np.dot(np.asarray(levels, dtype=float), constants.a))


@dataclass
class CondenserResult:
    """Everything the field evaluator and reports need from one run."""

    problem: CondenserProblem
    case: CaseInfo
    disc: Discretization
    coef: RHCoefficient
    gammas: list
    solutions: list
    constants: ConstantsSolution
    capacity: float
    f_boundary: np.ndarray
    diagnostics: dict


def run(problem: CondenserProblem, n: int,
        options: SolverOptions | None = None) -> CondenserResult:
    """Full pipeline: classify, solve the m' integral equations, solve
    the constants system, and form the capacity and boundary values."""
    options = options or SolverOptions()
    disc = discretize(problem.components, n)
    case = classify(problem, disc)
    coef = build_coefficient(case, problem, disc)
    gammas = [build_gamma(case, problem, disc, k) for k in range(case.m_prime)]
    solver = GnkSolver(disc, coef, options)
    solutions = [solver.solve(g) for g in gammas]
    h_means = np.column_stack([s.h_means for s in solutions])
    constants = solve_constants(case, h_means, problem.levels)
    cap = capacity(constants, problem.levels)
    f_boundary = np.zeros(disc.total, dtype=complex)
    for k in range(case.m_prime):
        s = solutions[k]
        f_boundary += constants.a[k] * (gammas[k] + s.h + 1j * s.mu)
    f_boundary /= coef.values
    diagnostics = {
        "sum_a": float(np.sum(constants.a)),
        "h_deviation": max((s.h_deviation for s in solutions), default=0.0),
        "bie_residual": max((s.residual for s in solutions), default=0.0),
        "gmres_iterations": max((s.iterations for s in solutions), default=0),
    }
    return CondenserResult(
        problem=problem, case=case, disc=disc, coef=coef, gammas=gammas,
        solutions=solutions, constants=constants, capacity=cap,
        f_boundary=f_boundary, diagnostics=diagnostics,
    )
