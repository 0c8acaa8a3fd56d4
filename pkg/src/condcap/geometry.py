"""Boundary curves, corner-graded parametrizations, and discretization.

Every boundary component is a 2*pi-periodic parametrized Jordan curve
eta(t) in the complex plane.  The field domain is required to lie on the
left of each curve, so holes are traversed clockwise and an external
boundary counterclockwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import betainc, betaln

TWO_PI = 2.0 * np.pi

# Corners are pinned at 1/3 of a side's parameter length past the side
# boundary.  Uniform nodes sit at rational multiples of 2*pi with
# denominator n; for the node counts used in practice (n = 2^j or
# 3*2^j per component) a corner then never coincides with a node, which
# keeps eta'(t) nonzero on the grid while eta' still vanishes to the
# grading order at the corners themselves.
_CORNER_SHIFT = 1.0 / 3.0


class GeometryError(ValueError):
    """Invalid curve data, orientation, or point query."""


def _as_complex(z) -> complex:
    return complex(z)


@dataclass(frozen=True)
class BoundaryComponent:
    """One closed boundary curve with a role in the condenser.

    kind: 'circle' | 'ellipse' | 'polygon' | 'trig'
    role: 'plate' (Dirichlet) | 'neumann' (insulating wall)
    orientation: 'ccw' | 'cw'
    """

    kind: str
    role: str
    orientation: str
    params: dict = field(repr=False)

    def __post_init__(self):
        if self.role not in ("plate", "neumann"):
            raise GeometryError(f"unknown role {self.role!r}")
        if self.orientation not in ("ccw", "cw"):
            raise GeometryError(f"unknown orientation {self.orientation!r}")

    # -- evaluation ---------------------------------------------------

    def point(self, t):
        """eta(t) for t in radians (any real, wrapped mod 2*pi)."""
        return self._eval(np.asarray(t, dtype=float), 0)

    def derivative(self, t):
        return self._eval(np.asarray(t, dtype=float), 1)

    def second_derivative(self, t):
        return self._eval(np.asarray(t, dtype=float), 2)

    def _eval(self, t, order):
        p = self.params
        if self.kind == "circle":
            sgn = 1.0 if self.orientation == "ccw" else -1.0
            w = np.exp(1j * sgn * t)
            if order == 0:
                return p["center"] + p["radius"] * w
            return p["radius"] * (1j * sgn) ** order * w

        if self.kind == "ellipse":
            a, b = p["radii"]
            sgn = 1.0 if self.orientation == "ccw" else -1.0
            c, s = np.cos(t), np.sin(t)
            if order == 0:
                return p["center"] + a * c + 1j * sgn * b * s
            if order == 1:
                return -a * s + 1j * sgn * b * c
            return -a * c - 1j * sgn * b * s

        if self.kind == "polygon":
            return _polygon_eval(p, t, order)

        if self.kind == "trig":
            ks = p["modes"]
            cs = p["coeffs"]
            out = np.zeros(np.shape(t), dtype=complex)
            for k, ck in zip(ks, cs):
                out = out + ck * (1j * k) ** order * np.exp(1j * k * t)
            return out

        raise GeometryError(f"unknown curve kind {self.kind!r}")

    # -- metadata -----------------------------------------------------

    @property
    def corner_params(self) -> np.ndarray:
        """Parameters where eta' vanishes (empty for smooth curves)."""
        if self.kind != "polygon":
            return np.empty(0)
        nv = len(self.params["vertices"])
        return (TWO_PI * (np.arange(nv) + _CORNER_SHIFT) / nv) % TWO_PI

    def interior_point(self) -> complex:
        """Default anchor point: the centroid of the curve's samples."""
        if self.kind in ("circle", "ellipse"):
            return self.params["center"]
        if self.kind == "polygon":
            return complex(np.mean(self.params["vertices"]))
        return complex(self.params["coeffs"][list(self.params["modes"]).index(0)])

    def diameter(self) -> float:
        z = self.point(np.linspace(0.0, TWO_PI, 257)[:-1])
        return 2.0 * float(np.max(np.abs(z - np.mean(z))))


# ----------------------------------------------------------------------
# polygon parametrization with corner grading
# ----------------------------------------------------------------------

def _grading(tau, p, order):
    """Order-p polynomial grading w:[0,1]->[0,1], w' ~ tau^(p-1) at 0.

    w is the regularized incomplete beta function I_tau(p, p); its first
    p-1 derivatives vanish at both endpoints.
    """
    tau = np.clip(tau, 0.0, 1.0)
    if order == 0:
        return betainc(p, p, tau)
    lb = betaln(p, p)
    if order == 1:
        with np.errstate(divide="ignore"):
            lg = (p - 1) * (np.log(tau) + np.log1p(-tau)) - lb
        return np.where((tau > 0.0) & (tau < 1.0), np.exp(lg), 0.0)
    # second derivative: w'' = w' * (p-1) * (1-2 tau) / (tau (1-tau))
    w1 = _grading(tau, p, 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        fac = (p - 1) * (1.0 - 2.0 * tau) / (tau * (1.0 - tau))
    return np.where((tau > 0.0) & (tau < 1.0), w1 * fac, 0.0)


def _polygon_eval(p, t, order):
    verts = p["vertices"]
    nv = len(verts)
    gp = p["grading_order"]
    h = TWO_PI / nv
    s = np.mod(np.asarray(t, dtype=float) - h * _CORNER_SHIFT, TWO_PI)
    side = np.minimum((s / h).astype(int), nv - 1)
    tau = s / h - side
    v0 = verts[side]
    dv = verts[(side + 1) % nv] - v0
    w = _grading(tau, gp, order)
    if order == 0:
        return v0 + dv * w
    return dv * w / h**order


def _segments_intersect(a0, a1, b0, b1) -> bool:
    """Proper (interior) intersection of segments a0-a1 and b0-b1."""

    def cross(u, v):
        return u.real * v.imag - u.imag * v.real

    d1 = cross(a1 - a0, b0 - a0)
    d2 = cross(a1 - a0, b1 - a0)
    d3 = cross(b1 - b0, a0 - b0)
    d4 = cross(b1 - b0, a1 - b0)
    return (d1 * d2 < 0) and (d3 * d4 < 0)


def _polyline_is_simple(pts) -> bool:
    nv = len(pts)
    for i in range(nv):
        a0, a1 = pts[i], pts[(i + 1) % nv]
        for j in range(i + 1, nv):
            if j == i or (j + 1) % nv == i or (i + 1) % nv == j:
                continue
            if _segments_intersect(a0, a1, pts[j], pts[(j + 1) % nv]):
                return False
    return True


# ----------------------------------------------------------------------
# factories
# ----------------------------------------------------------------------

def make_circle(center, radius, orientation="ccw", role="plate") -> BoundaryComponent:
    radius = float(radius)
    if radius <= 0.0:
        raise GeometryError(f"circle radius must be positive, got {radius}")
    return BoundaryComponent(
        kind="circle",
        role=role,
        orientation=orientation,
        params={"center": _as_complex(center), "radius": radius},
    )


def make_ellipse(center, radii, orientation="ccw", role="plate") -> BoundaryComponent:
    a, b = float(radii[0]), float(radii[1])
    if a <= 0.0 or b <= 0.0:
        raise GeometryError("ellipse semi-axes must be positive")
    return BoundaryComponent(
        kind="ellipse",
        role=role,
        orientation=orientation,
        params={"center": _as_complex(center), "radii": (a, b)},
    )


def make_polygon(vertices, orientation="ccw", grading_order=3, role="plate") -> BoundaryComponent:
    verts = np.asarray([_as_complex(v) for v in vertices], dtype=complex)
    if len(verts) < 3:
        raise GeometryError("polygon needs at least 3 vertices")
    if int(grading_order) < 2:
        raise GeometryError("grading order must be >= 2")
    if not _polyline_is_simple(verts):
        raise GeometryError("polygon vertex list is self-intersecting")
    # shoelace sign fixes the traversal orientation of the vertex order
    area2 = float(
        np.sum(verts.real * np.roll(verts.imag, -1) - np.roll(verts.real, -1) * verts.imag)
    )
    actual = "ccw" if area2 > 0 else "cw"
    if actual != orientation:
        raise GeometryError(
            f"vertex order traverses the polygon {actual}, but orientation={orientation!r}"
            " was requested; reorder the vertices instead of relabelling"
        )
    return BoundaryComponent(
        kind="polygon",
        role=role,
        orientation=orientation,
        params={"vertices": verts, "grading_order": int(grading_order)},
    )


def make_trig_curve(coeffs, orientation="ccw", role="plate") -> BoundaryComponent:
    """Closed curve eta(t) = sum_k c_k exp(i k t) from {k: c_k}."""
    modes = np.asarray(sorted(coeffs), dtype=int)
    cs = np.asarray([_as_complex(coeffs[int(k)]) for k in modes])
    comp = BoundaryComponent(
        kind="trig",
        role=role,
        orientation=orientation,
        params={"modes": modes, "coeffs": cs},
    )
    ts = np.linspace(0.0, TWO_PI, 65)[:-1]
    z = comp.point(ts)
    dz = comp.derivative(ts)
    area2 = float(np.sum((np.conj(z) * dz).imag)) * (TWO_PI / len(ts))
    actual = "ccw" if area2 > 0 else "cw"
    if actual != orientation:
        raise GeometryError(
            f"trig curve traverses {actual}, but orientation={orientation!r} was requested"
        )
    return comp


# ----------------------------------------------------------------------
# discretization
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class Discretization:
    """Stacked trapezoidal samples of all boundary components.

    Component j occupies the index block [j*n, (j+1)*n); nodes within a
    block are s_i = (i-1) * 2*pi / n.
    """

    components: tuple
    n: int
    t: np.ndarray
    eta: np.ndarray
    deta: np.ndarray
    ddeta: np.ndarray

    @property
    def n_components(self) -> int:
        return len(self.components)

    @property
    def total(self) -> int:
        return self.n * self.n_components

    @property
    def weight(self) -> float:
        """Trapezoidal weight 2*pi/n of every node."""
        return TWO_PI / self.n

    def block(self, j) -> slice:
        return slice(j * self.n, (j + 1) * self.n)

    def component_index(self, i) -> int:
        return i // self.n


def discretize(components, n) -> Discretization:
    """Sample eta, eta', eta'' of every component at n uniform nodes."""
    n = int(n)
    if n % 2 != 0:
        raise GeometryError(f"node count must be even, got {n}")
    if n < 4:
        raise GeometryError(f"node count must be >= 4, got {n}")
    components = tuple(components)
    if not components:
        raise GeometryError("no boundary components")
    s = TWO_PI * np.arange(n) / n
    t = np.tile(s, len(components))
    eta = np.concatenate([c.point(s) for c in components])
    deta = np.concatenate([c.derivative(s) for c in components])
    ddeta = np.concatenate([c.second_derivative(s) for c in components])
    scale = np.max(np.abs(deta))
    if np.min(np.abs(deta)) <= 1e-13 * scale:
        j = int(np.argmin(np.abs(deta)))
        raise GeometryError(
            f"eta'(t) vanishes at node {j % n} of component {j // n}; "
            "a corner coincides with a grid node, use a different n"
        )
    return Discretization(components=components, n=n, t=t, eta=eta, deta=deta, ddeta=ddeta)


def winding_number(disc: Discretization, j: int, w) -> int:
    """Winding of component j around w by the trapezoidal residue sum."""
    w = _as_complex(w)
    blk = disc.block(j)
    eta = disc.eta[blk]
    deta = disc.deta[blk]
    gaps = np.abs(np.diff(np.concatenate([eta, eta[:1]])))
    dmin = float(np.min(np.abs(eta - w)))
    if dmin <= float(np.max(gaps)):
        raise GeometryError(
            f"point {w} is too close to component {j} for a reliable winding number"
        )
    val = np.sum(deta / (eta - w)) / (1j * disc.n)
    wn = int(np.round(val.real))
    if abs(val.real - wn) > 0.1 or abs(val.imag) > 0.1:
        raise GeometryError(f"winding number of component {j} about {w} is indeterminate")
    return wn


def signed_area(disc: Discretization, j: int) -> float:
    """Signed enclosed area of component j (positive for ccw)."""
    blk = disc.block(j)
    z = disc.eta[blk]
    dz = disc.deta[blk]
    return 0.5 * float(np.sum((np.conj(z) * dz).imag)) * disc.weight


# location codes for point queries
LOC_FIELD = 0
LOC_NEAR = -1
LOC_OUTSIDE = -2  # outside a bounded field (inside the unbounded region)


def locate_points(disc: Discretization, g_bounded: bool, w) -> np.ndarray:
    """Classify points against the field domain.

    Returns LOC_FIELD for points of the field, 1-based component index k
    for points enclosed by hole k, LOC_OUTSIDE for points beyond a
    bounded field's external boundary, and LOC_NEAR for points within
    the near-boundary band 2*pi*diam/n of some component.
    """
    w = np.atleast_1d(np.asarray(w, dtype=complex))
    out = np.full(w.shape, LOC_FIELD, dtype=int)
    total = np.zeros(w.shape, dtype=float)
    windings = np.zeros((disc.n_components, w.size))
    near = np.zeros(w.shape, dtype=bool)
    for j, comp in enumerate(disc.components):
        blk = disc.block(j)
        eta = disc.eta[blk]
        deta = disc.deta[blk]
        band = TWO_PI * comp.diameter() / disc.n
        diff = eta[None, :] - w[:, None]
        dist = np.min(np.abs(diff), axis=1)
        near |= dist < band
        with np.errstate(divide="ignore", invalid="ignore"):
            val = np.sum(deta[None, :] / diff, axis=1) / (1j * disc.n)
        windings[j] = np.round(np.where(np.isfinite(val.real), val.real, 0.0))
        total += windings[j]
    expected = 1.0 if g_bounded else 0.0
    inside_hole = np.zeros(w.shape, dtype=bool)
    for j in range(disc.n_components):
        hit = (windings[j] == -1) & ~inside_hole
        out[hit] = j + 1
        inside_hole |= hit
    out[~inside_hole & (total != expected)] = LOC_OUTSIDE
    out[near] = LOC_NEAR
    return out
