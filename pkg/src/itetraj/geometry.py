"""
Scatterer shapes, boundary samples, MFS point layouts and Dirichlet tables.

Planar points and normals are stored as complex numbers ``x + iy``.  Every
shape exposes ``boundary(t)`` and its derivative for ``t`` in ``[0, 2 pi)``
running counterclockwise; sampling, containment and orientation checks are
built on that parametrization.
"""

from dataclasses import dataclass, field
from itertools import count as _count
from math import pi, sqrt
from typing import Optional, Tuple

import numpy as np

from .errors import GeometryError, LayoutError, UnsupportedShapeError
from .specfun import bessel_real_roots, spherical_real_roots

POLYLINE_SEGMENTS = 512


@dataclass(frozen=True)
class BoundarySample:
    """Collocation points on the boundary with unit outward normals."""

    points: np.ndarray
    normals: np.ndarray

    def __len__(self):
        return len(self.points)

    def pairs(self):
        return list(zip(self.points, self.normals))


class Scatterer:
    """Common interface of planar scatterers."""

    center: complex = 0j
    kind = "scatterer"

    def boundary(self, t):
        raise NotImplementedError

    def tangent(self, t):
        raise NotImplementedError

    def boundary_sample(self, m: int, offset: float = 0.0) -> BoundarySample:
        """``m`` points equidistributed in the curve parameter, starting at ``t = offset``."""
        if m < 8:
            raise GeometryError("need at least 8 boundary samples")
        t = offset + 2 * pi * np.arange(m) / m
        tan = self.tangent(t)
        # counterclockwise traversal: outward normal is the tangent turned clockwise
        normal = -1j * tan / np.abs(tan)
        return BoundarySample(self.boundary(t), normal)

    def polyline(self, segments: int = POLYLINE_SEGMENTS) -> np.ndarray:
        return self.boundary(2 * pi * np.arange(segments) / segments)

    def signed_area(self) -> float:
        z = self.polyline()
        return 0.5 * float(np.sum((z.conj() * np.roll(z, -1)).imag))

    def winding_number(self, point) -> np.ndarray:
        """Winding number of the boundary polyline around ``point`` (scalar or array)."""
        z = self.polyline()
        pts = np.atleast_1d(np.asarray(point, dtype=complex))
        d = z[None, :] - pts[:, None]
        if np.any(np.abs(d) < 1e-12):
            raise GeometryError("point lies on the boundary")
        turn = np.angle(np.roll(d, -1, axis=1) / d).sum(axis=1)
        w = np.rint(turn / (2 * pi)).astype(int)
        return w if np.ndim(point) else int(w[0])

    def contains(self, point) -> np.ndarray:
        return self.winding_number(point) == 1

    def validate(self):
        """Raise :class:`GeometryError` unless the boundary is simple and counterclockwise."""
        if not self.signed_area() > 0:
            raise GeometryError(f"{self.kind} boundary is not counterclockwise")
        if _self_intersects(self.polyline(256)):
            raise GeometryError(f"{self.kind} boundary intersects itself")
        return self


def _self_intersects(z) -> bool:
    a, b = z, np.roll(z, -1)
    n = len(z)

    def cross(u, v):
        return (u.conj() * v).imag

    d1 = cross(b[:, None] - a[:, None], a[None, :] - a[:, None])
    d2 = cross(b[:, None] - a[:, None], b[None, :] - a[:, None])
    d3 = cross(b[None, :] - a[None, :], a[:, None] - a[None, :])
    d4 = cross(b[None, :] - a[None, :], b[:, None] - a[None, :])
    hit = (d1 * d2 < 0) & (d3 * d4 < 0)
    i, j = np.indices((n, n))
    adjacent = (np.abs(i - j) <= 1) | (np.abs(i - j) == n - 1)
    return bool(np.any(hit & ~adjacent))


@dataclass(frozen=True)
class Disk(Scatterer):
    radius: float = 1.0
    center: complex = 0j
    kind = "disk"

    def __post_init__(self):
        if not self.radius > 0:
            raise GeometryError("disk radius must be positive")

    def boundary(self, t):
        return self.center + self.radius * np.exp(1j * np.asarray(t))

    def tangent(self, t):
        return 1j * self.radius * np.exp(1j * np.asarray(t))


@dataclass(frozen=True)
class Ellipse(Scatterer):
    a: float = 1.0
    b: float = 0.5
    center: complex = 0j
    kind = "ellipse"

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise GeometryError("ellipse semi-axes must be positive")

    def boundary(self, t):
        t = np.asarray(t)
        return self.center + self.a * np.cos(t) + 1j * self.b * np.sin(t)

    def tangent(self, t):
        t = np.asarray(t)
        return -self.a * np.sin(t) + 1j * self.b * np.cos(t)


@dataclass(frozen=True)
class ParametricCurve(Scatterer):
    """``x(t) = sum_k xc[k] cos(kt) + xs[k] sin(kt)``, likewise ``y``, shifted by ``center``.

    Index ``k`` runs from 0; ``xs[0]`` and ``ys[0]`` are ignored.
    """

    xc: Tuple[float, ...] = (0.0, 1.0)
    xs: Tuple[float, ...] = (0.0, 0.0)
    yc: Tuple[float, ...] = (0.0, 0.0)
    ys: Tuple[float, ...] = (0.0, 1.0)
    center: complex = 0j
    label: Optional[str] = None
    kind = "parametric"

    def __post_init__(self):
        self.validate()

    def _series(self, t, deriv):
        t = np.asarray(t, dtype=float)
        x = np.zeros_like(t)
        y = np.zeros_like(t)
        for coeffs, target in (((self.xc, self.xs), x), ((self.yc, self.ys), y)):
            cos_c, sin_c = coeffs
            for k in range(max(len(cos_c), len(sin_c))):
                c = cos_c[k] if k < len(cos_c) else 0.0
                s = sin_c[k] if k < len(sin_c) and k > 0 else 0.0
                if deriv:
                    target += k * (-c * np.sin(k * t) + s * np.cos(k * t))
                else:
                    target += c * np.cos(k * t) + s * np.sin(k * t)
        return x + 1j * y

    def boundary(self, t):
        return self.center + self._series(t, False)

    def tangent(self, t):
        return self._series(t, True)


@dataclass(frozen=True)
class Polygon(Scatterer):
    """Polygon with counterclockwise vertices.

    ``center`` defaults to the vertex centroid; ``label`` marks shapes with a
    closed-form Dirichlet table (``"square"``, ``"equilateral_triangle"``).
    """

    vertices: Tuple[complex, ...] = ()
    center: Optional[complex] = None
    label: Optional[str] = None
    kind = "polygon"

    def __post_init__(self):
        if len(self.vertices) < 3:
            raise GeometryError("a polygon needs at least three vertices")
        verts = tuple(complex(v) for v in self.vertices)
        object.__setattr__(self, "vertices", verts)
        if self.center is None:
            object.__setattr__(self, "center", complex(np.mean(verts)))
        if np.min(self.edge_lengths) <= 0:
            raise GeometryError("repeated polygon vertex")
        self.validate()

    @property
    def edge_lengths(self) -> np.ndarray:
        v = np.array(self.vertices)
        return np.abs(np.roll(v, -1) - v)

    def boundary(self, t):
        # piecewise linear in t, one edge per 2 pi / (number of edges)
        v = np.array(self.vertices)
        k = len(v)
        s = np.asarray(t, dtype=float) / (2 * pi) * k % k
        i = np.floor(s).astype(int) % k
        f = s - np.floor(s)
        return v[i] + f * (np.roll(v, -1)[i] - v[i])

    def tangent(self, t):
        v = np.array(self.vertices)
        k = len(v)
        s = np.asarray(t, dtype=float) / (2 * pi) * k % k
        i = np.floor(s).astype(int) % k
        return (np.roll(v, -1)[i] - v[i]) * k / (2 * pi)

    def polyline(self, segments: int = POLYLINE_SEGMENTS) -> np.ndarray:
        return np.array(self.vertices)

    def edge_counts(self, m: int) -> list:
        """Split ``m`` samples over the edges in proportion to length, leftovers to the first edges."""
        lengths = self.edge_lengths
        raw = m * lengths / lengths.sum()
        counts = np.floor(raw + 1e-9).astype(int)
        for i in np.argsort(-(raw - counts), kind="stable")[: m - counts.sum()]:
            counts[i] += 1
        return [int(c) for c in counts]

    def boundary_sample(self, m: int, offset: float = 0.0) -> BoundarySample:
        """Edge-wise uniform points offset half a spacing from the corners; ``offset`` is ignored."""
        if m < 8:
            raise GeometryError("need at least 8 boundary samples")
        v = np.array(self.vertices)
        pts, normals = [], []
        for k, mk in enumerate(self.edge_counts(m)):
            a, b = v[k], v[(k + 1) % len(v)]
            s = (np.arange(mk) + 0.5) / mk
            pts.append(a + s * (b - a))
            normals.append(np.full(mk, -1j * (b - a) / abs(b - a)))
        return BoundarySample(np.concatenate(pts), np.concatenate(normals))


def unit_square(side: float = 1.0, center: complex = 0j) -> Polygon:
    h = 0.5 * side
    verts = tuple(center + h * complex(x, y) for x, y in ((-1, -1), (1, -1), (1, 1), (-1, 1)))
    return Polygon(verts, center, "square")


def equilateral_triangle(side: float = 1.0, center: complex = 0j) -> Polygon:
    """Triangle with a horizontal base, apex up, centroid at ``center``."""
    r = side / sqrt(3.0)
    verts = tuple(center + r * np.exp(1j * (-5 * pi / 6 + 2 * pi * k / 3)) for k in range(3))
    return Polygon(verts, center, "equilateral_triangle")


def deformed_ellipse() -> ParametricCurve:
    """``x = 0.75 cos t + 0.3 cos 2t``, ``y = sin t``."""
    return ParametricCurve(xc=(0.0, 0.75, 0.3), xs=(0.0, 0.0, 0.0), yc=(0.0,), ys=(0.0, 1.0),
                           label="deformed_ellipse")


@dataclass(frozen=True)
class Ball:
    """Ball of given radius in three dimensions; only its Dirichlet table is used."""

    radius: float = 1.0
    kind = "ball"


@dataclass(frozen=True)
class MfsLayout:
    """Auxiliary points of the modified MFS.

    ``interior`` lies on a circle inside the scatterer, ``collocation`` and
    ``normals`` on its boundary, ``sources`` on a circle outside.
    """

    scatterer: Scatterer
    interior: np.ndarray
    collocation: np.ndarray
    normals: np.ndarray
    sources: np.ndarray
    interior_radius: float
    source_radius: float
    params: dict = field(default_factory=dict)

    @property
    def m(self) -> int:
        return len(self.collocation)

    @property
    def m_interior(self) -> int:
        return len(self.interior)


def _circle(center, radius, count, offset):
    return center + radius * np.exp(1j * (offset + 2 * pi * np.arange(count) / count))


def layout_mfs(s: Scatterer, m_interior: int, r_interior: float, m: int, r_source: float,
               angle_offset: float = 0.0) -> MfsLayout:
    """Interior circle, boundary collocation and exterior source circle about the scatterer's center.

    ``angle_offset`` rotates both circles and shifts the curve parameter of
    the collocation points (a rotation for the disk; polygons ignore it).

    Raises :class:`LayoutError` when an interior node is not enclosed by the
    boundary, a source is, or a source sits on a collocation point.
    """
    if m_interior < 1 or m < 8 or not (0 < r_interior < r_source):
        raise LayoutError("invalid layout sizes or radii")
    sample = s.boundary_sample(m, angle_offset)
    inner = _circle(s.center, r_interior, m_interior, angle_offset)
    outer = _circle(s.center, r_source, m, angle_offset)
    try:
        w_in = s.winding_number(inner)
        w_out = s.winding_number(outer)
    except GeometryError as exc:
        raise LayoutError(str(exc)) from exc
    if np.any(w_in != 1):
        raise LayoutError(f"interior circle of radius {r_interior} leaves the scatterer")
    if np.any(w_out != 0):
        raise LayoutError(f"source circle of radius {r_source} enters the scatterer")
    gap = np.min(np.abs(outer[:, None] - sample.points[None, :]))
    if gap < 1e-10:
        raise LayoutError("a source coincides with a collocation point")
    params = {"m_interior": m_interior, "r_interior": r_interior, "m": m,
              "r_source": r_source, "angle_offset": angle_offset}
    return MfsLayout(s, inner, sample.points, sample.normals, outer, r_interior, r_source, params)


# Dirichlet eigenvalues of the (1, 0.5) ellipse; no closed form exists.
ELLIPSE_1_05_IDES = (3.777, 5.010)


def _distinct(values, count):
    out = []
    for x in sorted(values):
        if not out or x - out[-1] > 1e-9 * x:
            out.append(x)
    return out[:count]


def _lattice_values(count, form):
    """Smallest distinct values of ``form(a, b)`` over ``a, b >= 1``."""
    size = count + 2
    vals = [form(a, b) for a in range(1, size + 1) for b in range(1, size + 1)]
    return _distinct(vals, count)


def _radial_table(roots, count):
    vals = []
    for p in _count():
        first = roots(p, 1)[0]
        if len(vals) >= count and first > sorted(vals)[count - 1]:
            break
        vals.extend(roots(p, count))
    return _distinct(vals, count)


def ide_reference(s, count: int) -> list:
    """Smallest ``count`` distinct Dirichlet eigenvalues (as wave numbers) of ``s``.

    Raises :class:`UnsupportedShapeError` for shapes without a closed form or
    table; use :func:`itetraj.mfs.find_ide` for those.
    """
    if count <= 0:
        return []
    if isinstance(s, Disk):
        return [x / s.radius for x in _radial_table(bessel_real_roots, count)]
    if isinstance(s, Ball):
        return [x / s.radius for x in _radial_table(spherical_real_roots, count)]
    if isinstance(s, Polygon) and s.label in ("square", "equilateral_triangle"):
        side = float(s.edge_lengths[0])
        if not np.allclose(s.edge_lengths, side, rtol=1e-12):
            raise GeometryError(f"{s.label} has unequal edges")
        if s.label == "square":
            return _lattice_values(count, lambda a, b: pi * sqrt(a * a + b * b) / side)
        return _lattice_values(count, lambda a, b: 4 * pi / (3 * side) * sqrt(a * a + a * b + b * b))
    if isinstance(s, Ellipse) and abs(s.b / s.a - 0.5) < 1e-12 and count <= len(ELLIPSE_1_05_IDES):
        return [x / s.a for x in ELLIPSE_1_05_IDES[:count]]
    raise UnsupportedShapeError(f"no Dirichlet table for {s!r}; compute it with mfs.find_ide")
