from math import pi, sqrt

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from itetraj.errors import GeometryError, LayoutError, UnsupportedShapeError
from itetraj.geometry import (Ball, Disk, Ellipse, ParametricCurve, Polygon, deformed_ellipse,
                              equilateral_triangle, ide_reference, layout_mfs, unit_square)


def _contains_set(a, b, tol=1e-12):
    return all(np.min(np.abs(b - z)) < tol for z in a)


def test_ellipse_axis_point():
    s = Ellipse(1.0, 0.5, center=0.3 + 0.1j)
    smp = s.boundary_sample(40)
    assert abs(smp.points[0] - (1.3 + 0.1j)) < 1e-15
    assert abs(smp.normals[0] - 1.0) < 1e-15


def test_deformed_ellipse_start_point():
    smp = deformed_ellipse().boundary_sample(51)
    assert abs(smp.points[0] - 1.05) < 1e-15


def test_square_samples_avoid_corners():
    s = unit_square()
    smp = s.boundary_sample(61)
    assert len(smp) == 61
    corners = np.array(s.vertices)
    assert np.min(np.abs(smp.points[:, None] - corners[None, :])) > 1e-3
    assert np.all(np.isin(np.round(smp.normals, 12), [1, -1, 1j, -1j]))
    assert s.edge_counts(61) == [16, 15, 15, 15]


def test_square_dihedral_symmetry():
    pts = unit_square().boundary_sample(60).points
    for image in (1j * pts, -pts, pts.conjugate(), -pts.conjugate(), 1j * pts.conjugate()):
        assert _contains_set(image, pts)


@pytest.mark.parametrize("shape", [Disk(), Ellipse(1.0, 0.5), deformed_ellipse(),
                                   ParametricCurve((0.1, 1.0, 0.1), (0.0, 0.0, 0.2), (0.0,), (0.0, 0.8, 0.1))])
def test_smooth_normals(shape):
    t = 2 * pi * np.arange(64) / 64
    smp = shape.boundary_sample(64)
    tan = shape.tangent(t)
    assert np.max(np.abs((smp.normals.conj() * tan).real) / np.abs(tan)) < 1e-12
    assert np.max(np.abs(np.abs(smp.normals) - 1)) < 1e-14
    # outward: a small step along the normal leaves the domain
    assert not np.any(shape.contains(smp.points + 1e-3 * smp.normals))
    assert np.all(shape.contains(smp.points - 1e-3 * smp.normals))


def test_tangent_matches_finite_difference():
    s = deformed_ellipse()
    t = np.linspace(0, 2 * pi, 17)
    fd = (s.boundary(t + 1e-6) - s.boundary(t - 1e-6)) / 2e-6
    assert np.max(np.abs(fd - s.tangent(t))) < 1e-8


def test_polygon_normals_outward():
    tri = equilateral_triangle()
    smp = tri.boundary_sample(51)
    assert not np.any(tri.contains(smp.points + 1e-3 * smp.normals))
    assert abs(np.mean(tri.vertices)) < 1e-15
    assert np.allclose(tri.edge_lengths, 1.0)


@pytest.mark.parametrize("shape,lay", [
    (Ellipse(1.0, 0.5), (10, 0.4, 40, 4.0)),
    (unit_square(), (20, 0.25, 61, 0.75)),
    (equilateral_triangle(), (20, 0.25, 51, 0.75)),
    (deformed_ellipse(), (20, 0.2, 51, 1.5)),
])
def test_reference_layouts(shape, lay):
    L = layout_mfs(shape, *lay)
    assert L.m_interior == lay[0] and L.m == lay[2]
    assert np.allclose(np.abs(L.interior - shape.center), lay[1])
    assert np.allclose(np.abs(L.sources - shape.center), lay[3])
    assert np.all(shape.winding_number(L.interior) == 1)
    assert np.all(shape.winding_number(L.sources) == 0)


def test_layout_errors():
    with pytest.raises(LayoutError):
        layout_mfs(Ellipse(1.0, 0.5), 10, 0.6, 40, 4.0)
    with pytest.raises(LayoutError):
        layout_mfs(unit_square(), 20, 0.25, 61, 0.6)
    with pytest.raises(LayoutError):
        layout_mfs(Disk(), 10, 0.5, 6, 3.0)
    with pytest.raises(GeometryError):
        Disk().boundary_sample(6)


def test_degenerate_scatterers():
    with pytest.raises(GeometryError):
        Polygon((0j, 1 + 0j, 1j, 1 + 1j))
    with pytest.raises(GeometryError):
        Polygon((0j, 1j, 1 + 0j))  # clockwise
    with pytest.raises(GeometryError):
        Disk(0.0)
    # limacon with an inner loop: positive area, self-intersecting
    with pytest.raises(GeometryError):
        ParametricCurve((0.5, 0.5, 0.5), (0.0,), (0.0,), (0.0, 0.5, 0.5))


@settings(max_examples=50, deadline=None)
@given(st.floats(0.3, 2.0), st.floats(0.3, 2.0), st.floats(-1, 1), st.floats(-1, 1))
def test_ellipse_containment(a, b, x, y):
    s = Ellipse(a, b)
    z = complex(x, y)
    inside = (x / a) ** 2 + (y / b) ** 2
    if abs(inside - 1) < 0.02:
        return
    assert bool(s.contains(z)) == (inside < 1)


def test_ide_reference_examples():
    assert np.allclose(ide_reference(unit_square(), 2), (4.4429, 7.0248), atol=1e-4)
    assert np.allclose(ide_reference(unit_square(), 2), (sqrt(2) * pi, sqrt(5) * pi), rtol=1e-15)
    assert np.allclose(ide_reference(equilateral_triangle(), 2), (7.255, 11.082), atol=1e-3)
    assert np.allclose(ide_reference(equilateral_triangle(), 2), (4 * pi / sqrt(3), 4 * pi * sqrt(7) / 3))
    assert np.allclose(ide_reference(Disk(), 3), (2.4048, 3.8317, 5.1356), atol=1e-4)
    assert np.allclose(ide_reference(Ball(), 3), (pi, 4.4934, 5.7635), atol=1e-4)
    assert ide_reference(Ellipse(1.0, 0.5), 2) == [3.777, 5.010]
    assert ide_reference(Disk(2.0), 1)[0] == pytest.approx(2.404825557695773 / 2)


def test_ide_reference_ascending_and_distinct():
    for shape in (Disk(), unit_square(), equilateral_triangle(), Ball()):
        vals = ide_reference(shape, 12)
        assert len(vals) == 12 and all(b > a for a, b in zip(vals, vals[1:]))


def test_ide_reference_unsupported():
    with pytest.raises(UnsupportedShapeError):
        ide_reference(deformed_ellipse(), 2)
    with pytest.raises(UnsupportedShapeError):
        ide_reference(Ellipse(1.0, 0.6), 1)
    with pytest.raises(UnsupportedShapeError):
        ide_reference(Ellipse(1.0, 0.5), 3)
