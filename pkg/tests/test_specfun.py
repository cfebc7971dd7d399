from math import pi

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from itetraj.errors import DomainError, SingularityError
from itetraj.specfun import (bessel_j, bessel_j_series, bessel_real_roots, bessel_y01, hankel1,
                             spherical_j, spherical_real_roots)

# bisection of J_0 on [2, 3] to 60 halvings, frozen
J0_FIRST_ROOT = 2.404825557695773


def _random_z(rng, size, radius):
    r = radius * np.sqrt(rng.uniform(0, 1, size))
    return r * np.exp(2j * pi * rng.uniform(0, 1, size))


def test_values_at_origin():
    e = bessel_j(0, 0)
    assert e.value == 1 and e.derivative == 0
    assert bessel_j(1, 0).value == 0


def test_first_zero_to_four_digits():
    assert abs(bessel_j(0, 2.4048).value) < 5e-5


def test_against_truncated_series():
    z = _random_z(np.random.default_rng(1), 200, 5.0)
    for p in (0, 1, 3):
        got = bessel_j(p, z).value
        ref = bessel_j_series(p, z)
        assert np.max(np.abs(got - ref)) < 1e-12


def test_against_mpmath_values_and_derivatives():
    rng = np.random.default_rng(2)
    for z in _random_z(rng, 30, 50.0):
        for p in (0, 2, 7):
            e = bessel_j(p, z)
            v = complex(mpmath.besselj(p, mpmath.mpc(z.real, z.imag)))
            d = complex(mpmath.besselj(p, mpmath.mpc(z.real, z.imag), derivative=1))
            assert abs(e.value - v) <= 1e-12 * max(1.0, abs(v))
            assert abs(e.derivative - d) <= 1e-12 * max(1.0, abs(d))


def _second_derivative(p, z):
    if p == 0:
        return -bessel_j(1, z).derivative
    return 0.5 * (bessel_j(p - 1, z).derivative - bessel_j(p + 1, z).derivative)


def test_bessel_ode_residual_on_ten_thousand_samples():
    rng = np.random.default_rng(3)
    for p in range(11):
        z = _random_z(rng, 910, 50.0)
        z = z[np.abs(z) > 1e-3]
        e = bessel_j(p, z)
        d2 = _second_derivative(p, z)
        terms = np.abs(np.stack([z**2 * d2, z * e.derivative, (z**2 - p**2) * e.value]))
        resid = np.abs(z**2 * d2 + z * e.derivative + (z**2 - p**2) * e.value)
        assert np.max(resid / terms.max(axis=0)) < 1e-10


def test_recurrence_residual():
    rng = np.random.default_rng(4)
    for p in range(1, 11):
        z = _random_z(rng, 500, 50.0)
        lo, mid, hi = bessel_j(p - 1, z).value, bessel_j(p, z).value, bessel_j(p + 1, z).value
        resid = np.abs(lo + hi - 2 * p / z * mid)
        size = np.maximum.reduce([np.abs(lo), np.abs(hi), np.abs(2 * p / z * mid)])
        assert np.max(resid / size) < 1e-10


def test_derivative_recurrence_against_mpmath_derivative():
    # J'_p comes from (J_{p-1} - J_{p+1}) / 2 internally; check it against an independent derivative
    for z in (0.3 + 0.1j, 7.5 - 2j, 31.0 + 4j):
        for p in (1, 4):
            d = complex(mpmath.besselj(p, mpmath.mpc(z.real, z.imag), derivative=1))
            assert abs(bessel_j(p, z).derivative - d) <= 1e-10 * max(1.0, abs(d))


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10), st.floats(-50, 50), st.floats(-50, 50))
def test_spherical_ode_residual(p, x, y):
    z = complex(x, y)
    if abs(z) < 1e-2 or abs(z) > 50:
        return
    e = spherical_j(p, z)
    if p == 0:
        d2 = -spherical_j(1, z).derivative
    else:
        d2 = spherical_j(p - 1, z).derivative + (p + 1) / z**2 * e.value - (p + 1) / z * e.derivative
    terms = [abs(z**2 * d2), abs(2 * z * e.derivative), abs((z**2 - p * (p + 1)) * e.value)]
    resid = abs(z**2 * d2 + 2 * z * e.derivative + (z**2 - p * (p + 1)) * e.value)
    assert resid <= 1e-10 * max(terms)


def test_spherical_examples():
    assert abs(spherical_j(0, pi).value) < 1e-15
    assert spherical_j(0, 0).value == 1
    for z in _random_z(np.random.default_rng(5), 50, 20.0):
        ref = np.sin(z) / z**2 - np.cos(z) / z
        assert abs(spherical_j(1, z).value - ref) <= 1e-12 * max(1.0, abs(ref))
        assert abs(spherical_j(0, z).value - np.sin(z) / z) <= 1e-13 * max(1.0, abs(np.sin(z) / z))


def test_spherical_zero_needs_limit_only_for_order_zero():
    with pytest.raises(SingularityError):
        spherical_j(2, 0)


def test_hankel_wronskian():
    rng = np.random.default_rng(6)
    z = _random_z(rng, 300, 40.0)
    z = z[(np.abs(z) > 0.1) & (z.imag > -5)]
    for p in (0, 1, 5):
        j, h = bessel_j(p, z), hankel1(p, z)
        w = j.value * h.derivative - j.derivative * h.value
        ref = 2j / (pi * z)
        assert np.max(np.abs(w - ref) / np.abs(ref)) < 1e-10


def test_hankel_large_argument_and_small_argument():
    assert abs(abs(hankel1(0, 50.0).value) / np.sqrt(2 / (50 * pi)) - 1) < 0.01
    assert np.isfinite(hankel1(0, 1.0).value)


def test_hankel_errors():
    with pytest.raises(SingularityError):
        hankel1(0, 0)
    with pytest.raises(DomainError):
        hankel1(0, 1 - 6j)


def test_y01_matches_independent_routes():
    for z in (0.5, 3.0 + 1.0j, 12.0 - 3.0j, 25.0 + 0.2j):
        y0, dy0 = bessel_y01(z)
        zz = mpmath.mpc(complex(z).real, complex(z).imag)
        assert abs(y0 - complex(mpmath.bessely(0, zz))) < 1e-12 * max(1, abs(y0))
        assert abs(dy0 + complex(mpmath.bessely(1, zz))) < 1e-12 * max(1, abs(dy0))


def test_window_errors():
    with pytest.raises(DomainError):
        bessel_j(61, 1.0)
    with pytest.raises(DomainError):
        bessel_j(0, 201.0)
    with pytest.raises(DomainError):
        bessel_j(-1, 1.0)
    with pytest.raises(DomainError):
        bessel_real_roots(0, 101)


def test_real_roots_examples():
    r = bessel_real_roots(0, 3)
    assert np.allclose(r, (2.4048, 5.5201, 8.6537), atol=1e-4)
    assert abs(r[0] - J0_FIRST_ROOT) < 1e-14
    assert abs(bessel_real_roots(1, 1)[0] - 3.8317) < 1e-4
    assert abs(bessel_real_roots(2, 1)[0] - 5.1356) < 1e-4


def test_real_roots_against_mpmath():
    for p in (0, 3, 10):
        got = bessel_real_roots(p, 20)
        ref = [float(mpmath.besseljzero(p, k)) for k in range(1, 21)]
        assert np.max(np.abs(np.array(got) - ref)) < 1e-12


@pytest.mark.parametrize("p", [0, 1, 2, 5, 20])
def test_root_properties(p):
    roots = bessel_real_roots(p, 30)
    assert all(r > p for r in roots)
    assert all(b > a for a, b in zip(roots, roots[1:]))
    for r in roots:
        e = bessel_j(p, r)
        assert abs(e.value) < 1e-12
        assert abs(e.derivative) > 1e-3
    nxt = bessel_real_roots(p + 1, 30)
    # strict interlacing j_{p,k} < j_{p+1,k} < j_{p,k+1}
    for k in range(29):
        assert roots[k] < nxt[k] < roots[k + 1]


def test_spherical_roots():
    assert spherical_real_roots(0, 3) == [pi, 2 * pi, 3 * pi]
    for r in spherical_real_roots(2, 10):
        assert abs(spherical_j(2, r).value) < 1e-12
    assert abs(spherical_real_roots(1, 1)[0] - 4.493409457909064) < 1e-12
