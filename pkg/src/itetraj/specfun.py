"""
Bessel functions of complex argument.

Cylindrical ``J_p``, spherical ``j_p`` and the Hankel function ``H_p^(1)``
together with their first derivatives, plus the positive real zeros of
``J_p`` and ``j_p`` (the Dirichlet eigenvalues of the unit disk and ball).

Values come from the AMOS routines wrapped by :mod:`scipy.special`.
Derivatives are always built from the neighbouring orders, never from
finite differences.  A plain Maclaurin series, :func:`bessel_j_series`, is
kept as an independent reference route for tests.
"""

from dataclasses import dataclass
from math import factorial, pi
from typing import Union

import numpy as np
from scipy import optimize, special

from .errors import DomainError, SingularityError

ComplexLike = Union[complex, float, np.ndarray]

MAX_ORDER = 60
MAX_ABS_ARG = 200.0
HANKEL_MIN_IMAG = -5.0


@dataclass(frozen=True)
class BesselEval:
    """Value and derivative of a Bessel-type function at ``argument``.

    ``argument``, ``value`` and ``derivative`` are complex scalars or arrays of
    a common shape.
    """

    order: int
    argument: ComplexLike
    value: ComplexLike
    derivative: ComplexLike


def _check_window(p, z):
    if not isinstance(p, (int, np.integer)) or p < 0:
        raise DomainError(f"order must be a nonnegative integer, got {p!r}")
    if p > MAX_ORDER:
        raise DomainError(f"order {p} exceeds the supported maximum {MAX_ORDER}")
    if np.any(np.abs(z) > MAX_ABS_ARG):
        raise DomainError(f"|z| exceeds the supported maximum {MAX_ABS_ARG}")


def _as_complex(z):
    z = np.asarray(z, dtype=complex)
    return z if z.ndim else complex(z)


def bessel_j(p: int, z: ComplexLike) -> BesselEval:
    """``J_p(z)`` and ``J_p'(z)`` for ``p <= 60`` and ``|z| <= 200``."""
    _check_window(p, z)
    z = _as_complex(z)
    # real arguments take the real path so that real inputs give exactly real values
    arg = np.real(z) if np.all(np.imag(z) == 0) else z
    if p == 0:
        value, derivative = special.jv(0, arg), -special.jv(1, arg)
    else:
        lower, value, upper = (special.jv(q, arg) for q in (p - 1, p, p + 1))
        derivative = 0.5 * (lower - upper)
    return BesselEval(p, z, _as_complex(value), _as_complex(derivative))


def spherical_j(p: int, z: ComplexLike) -> BesselEval:
    """Spherical ``j_p(z) = sqrt(pi/(2z)) J_{p+1/2}(z)`` and its derivative.

    ``j_0`` is evaluated as ``sin(z)/z`` with the removable singularity at the
    origin filled in; higher orders use ``j_p' = j_{p-1} - (p+1) j_p / z``.
    """
    _check_window(p, z)
    z = _as_complex(z)
    zarr = np.atleast_1d(np.asarray(z, dtype=complex))
    small = np.abs(zarr) < 1e-8
    safe = np.where(small, 1.0, zarr)
    if p == 0:
        value = np.where(small, 1.0 - zarr**2 / 6.0, np.sin(safe) / safe)
        derivative = np.where(
            small, -zarr / 3.0, (safe * np.cos(safe) - np.sin(safe)) / safe**2
        )
    else:
        if np.any(small):
            raise SingularityError("spherical_j(p>0) derivative needs z != 0 in this form")
        arg = zarr.real if np.all(zarr.imag == 0) else zarr
        value = special.spherical_jn(p, arg).astype(complex)
        lower = special.spherical_jn(p - 1, arg)
        derivative = lower - (p + 1) * value / zarr
    if np.ndim(z) == 0:
        return BesselEval(p, z, complex(value[0]), complex(derivative[0]))
    return BesselEval(p, z, value.reshape(np.shape(z)), derivative.reshape(np.shape(z)))


def hankel1(p: int, z: ComplexLike) -> BesselEval:
    """Hankel function ``H_p^(1)(z) = J_p(z) + i Y_p(z)`` and its derivative.

    Supported for ``z != 0`` with ``Im z >= -5``.
    """
    _check_window(p, z)
    z = _as_complex(z)
    if np.any(np.asarray(z) == 0):
        raise SingularityError("H_p^(1) is singular at z = 0")
    if np.any(np.imag(z) < HANKEL_MIN_IMAG):
        raise DomainError(f"Im z below {HANKEL_MIN_IMAG} is outside the supported window")
    lo, hi = (1, 1) if p == 0 else (p - 1, p + 1)
    h_lo = special.hankel1(lo, z)
    h_p = special.hankel1(p, z)
    h_hi = special.hankel1(hi, z)
    derivative = -h_hi if p == 0 else 0.5 * (h_lo - h_hi)
    return BesselEval(p, z, _as_complex(h_p), _as_complex(derivative))


def bessel_y_from_hankel(p: int, z: ComplexLike) -> BesselEval:
    """``Y_p`` and ``Y_p'`` recovered as ``-i (H_p^(1) - J_p)``.

    Used for the real-coefficient MFS kernel.
    """
    h = hankel1(p, z)
    j = bessel_j(p, z)
    value = -1j * (np.asarray(h.value) - np.asarray(j.value))
    derivative = -1j * (np.asarray(h.derivative) - np.asarray(j.derivative))
    return BesselEval(p, h.argument, _as_complex(value), _as_complex(derivative))


def bessel_y01(z: ComplexLike, derivative: bool = True):
    """``Y_0(z)`` and, if requested, ``Y_0'(z) = -Y_1(z)``, by ``Y_p = -i (H_p^(1) - J_p)``.

    Same window as :func:`hankel1`; this is the lean path for the MFS kernel,
    which needs order 0 only.
    """
    _check_window(0, z)
    z = np.asarray(z, dtype=complex)
    if np.any(z == 0):
        raise SingularityError("Y_0 is singular at z = 0")
    if np.any(z.imag < HANKEL_MIN_IMAG):
        raise DomainError(f"Im z below {HANKEL_MIN_IMAG} is outside the supported window")
    y0 = -1j * (special.hankel1(0, z) - special.jv(0, z))
    if not derivative:
        return y0, None
    y1 = -1j * (special.hankel1(1, z) - special.jv(1, z))
    return y0, -y1


def bessel_j_series(p: int, z: ComplexLike, terms: int = 40) -> complex:
    """Truncated Maclaurin series of ``J_p``.

    Reference route only: accurate to roughly machine precision for
    ``|z| < 5`` and degrading with cancellation beyond.
    """
    z = np.asarray(z, dtype=complex)
    half = z / 2.0
    total = np.zeros_like(z)
    term = half**p / factorial(p)
    for k in range(terms):
        total = total + term
        term = term * (-(half**2)) / ((k + 1) * (k + 1 + p))
    return total if total.ndim else complex(total)


def _real_roots(func, deriv, start, count, step=pi / 4):
    roots = []
    a = float(start)
    fa = func(a)
    while len(roots) < count:
        b = a + step
        fb = func(b)
        if fa == 0.0:
            roots.append(a)
        elif fa * fb < 0.0:
            r = optimize.brentq(func, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps)
            for _ in range(2):
                d = deriv(r)
                if d != 0.0:
                    r_new = r - func(r) / d
                    if a <= r_new <= b:
                        r = r_new
            roots.append(r)
        a, fa = b, fb
    return roots[:count]


def bessel_real_roots(p: int, count: int) -> list:
    """First ``count`` positive zeros of ``J_p`` in ascending order.

    Sign changes are bracketed on a grid of spacing pi/4 starting at ``p + 1``
    (below the first zero) and refined by Brent bisection plus Newton.
    """
    if count < 0 or count > 100:
        raise DomainError("count must lie in [0, 100]")
    _check_window(p, 0.0)
    return _real_roots(
        lambda x: float(special.jv(p, x)),
        lambda x: float(special.jvp(p, x)),
        p + 1.0,
        count,
    )


def spherical_real_roots(p: int, count: int) -> list:
    """First ``count`` positive zeros of ``j_p`` (``m*pi`` for ``p = 0``)."""
    if count < 0 or count > 100:
        raise DomainError("count must lie in [0, 100]")
    _check_window(p, 0.0)
    if p == 0:
        return [pi * m for m in range(1, count + 1)]
    return _real_roots(
        lambda x: float(special.spherical_jn(p, x)),
        lambda x: float(special.spherical_jn(p, x, derivative=True)),
        p + 1.0,
        count,
    )
