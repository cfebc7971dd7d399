"""
Closed-form transmission determinants for the unit disk and the unit ball.

For Bessel order ``p`` the interior transmission eigenvalues of the unit disk
with constant index ``n`` are the nonzero roots of

    F_p(k, n) = k (J_p'(k) J_p(sqrt(n) k) - sqrt(n) J_p(k) J_p'(sqrt(n) k)),

and those of the unit ball the roots of the same expression with spherical
Bessel functions ``j_p``.  Besides the determinants this module provides the
analytic partial derivatives, the continuation velocity ``dk/dn``, the
boundary-matching coefficient of the eigenfunction pair and the energy
functional ``int |v|^2 - n |w|^2``.
"""

from dataclasses import dataclass
from math import pi, sqrt

import numpy as np

from .errors import ContractError, NearIdeError, SingularCoefficientError
from .specfun import BesselEval, bessel_j, bessel_real_roots, spherical_j, spherical_real_roots

ROOT_TOL = 1e-10
NEAR_IDE_CUTOFF = 1e-3
QUADRATURE_NODES = 200


def _check_index(n):
    if not n > 0 or abs(n - 1.0) <= 1e-12:
        raise ContractError(f"refractive index must be positive and != 1, got {n}")


@dataclass(frozen=True)
class DiskDeterminant:
    """Determinant family ``F_p(., n)`` of the unit disk for one Bessel order."""

    p: int
    dim = 2
    name = "disk"

    def radial(self, z) -> BesselEval:
        return bessel_j(self.p, z)

    def _eval(self, kappa, n):
        s = sqrt(n)
        return s, self.radial(kappa), self.radial(s * kappa)

    def value(self, kappa, n) -> complex:
        s, a, b = self._eval(kappa, n)
        return kappa * (a.derivative * b.value - s * a.value * b.derivative)

    def scale(self, kappa, n) -> float:
        """Size of the Bessel factors entering the determinant; residuals are measured against it.

        Unlike the size of the two cancelling products it stays away from zero
        where ``J_p(kappa)`` and ``J_p(sqrt(n) kappa)`` vanish together.
        """
        s, a, b = self._eval(kappa, n)
        size_a = max(abs(a.value), abs(a.derivative))
        size_b = max(abs(b.value), abs(b.derivative))
        return abs(kappa) * (1.0 + s) * size_a * size_b

    def dkappa(self, kappa, n) -> complex:
        s, a, b = self._eval(kappa, n)
        return (n - 1.0) * kappa * a.value * b.value

    def value_and_dkappa(self, kappa, n):
        s, a, b = self._eval(kappa, n)
        f = kappa * (a.derivative * b.value - s * a.value * b.derivative)
        return f, (n - 1.0) * kappa * a.value * b.value

    def dn(self, kappa, n) -> complex:
        s, a, b = self._eval(kappa, n)
        return (n * kappa**2 - self.p**2) / (2.0 * n) * a.value * b.value + kappa**2 / (
            2.0 * s
        ) * a.derivative * b.derivative

    def ides(self, count: int) -> list:
        return bessel_real_roots(self.p, count)


@dataclass(frozen=True)
class BallDeterminant(DiskDeterminant):
    """Determinant family ``f_p(., n)`` of the unit ball (spherical Bessel functions)."""

    dim = 3
    name = "ball"

    def radial(self, z) -> BesselEval:
        return spherical_j(self.p, z)

    def dkappa(self, kappa, n) -> complex:
        return self.value_and_dkappa(kappa, n)[1]

    def value_and_dkappa(self, kappa, n):
        s, a, b = self._eval(kappa, n)
        f = kappa * (a.derivative * b.value - s * a.value * b.derivative)
        # spherical ODE leaves an extra -f/k term compared with the disk
        return f, (n - 1.0) * kappa * a.value * b.value - f / kappa

    def dn(self, kappa, n) -> complex:
        s, a, b = self._eval(kappa, n)
        ell = self.p * (self.p + 1)
        return (kappa**2 * a.derivative * b.derivative + kappa * a.value * b.derivative) / (
            2.0 * s
        ) + (n * kappa**2 - ell) / (2.0 * n) * a.value * b.value

    def ides(self, count: int) -> list:
        return spherical_real_roots(self.p, count)


def det_disk(p: int, kappa: complex, n: float) -> complex:
    """``F_p(kappa, n)`` for the unit disk."""
    return DiskDeterminant(p).value(kappa, n)


def det_ball(p: int, kappa: complex, n: float) -> complex:
    """``f_p(kappa, n)`` for the unit ball."""
    return BallDeterminant(p).value(kappa, n)


def det_dkappa(p: int, kappa: complex, n: float) -> complex:
    """``dF_p/dkappa = (n - 1) kappa J_p(kappa) J_p(sqrt(n) kappa)``."""
    return DiskDeterminant(p).dkappa(kappa, n)


def _require_root(det, kappa, n, tol):
    resid = abs(det.value(kappa, n))
    scale = max(det.scale(kappa, n), np.finfo(float).tiny)
    if resid > tol * scale:
        raise ContractError(
            f"kappa={kappa!r} is not a root of the determinant at n={n} "
            f"(relative residual {resid / scale:.3e} > {tol:.1e})"
        )


def det_dn(p: int, kappa_n: complex, n: float) -> complex:
    """``dF_p/dn`` along the zero set, for a root ``kappa_n`` of ``F_p(., n)``."""
    det = DiskDeterminant(p)
    _require_root(det, kappa_n, n, ROOT_TOL)
    return det.dn(kappa_n, n)


def velocity(p: int, kappa_n: complex, n: float, root_tol: float = 1e-8) -> complex:
    """Trajectory slope ``dkappa/dn`` at a disk transmission eigenvalue.

    Raises :class:`NearIdeError` when ``|J_p(kappa_n)| <= 1e-12``: the slope is
    unbounded there and the caller has to switch to the cube-root local model.
    """
    _check_index(n)
    det = DiskDeterminant(p)
    _require_root(det, kappa_n, n, root_tol)
    a = det.radial(kappa_n)
    if abs(a.value) <= 1e-12:
        raise NearIdeError(f"J_{p}({kappa_n!r}) vanishes; velocity is unbounded")
    k = kappa_n
    return -(n * k**2 - p**2) / (2.0 * n * (n - 1.0) * k) - k * a.derivative**2 / (
        2.0 * n * (n - 1.0) * a.value**2
    )


def alpha_coefficient(p: int, kappa_n: complex, n: float, dim: int = 2) -> complex:
    """Coefficient ``alpha = J_p'(k) / (sqrt(n) J_p'(sqrt(n) k))`` of the pair ``(v, w)``."""
    det = DiskDeterminant(p) if dim == 2 else BallDeterminant(p)
    s = sqrt(n)
    denom = s * det.radial(s * kappa_n).derivative
    if abs(denom) <= 1e-12:
        raise SingularCoefficientError(
            f"J_{p}'(sqrt(n) kappa) vanishes at kappa={kappa_n!r}, n={n}"
        )
    return det.radial(kappa_n).derivative / denom


def boundary_mismatch(p: int, kappa: complex, n: float, alpha: complex = None):
    """Dirichlet and Neumann jumps of ``v - w`` on the unit circle.

    Returns ``(J_p(k) - alpha J_p(s k), k J_p'(k) - alpha s k J_p'(s k))``.
    """
    if alpha is None:
        alpha = alpha_coefficient(p, kappa, n)
    s = sqrt(n)
    a, b = bessel_j(p, kappa), bessel_j(p, s * kappa)
    return (
        a.value - alpha * b.value,
        kappa * a.derivative - alpha * s * kappa * b.derivative,
    )


def eigenfunction_pair(p: int, kappa: complex, n: float, sine: bool = False):
    """Callables ``v(r, phi)`` and ``w(r, phi)`` of the separated eigenfunction pair."""
    alpha = alpha_coefficient(p, kappa, n)
    s = sqrt(n)
    ang = np.sin if sine else np.cos

    def v(r, phi):
        return bessel_j(p, kappa * np.asarray(r)).value * ang(p * np.asarray(phi))

    def w(r, phi):
        return alpha * bessel_j(p, s * kappa * np.asarray(r)).value * ang(p * np.asarray(phi))

    return v, w


def angular_factor(p: int) -> float:
    """``int_0^{2 pi} cos(p phi)^2 dphi``."""
    return 2.0 * pi if p == 0 else pi


def _radial_rule(nodes=QUADRATURE_NODES):
    x, w = np.polynomial.legendre.leggauss(nodes)
    return 0.5 * (x + 1.0), 0.5 * w


def radial_norm(p: int, kappa: complex, nodes: int = QUADRATURE_NODES) -> float:
    """``int_0^1 |J_p(kappa r)|^2 r dr`` by Gauss-Legendre quadrature."""
    r, w = _radial_rule(nodes)
    return float(np.sum(w * r * np.abs(bessel_j(p, kappa * r).value) ** 2))


def _energy_terms(p, kappa, n, nodes):
    alpha = alpha_coefficient(p, kappa, n)
    s = sqrt(n)
    v2 = radial_norm(p, kappa, nodes)
    w2 = n * abs(alpha) ** 2 * radial_norm(p, s * kappa, nodes)
    return angular_factor(p) * v2, angular_factor(p) * w2


def energy_mismatch(p: int, kappa_n: complex, n: float, nodes: int = QUADRATURE_NODES,
                    root_tol: float = 1e-8) -> float:
    """``int_D |v|^2 - n |w|^2 dx`` for the disk eigenfunction pair at ``kappa_n``.

    Vanishes for non-real transmission eigenvalues and equals
    :func:`energy_closed_form` for real ones.
    """
    _check_index(n)
    _require_root(DiskDeterminant(p), kappa_n, n, root_tol)
    v2, w2 = _energy_terms(p, kappa_n, n, nodes)
    return v2 - w2


def energy_normalization(p: int, kappa_n: complex, n: float, nodes: int = QUADRATURE_NODES) -> float:
    """``int_D |v|^2 + n |w|^2 dx``; the scale for judging :func:`energy_mismatch`."""
    v2, w2 = _energy_terms(p, kappa_n, n, nodes)
    return v2 + w2


def energy_closed_form(p: int, kappa: float, n: float) -> float:
    """``(1 - n)/2 J_p(kappa)^2`` times the angular factor, valid for real eigenvalues."""
    j = bessel_j(p, kappa).value
    return float(((1.0 - n) / 2.0 * j**2).real) * angular_factor(p)


def cube_coefficient(kappa_star: float, n_star: float) -> float:
    """Leading coefficient ``c`` of ``(kappa - kappa*)^3 ~ c (n - n*)`` at a triple root.

    Identical for disk and ball: ``c = -3 kappa* / (2 n* (n* - 1))``.
    """
    return -3.0 * kappa_star / (2.0 * n_star * (n_star - 1.0))


def multiplicity_residuals(p: int, kappa_star: float, n_star: float) -> dict:
    """Boundary residuals of the neighbouring-order pairs at a triple point.

    For ``q`` in ``{p - 1, p + 1}`` (only ``q = 1`` when ``p = 0``) returns
    ``q -> (J_q(k) - alpha s J_q(s k), J_q'(k) - alpha n J_q'(s k))``,
    both of which vanish when ``J_p(k) = J_p(s k) = 0``.
    """
    alpha = alpha_coefficient(p, kappa_star, n_star)
    s = sqrt(n_star)
    out = {}
    for q in ([1] if p == 0 else [p - 1, p + 1]):
        a, b = bessel_j(q, kappa_star), bessel_j(q, s * kappa_star)
        out[q] = (
            complex(a.value - alpha * s * b.value),
            complex(a.derivative - alpha * n_star * b.derivative),
        )
    return out


def interior_limit(p: int, kappa: complex) -> complex:
    """``lim_{n -> 1} F_p(kappa, n) / (n - 1)``; its roots are where trajectories cross ``n = 1``."""
    a = bessel_j(p, kappa)
    return 0.5 * (kappa**2 * a.derivative**2 + (kappa**2 - p**2) * a.value**2)
