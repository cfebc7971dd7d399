"""
Modified method of fundamental solutions for transmission and Dirichlet eigenvalues.

Each field is a combination of point sources ``Y_0(k |x - y_j|)`` placed on
a circle outside the scatterer: ``v`` with wave number ``kappa`` and ``w``
with ``sqrt(n) kappa``.  The collocation matrix stacks the boundary
conditions (``v - w`` and its normal derivative) on top of the field values
at a few interior nodes.  The interior rows rule out the trivial answer of
fields that vanish everywhere inside: the misfit is the smallest singular
value of the boundary block of an orthonormal basis of the column space,
so it is small exactly when some combination meets the boundary conditions
while staying of unit size in the interior.

``Y_0`` is used rather than ``H_0^(1)`` because it is real for real
arguments, which makes the misfit symmetric under ``kappa -> conj(kappa)``.
"""

import logging
from dataclasses import dataclass
from math import sqrt
from typing import Optional

import numpy as np
from scipy import optimize

from .errors import LayoutError, NumericalError, SpuriousMinimumError, StepFailureError
from .geometry import MfsLayout
from .rootfind import RootCluster
from .specfun import bessel_y01
from .trajectory import Trajectory, TrajectoryPoint

log = logging.getLogger(__name__)

ACCEPT_MISFIT = 1e-4
SIMPLEX_RADIUS = 0.05
SIMPLEX_DIAMETER = 1e-8
RANK_TOL = 1e-10
PROBLEMS = ("itp", "dirichlet")


def _y0(k, r, derivative):
    """``Y_0(k r)`` (and ``Y_0'``) with ``Im k < 0`` handled by reflection ``Y_0(conj z) = conj Y_0(z)``."""
    if k.imag < 0:
        value, deriv = bessel_y01(k.conjugate() * r, derivative)
        return np.conj(value), (None if deriv is None else np.conj(deriv))
    return bessel_y01(k * r, derivative)


def kernel(k: complex, points, sources, normals=None):
    """Point-source values ``Y_0(k r_ij)`` and, with ``normals``, their normal derivatives."""
    k = complex(k)
    diff = np.asarray(points)[:, None] - np.asarray(sources)[None, :]
    r = np.abs(diff)
    if np.min(r) < 1e-10:
        raise LayoutError("a source coincides with an evaluation point")
    value, derivative = _y0(k, r, normals is not None)
    if normals is None:
        return value, None
    cos_angle = (diff * np.conj(np.asarray(normals))[:, None]).real / r
    return value, k * derivative * cos_angle


@dataclass(frozen=True)
class MfsSystem:
    """Column-normalized collocation matrix; the first ``boundary_rows`` rows are boundary conditions."""

    kappa: complex
    n: Optional[float]
    layout: MfsLayout
    problem: str
    matrix: np.ndarray
    boundary_rows: int
    column_norms: np.ndarray


@dataclass(frozen=True)
class MisfitSample:
    kappa: complex
    value: float


def assemble(kappa: complex, n: Optional[float], layout: MfsLayout, problem: str = "itp",
             scale: complex = 1.0) -> MfsSystem:
    """Collocation system at ``kappa``.

    ``problem="itp"``: rows ``v - w``, ``d_nu(v - w)`` on the boundary, then
    ``v`` and ``w`` at the interior nodes; columns are the ``v`` sources
    followed by the ``w`` sources.  ``problem="dirichlet"``: rows ``v`` on the
    boundary, then ``v`` at the interior nodes.  ``scale`` multiplies the
    kernel; it cancels in the column normalization.
    """
    if problem not in PROBLEMS:
        raise ValueError(f"problem must be one of {PROBLEMS}")
    kappa = complex(kappa)
    if kappa == 0:
        raise ValueError("kappa must be nonzero")
    x, nu, y, z = layout.collocation, layout.normals, layout.sources, layout.interior
    if problem == "dirichlet":
        bv, _ = kernel(kappa, x, y)
        iv, _ = kernel(kappa, z, y)
        mat = scale * np.vstack([bv, iv])
        rows = len(x)
    else:
        if n is None or not n > 0:
            raise ValueError("transmission problem needs a positive index n")
        k2 = sqrt(n) * kappa
        bv, dv = kernel(kappa, x, y, nu)
        bw, dw = kernel(k2, x, y, nu)
        iv, _ = kernel(kappa, z, y)
        iw, _ = kernel(k2, z, y)
        zero = np.zeros_like(iv)
        mat = scale * np.block([[bv, -bw], [dv, -dw], [iv, zero], [zero, iw]])
        rows = 2 * len(x)
    if not np.all(np.isfinite(mat)):
        raise NumericalError(f"non-finite kernel entries at kappa={kappa}")
    norms = np.linalg.norm(mat, axis=0)
    if np.any(norms == 0):
        raise NumericalError("zero column in the collocation matrix")
    return MfsSystem(kappa, n, layout, problem, mat / norms, rows, norms)


def smallest_singular_value(a) -> float:
    """Smallest of the ``min(rows, cols)`` singular values (LAPACK divide and conquer)."""
    try:
        s = np.linalg.svd(np.asarray(a), compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD did not converge for a {np.shape(a)} matrix") from exc
    return float(s[-1])


def system_misfit(system: MfsSystem, rank_tol: float = RANK_TOL) -> float:
    """Smallest singular value of the boundary block of an orthonormal column-space basis.

    Directions with singular values below ``rank_tol`` times the largest are
    discarded as numerically absent.
    """
    try:
        u, s, _ = np.linalg.svd(system.matrix, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError("SVD of the collocation matrix did not converge") from exc
    keep = s > rank_tol * s[0]
    return smallest_singular_value(u[: system.boundary_rows, keep])


def misfit(kappa: complex, n: Optional[float], layout: MfsLayout, problem: str = "itp",
           scale: complex = 1.0) -> MisfitSample:
    return MisfitSample(complex(kappa), system_misfit(assemble(kappa, n, layout, problem, scale)))


def _diameter(simplex):
    d = simplex[:, None, :] - simplex[None, :, :]
    return float(np.sqrt((d**2).sum(axis=-1)).max())


def find_ite(n: float, layout: MfsLayout, guess: complex, problem: str = "itp",
             accept: float = ACCEPT_MISFIT, scale: complex = 1.0) -> RootCluster:
    """Local misfit minimizer near ``guess`` by Nelder-Mead over ``(Re kappa, Im kappa)``.

    Raises :class:`SpuriousMinimumError` when the minimum is not below
    ``accept`` or the simplex has not collapsed below 1e-8.
    """
    evals = []

    def objective(x):
        val = misfit(complex(x[0], x[1]), n, layout, problem, scale).value
        evals.append(val)
        return val

    g = complex(guess)
    x0 = np.array([g.real, g.imag])
    simplex = np.array([x0, x0 + [SIMPLEX_RADIUS, 0.0], x0 + [0.0, SIMPLEX_RADIUS]])
    # misfit minima are cones, so the value spread never drops below slope * diameter:
    # terminate on the simplex size alone
    res = optimize.minimize(
        objective, x0, method="Nelder-Mead",
        options={"initial_simplex": simplex, "xatol": 2e-9, "fatol": np.inf, "maxiter": 1500},
    )
    loc = complex(res.x[0], res.x[1])
    diam = _diameter(res.final_simplex[0])
    if not (res.fun < accept and diam < SIMPLEX_DIAMETER):
        raise SpuriousMinimumError(
            f"misfit minimum {res.fun:.2e} at {loc:.6f} (simplex diameter {diam:.1e}) is not an eigenvalue",
            loc, float(res.fun),
        )
    return RootCluster(loc, 1, float(res.fun), int(res.nit), [])


def find_ide(layout: MfsLayout, guess: float, search_radius: float = 0.3, samples: int = 61,
             accept: float = ACCEPT_MISFIT) -> RootCluster:
    """Dirichlet eigenvalue near the real ``guess``: coarse scan, then bounded 1D minimization."""
    grid = np.linspace(guess - search_radius, guess + search_radius, samples)
    grid = grid[grid > 0]
    vals = np.array([misfit(k, None, layout, "dirichlet").value for k in grid])
    i = int(np.argmin(vals))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
    res = optimize.minimize_scalar(
        lambda k: misfit(k, None, layout, "dirichlet").value,
        bounds=(lo, hi), method="bounded", options={"xatol": 1e-12},
    )
    if not res.fun < accept:
        raise SpuriousMinimumError(f"misfit minimum {res.fun:.2e} at {res.x:.6f} is not an eigenvalue",
                                   complex(res.x), float(res.fun))
    return RootCluster(complex(res.x), 1, float(res.fun), int(res.nfev), [])


def continue_mfs(layout: MfsLayout, n_start: float, n_end: float, seed: complex,
                 dn: float = 0.25, max_halvings: int = 4, problem: str = "itp") -> Trajectory:
    """MFS trajectory on the grid ``n_start, n_start + dn, ...``, seeding each solve from the last one.

    A failed solve is retried at half the step (up to ``max_halvings`` times)
    before :class:`StepFailureError` is raised; the points reached so far are
    attached to the exception as ``partial``.
    """
    direction = 1.0 if n_end >= n_start else -1.0
    traj = Trajectory(None, getattr(layout.scatterer, "label", None) or layout.scatterer.kind, solver="mfs")
    first = find_ite(n_start, layout, seed, problem)
    traj.points.append(TrajectoryPoint(float(n_start), first.location, first.residual))
    n, k = float(n_start), first.location
    while direction * (n_end - n) > 1e-12:
        h = dn
        for _ in range(max_halvings + 1):
            n_new = n + direction * min(h, abs(n_end - n))
            try:
                root = find_ite(n_new, layout, k, problem)
                break
            except SpuriousMinimumError as exc:
                log.info("MFS solve failed at n=%.4f: %s", n_new, exc)
                h *= 0.5
        else:
            err = StepFailureError(f"MFS continuation failed beyond n={n:.4f} (kappa={k:.6f})")
            err.partial = traj
            raise err
        n, k = n_new, root.location
        traj.points.append(TrajectoryPoint(n, k, root.residual))
    return traj
