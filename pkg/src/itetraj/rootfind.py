"""
Roots of holomorphic scalar functions inside rectangles.

The number of zeros inside a box is the winding integral of ``f'/f``.  The
moments ``s_k = (1/2 pi i) \\oint z^k f'/f dz`` determine the distinct zeros
through a Hankel pencil and their multiplicities through a Vandermonde
solve, which is the scalar form of Beyn's contour-integral method.  Results
are Newton-polished afterwards.
"""

from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from .errors import ContourError, NoConvergenceError, SubdivisionRequired

MAX_CLUSTER = 8


@dataclass(frozen=True)
class ContourBox:
    """Axis-aligned rectangle ``center +- half_width +- i half_height``."""

    center: complex
    half_width: float
    half_height: float
    quadrature_nodes: int = 512

    def __post_init__(self):
        if self.half_width <= 0 or self.half_height <= 0:
            raise ValueError("box half sizes must be positive")
        if self.quadrature_nodes < 16:
            raise ValueError("need at least 16 quadrature nodes")

    @classmethod
    def from_bounds(cls, re_min, re_max, im_min, im_max, quadrature_nodes=512):
        return cls(
            complex(0.5 * (re_min + re_max), 0.5 * (im_min + im_max)),
            0.5 * (re_max - re_min),
            0.5 * (im_max - im_min),
            quadrature_nodes,
        )

    @property
    def radius(self) -> float:
        return max(self.half_width, self.half_height)

    def contains(self, z) -> np.ndarray:
        d = np.asarray(z) - self.center
        return (np.abs(d.real) < self.half_width) & (np.abs(d.imag) < self.half_height)

    def subdivide(self, fx: float = 0.5, fy: float = 0.5) -> list:
        """Split into a 2x2 partition at fractions ``fx``, ``fy`` of the width and height.

        Order: lower-left, lower-right, upper-left, upper-right.
        """
        c, a, b = self.center, self.half_width, self.half_height
        x0, x1, x2 = c.real - a, c.real - a + 2 * a * fx, c.real + a
        y0, y1, y2 = c.imag - b, c.imag - b + 2 * b * fy, c.imag + b
        return [
            ContourBox.from_bounds(xa, xb, ya, yb, self.quadrature_nodes)
            for ya, yb in ((y0, y1), (y1, y2))
            for xa, xb in ((x0, x1), (x1, x2))
        ]

    def shifted(self, dz: complex) -> "ContourBox":
        return ContourBox(self.center + dz, self.half_width, self.half_height, self.quadrature_nodes)

    def quadrature(self):
        """Nodes ``z_j`` and weights ``w_j`` with ``sum w_j g(z_j) ~ \\oint g dz`` (counterclockwise).

        Gauss-Legendre on each edge, with nodes shared out in proportion to
        the edge lengths (at least 8 per edge).
        """
        c, a, b = self.center, self.half_width, self.half_height
        horizontal = max(8, int(round(self.quadrature_nodes * a / (2 * (a + b)))))
        vertical = max(8, self.quadrature_nodes // 2 - horizontal)
        corners = [c + complex(-a, -b), c + complex(a, -b), c + complex(a, b), c + complex(-a, b)]
        nodes, weights = [], []
        for k in range(4):
            x, w = np.polynomial.legendre.leggauss(horizontal if k % 2 == 0 else vertical)
            z0, z1 = corners[k], corners[(k + 1) % 4]
            nodes.append(0.5 * (z0 + z1) + 0.5 * (z1 - z0) * x)
            weights.append(0.5 * (z1 - z0) * w)
        return np.concatenate(nodes), np.concatenate(weights)


@dataclass
class RootCluster:
    """A located zero of multiplicity ``multiplicity`` with residual ``|f(location)|``."""

    location: complex
    multiplicity: int = 1
    residual: float = 0.0
    iterations: int = 0
    trace: list = field(default_factory=list, repr=False)


def _derivative_fd(f, scale):
    h = 1e-3 * scale

    def df(z):
        return (-f(z + 2 * h) + 8 * f(z + h) - 8 * f(z - h) + f(z - 2 * h)) / (12 * h)

    return df


def _log_derivative(f, df, box):
    z, w = box.quadrature()
    if df is None:
        df = _derivative_fd(f, box.radius)
    fz = np.array([f(zj) for zj in z], dtype=complex)
    absf = np.abs(fz)
    if not np.all(np.isfinite(fz)) or absf.min() <= 1e-12 * absf.max():
        raise ContourError(
            f"f nearly vanishes on the contour of box at {box.center} "
            f"(min|f|/max|f| = {absf.min() / max(absf.max(), 1e-300):.2e})"
        )
    dfz = np.array([df(zj) for zj in z], dtype=complex)
    return z, w, dfz / fz


@dataclass(frozen=True)
class ContourCount:
    count: int
    raw: complex

    @property
    def defect(self) -> float:
        """Distance of the raw quadrature value from the nearest integer."""
        return abs(self.raw - self.count)


def argument_count(f: Callable, box: ContourBox, df: Optional[Callable] = None) -> ContourCount:
    """Argument-principle count with the raw quadrature value attached."""
    _, w, g = _log_derivative(f, df, box)
    raw = np.sum(w * g) / (2j * np.pi)
    count = int(round(raw.real))
    if abs(raw - count) > 0.25:
        raise ContourError(f"winding integral {raw:.4f} is not close to an integer")
    return ContourCount(count, complex(raw))


def count_roots(f: Callable, box: ContourBox, df: Optional[Callable] = None) -> int:
    """Number of zeros of ``f`` inside ``box`` counted with multiplicity."""
    return argument_count(f, box, df).count


def _moments(z, wg, center, radius, kmax):
    u = (z - center) / radius
    powers = u[None, :] ** np.arange(kmax + 1)[:, None]
    return powers @ wg / (2j * np.pi)


def contour_moments(f: Callable, box: ContourBox, kmax: int, df: Optional[Callable] = None):
    """Scaled moments ``s_k`` of ``u = (z - center)/radius`` for ``k = 0..kmax``."""
    z, w, g = _log_derivative(f, df, box)
    return _moments(z, w * g, box.center, box.radius, kmax)


def _distinct_from_moments(s, total, rank_tol=1e-7):
    h0 = np.array([[s[i + j] for j in range(total)] for i in range(total)])
    h1 = np.array([[s[i + j + 1] for j in range(total)] for i in range(total)])
    u, sv, vh = np.linalg.svd(h0)
    rank = int(np.sum(sv > rank_tol * sv[0])) if sv[0] > 0 else 0
    if rank == 0:
        raise SubdivisionRequired("zero Hankel matrix")
    ur, vr = u[:, :rank], vh[:rank].conj().T
    pencil = ur.conj().T @ h1 @ vr / sv[:rank]
    nodes = np.linalg.eigvals(pencil)
    vander = nodes[None, :] ** np.arange(len(s))[:, None]
    mult, *_ = np.linalg.lstsq(vander, s, rcond=None)
    return nodes, mult


_RANK_LADDER = (1e-11, 1e-9, 1e-7, 1e-5)


def _resolve_moments(s, count):
    """Distinct nodes and integer multiplicities, loosening the rank cut until the moments are reproduced."""
    scale = max(1.0, float(np.max(np.abs(s[: count + 1]))))
    last = None
    for tol in _RANK_LADDER:
        try:
            nodes, mult = _distinct_from_moments(s, count, tol)
        except SubdivisionRequired:
            continue
        m_int = np.rint(mult.real).astype(int)
        last = mult
        if np.any(m_int < 1) or m_int.sum() != count or np.max(np.abs(mult - m_int)) > 0.2:
            continue
        # low orders only: high moments carry amplified quadrature error after recentring
        low = s[: count + 1]
        recon = (m_int[None, :] * nodes[None, :] ** np.arange(len(low))[:, None]).sum(axis=1)
        if np.max(np.abs(recon - low)) <= 1e-3 * scale:
            return nodes, m_int
    shown = "none" if last is None else np.round(last, 3)
    raise SubdivisionRequired(f"moments not resolved into integer multiplicities (last try {shown})")


def newton_polish(
    f_with_derivative: Callable,
    guess: complex,
    tol: float = 1e-12,
    max_iter: int = 50,
    step_tol: float = 1e-15,
) -> RootCluster:
    """Newton iteration on ``f_with_derivative(z) -> (f(z), f'(z))``.

    Stops when ``|f| < tol`` or the step falls below ``step_tol * max(1, |z|)``.
    Linear convergence with ratio ``r`` is read as a root of multiplicity
    ``round(1 / (1 - r))`` and reported on the returned cluster.

    Raises :class:`NoConvergenceError` if ``|f|`` has not decreased after three
    iterations or the iteration cap is hit above tolerance.
    """
    z = complex(guess)
    fz, dfz = f_with_derivative(z)
    trace = [z]
    f0 = abs(fz)
    if f0 < tol:
        return RootCluster(z, 1, f0, 0, trace)
    steps = []
    for it in range(1, max_iter + 1):
        if dfz == 0:
            raise NoConvergenceError("zero derivative in Newton iteration", trace)
        dz = fz / dfz
        z = z - dz
        trace.append(z)
        steps.append(abs(dz))
        fz, dfz = f_with_derivative(z)
        if it == 3 and not abs(fz) < f0:
            raise NoConvergenceError("|f| not decreasing: guess outside the Newton basin", trace)
        if abs(fz) < tol or abs(dz) < step_tol * max(1.0, abs(z)):
            break
    else:
        if not abs(fz) < tol:
            raise NoConvergenceError(f"Newton did not converge in {max_iter} iterations", trace)
    multiplicity = 1
    if len(steps) >= 6:
        ratios = [steps[i + 1] / steps[i] for i in range(len(steps) - 4, len(steps) - 1) if steps[i] > 0]
        if ratios:
            r = float(np.median(ratios))
            if 0.3 < r < 0.95:
                multiplicity = int(round(1.0 / (1.0 - r)))
    return RootCluster(z, multiplicity, abs(fz), len(trace) - 1, trace)


def _polish_cluster(f, df, z0, m, scale):
    """Modified Newton ``z - m f/f'`` from a moment estimate."""
    z = complex(z0)
    for _ in range(30):
        fz = f(z)
        dfz = df(z)
        if fz == 0 or dfz == 0:
            break
        dz = m * fz / dfz
        if abs(dz) > 0.1 * scale:
            break
        z -= dz
        if abs(dz) < 1e-15 * max(1.0, abs(z)):
            break
    return z


def locate_roots(
    f: Callable,
    box: ContourBox,
    expected_count: Optional[int] = None,
    df: Optional[Callable] = None,
    polish: bool = True,
) -> List[RootCluster]:
    """Zeros of ``f`` inside ``box`` with multiplicities.

    ``expected_count`` defaults to :func:`count_roots`.  Raises
    :class:`SubdivisionRequired` when the count exceeds 8 or the moment
    system cannot be resolved into integer multiplicities.
    """
    count = argument_count(f, box, df).count if expected_count is None else expected_count
    if count == 0:
        return []
    if count > MAX_CLUSTER:
        raise SubdivisionRequired(f"{count} roots in one box exceeds {MAX_CLUSTER}")
    z, w, g = _log_derivative(f, df, box)
    s = _moments(z, w * g, box.center, box.radius, 2 * count)
    if abs(s[0] - count) > 0.25:
        raise ContourError(f"moment s_0 = {s[0]:.4f} disagrees with count {count}")
    center, radius = box.center, box.radius
    try:
        nodes, m_int = _resolve_moments(s, count)
    except SubdivisionRequired:
        # clustered zeros: recentre on their centroid and rescale to their spread
        mean = s[1] / s[0]
        spread = np.sqrt(abs(s[2] / s[0] - mean**2))
        center = box.center + box.radius * mean
        radius = box.radius * max(2.0 * spread, 1e-3)
        nodes, m_int = _resolve_moments(_moments(z, w * g, center, radius, 2 * count), count)
    derivative = df if df is not None else _derivative_fd(f, box.radius)
    out = []
    for u, m in zip(nodes, m_int):
        z = center + radius * u
        if polish:
            z = _polish_cluster(f, derivative, z, int(m), box.radius)
        out.append(RootCluster(complex(z), int(m), float(abs(f(z)))))
    out.sort(key=lambda c: (c.location.real, c.location.imag))
    return out


def moment_defect(clusters: List[RootCluster], box: ContourBox, moments) -> float:
    """Largest ``|sum_j m_j u_j^k - s_k|`` over the supplied scaled moments."""
    u = np.array([(c.location - box.center) / box.radius for c in clusters])
    m = np.array([c.multiplicity for c in clusters])
    k = np.arange(len(moments))
    recon = (m[None, :] * u[None, :] ** k[:, None]).sum(axis=1) if len(u) else np.zeros(len(k))
    return float(np.max(np.abs(recon - moments)))


_SPLITS = ((0.5, 0.5), (0.4711, 0.5279), (0.5387, 0.4623), (0.4429, 0.4517))


def find_roots(
    f: Callable,
    box: ContourBox,
    df: Optional[Callable] = None,
    max_depth: int = 8,
) -> List[RootCluster]:
    """All zeros inside ``box``, splitting it whenever a cluster is unresolved.

    A split whose inner edges pass too close to a zero is retried at a few
    off-centre fractions.  Contour errors on ``box`` itself propagate.
    """
    try:
        return locate_roots(f, box, df=df)
    except SubdivisionRequired:
        if max_depth <= 0:
            raise
    last_error = None
    for fx, fy in _SPLITS:
        subs = box.subdivide(fx, fy)
        try:
            for sub in subs:
                argument_count(f, sub, df)
        except ContourError as exc:
            last_error = exc
            continue
        roots = []
        for sub in subs:
            roots.extend(find_roots(f, sub, df, max_depth - 1))
        return sorted(roots, key=lambda c: (c.location.real, c.location.imag))
    raise last_error
