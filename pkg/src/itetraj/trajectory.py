"""
Continuation of transmission eigenvalues in the refractive index.

A trajectory ``n -> kappa_n`` is followed by Euler prediction along the
implicit-function slope ``-dF/dn / dF/dkappa`` and Newton correction in
``kappa``.  At a Dirichlet eigenvalue ``kappa*`` with ``F(kappa*, n*) = 0``
the determinant has a triple root, the slope blows up and the three local
branches obey ``(kappa - kappa*)^3 ~ c (n - n*)``.  The stepper crosses such
points on that cube-root model, sampling the approach and exit densely so
that the approach angles can be estimated afterwards.
"""

import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from math import pi, sqrt
from typing import List, Optional, Sequence

import numpy as np

from .disk_ball import BallDeterminant, DiskDeterminant, cube_coefficient
from .errors import BranchJumpError, ContractError, DomainError, ResolutionError, StepFailureError
from .specfun import bessel_j, spherical_j

log = logging.getLogger(__name__)

CROSSING_TOL = 1e-4
MATCH_TOL = 5e-3
ANGLE_TOL = 0.05


class EventKind(str, Enum):
    REAL_AXIS_CROSSING = "RealAxisCrossing"
    IDE_RECURRENCE = "IdeRecurrence"
    ANGLE_ESTIMATE = "AngleEstimate"
    BIRTH_POINT = "BirthPoint"
    CONVERGENCE_CHECK = "ConvergenceCheck"


@dataclass
class TrajectoryPoint:
    n: float
    kappa: complex
    residual: float
    velocity: Optional[complex] = None


@dataclass
class Event:
    kind: EventKind
    n_at: float
    kappa_at: complex
    payload: dict = field(default_factory=dict)


@dataclass
class Trajectory:
    """Samples of one eigenvalue branch ordered along the continuation direction."""

    mode: Optional[int]
    scatterer: str
    points: List[TrajectoryPoint] = field(default_factory=list)
    events: List[Event] = field(default_factory=list)
    solver: str = "analytic"

    @property
    def n(self) -> np.ndarray:
        return np.array([p.n for p in self.points], dtype=float)

    @property
    def kappa(self) -> np.ndarray:
        return np.array([p.kappa for p in self.points], dtype=complex)

    @property
    def residual(self) -> np.ndarray:
        return np.array([p.residual for p in self.points], dtype=float)

    def __len__(self):
        return len(self.points)

    def conjugate(self) -> "Trajectory":
        pts = [replace(p, kappa=p.kappa.conjugate(),
                       velocity=None if p.velocity is None else p.velocity.conjugate())
               for p in self.points]
        evs = [replace(e, kappa_at=e.kappa_at.conjugate()) for e in self.events]
        return Trajectory(self.mode, self.scatterer, pts, evs, self.solver)

    def after(self, n_from: float) -> "Trajectory":
        """Points from the first sample at or beyond ``n_from`` along the traversal."""
        n = self.n
        direction = np.sign(n[-1] - n[0]) or 1.0
        keep = [p for p in self.points if direction * (p.n - n_from) >= -1e-15]
        return Trajectory(self.mode, self.scatterer, keep, [], self.solver)


@dataclass(frozen=True)
class StepControl:
    """Step-size and branch policy for :func:`continue_trajectory`."""

    dn_init: float = 0.01
    dn_min: float = 1e-5
    dn_max: float = 0.1
    max_newton: int = 5
    trust_radius: float = 0.05
    residual_tol: float = 1e-9
    preserve_half_plane: bool = True
    ide_radius: float = 0.1
    approach_samples: int = 12
    approach_min_radius: float = 1e-3
    ide_table_size: int = 40


def determinant_for(scatterer: str, p: int):
    if scatterer == "disk":
        return DiskDeterminant(p)
    if scatterer == "ball":
        return BallDeterminant(p)
    raise DomainError(f"no analytic determinant for scatterer {scatterer!r}")


def _slope(det, kappa, n):
    dk = det.dkappa(kappa, n)
    if dk == 0:
        return None
    return -det.dn(kappa, n) / dk


def _newton(det, kappa, n, max_iter=12):
    """Newton in kappa at fixed n; returns (kappa, iterations, relative residual)."""
    k = complex(kappa)
    last = np.inf
    for it in range(1, max_iter + 1):
        try:
            f, df = det.value_and_dkappa(k, n)
        except DomainError:
            # iterate left the evaluation window: a diverged step, not a fault
            return k, max_iter + 1, np.inf
        scale = det.scale(k, n)
        if abs(f) <= 1e-14 * scale:
            return k, it - 1, abs(f) / scale
        if df == 0:
            break
        dk = f / df
        k -= dk
        step = abs(dk)
        # stagnation at the rounding floor counts as convergence
        if step <= 1e-12 * max(1.0, abs(k)) or (step < 1e-9 * max(1.0, abs(k)) and step > 0.5 * last):
            f = det.value(k, n)
            return k, it, abs(f) / det.scale(k, n)
        last = step
    f = det.value(k, n)
    return k, max_iter + 1, abs(f) / max(det.scale(k, n), 1e-300)


def _point(det, kappa, n, with_velocity=True):
    v = _slope(det, kappa, n) if with_velocity else None
    return TrajectoryPoint(float(n), complex(kappa), float(abs(det.value(kappa, n))), v)


def _nearest(table, x):
    i = int(np.argmin(np.abs(np.asarray(table) - x)))
    return table[i]


def _solve_crossing_index(det, kstar, n0):
    """Real Newton for ``F(kstar, n) = 0`` near ``n0``."""
    n = float(n0)
    for _ in range(30):
        try:
            g = det.value(kstar, n).real
            dg = det.dn(kstar, n).real
        except DomainError:
            return None
        if dg == 0:
            return None
        step = g / dg
        n -= step
        if n <= 0:
            return None
        if abs(step) < 1e-15 * max(1.0, n):
            break
    return n


def _upcoming_crossing(det, n, k, direction, n_end, ides, ctrl, crossed, radius=None):
    kstar = _nearest(ides, k.real)
    w = k - kstar
    rho = abs(w)
    if rho >= (radius or ctrl.ide_radius) or rho < 1e-12:
        return None
    c_model = cube_coefficient(kstar, n)
    n0 = n - (w**3 / c_model).real
    if direction * (n0 - n) <= 0 or abs(n0 - 1.0) < 1e-9:
        return None
    nstar = _solve_crossing_index(det, kstar, n0)
    if nstar is None or direction * (nstar - n) <= 0 or direction * (n_end - nstar) < 0:
        return None
    if abs(nstar - n0) > 0.5 * abs(n0 - n) + 1e-12:
        return None
    if any(abs(nstar - c) < 1e-9 for c in crossed):
        return None
    c_data = w**3 / (n - nstar)
    if abs(c_data / cube_coefficient(kstar, nstar) - 1.0) > 0.5:
        return None
    return kstar, nstar


def _cross(det, n, k, kstar, nstar, ctrl):
    """Approach, cross and leave the triple point ``(kstar, nstar)``.

    Returns the new points (approach, crossing, exit) and the final state.
    """
    w0 = k - kstar
    rho0 = abs(w0)
    radii = np.geomspace(rho0, ctrl.approach_min_radius, ctrl.approach_samples + 1)[1:]
    pts = []
    offset = w0
    prev_r = rho0
    for r in radii:
        n_r = nstar + (n - nstar) * (r / rho0) ** 3
        pred = kstar + offset * (r / prev_r)
        kr, its, rel = _newton(det, pred, n_r)
        if its > 12 or abs(kr - pred) > 0.3 * r:
            raise BranchJumpError(
                "corrector left the cube-root sector while approaching a Dirichlet eigenvalue",
                {"n": n_r, "predicted": pred, "corrected": kr, "ide": kstar, "n_star": nstar},
            )
        pts.append(_point(det, kr, n_r))
        offset, prev_r = kr - kstar, r
    pts.append(TrajectoryPoint(float(nstar), complex(kstar), float(abs(det.value(kstar, nstar))), None))

    # exit offsets solve (k - k*)^3 = -offset^3: -offset times a cube root of unity
    candidates = [-offset * np.exp(2j * pi * j / 3) for j in range(3)]
    real_incoming = abs(offset.imag) < 1e-3 * abs(offset)
    if real_incoming or not ctrl.preserve_half_plane:
        exit_offset = candidates[0]
    else:
        same = [c for c in candidates if np.sign(c.imag) == np.sign(offset.imag) and abs(c.imag) > 0.1 * abs(c)]
        exit_offset = same[0]
    prev_r = radii[-1]
    offset = exit_offset
    for r in list(radii[::-1][1:]) + [rho0]:
        n_r = nstar - (n - nstar) * (r / rho0) ** 3
        pred = kstar + offset * (r / prev_r)
        kr, its, rel = _newton(det, pred, n_r)
        if its > 12 or abs(kr - pred) > 0.3 * r:
            raise BranchJumpError(
                "corrector left the cube-root sector while leaving a Dirichlet eigenvalue",
                {"n": n_r, "predicted": pred, "corrected": kr, "ide": kstar, "n_star": nstar},
            )
        pts.append(_point(det, kr, n_r))
        offset, prev_r = kr - kstar, r
    return pts


def continue_trajectory(
    det,
    n_start: float,
    n_end: float,
    seed: complex,
    control: Optional[StepControl] = None,
    n_samples: Optional[Sequence[float]] = None,
    scatterer: Optional[str] = None,
) -> Trajectory:
    """Follow the root ``seed`` of ``det(., n_start)`` to ``n_end``.

    ``det`` is a :class:`~itetraj.disk_ball.DiskDeterminant` or
    :class:`~itetraj.disk_ball.BallDeterminant` (anything exposing
    ``value``, ``value_and_dkappa``, ``dkappa``, ``dn``, ``scale`` and
    ``ides``).  ``n_samples`` forces output points at the given indices in
    addition to the adaptive ones.  The interval must not contain ``n = 1``.
    """
    ctrl = control or StepControl()
    if n_start <= 0 or n_end <= 0 or (n_start - 1.0) * (n_end - 1.0) <= 0:
        raise DomainError("continuation interval must lie on one side of n = 1")
    if min(abs(n_start - 1.0), abs(n_end - 1.0)) < 1e-6:
        raise DomainError("continuation interval must stay 1e-6 away from n = 1")
    seed = complex(seed)
    rel0 = abs(det.value(seed, n_start)) / det.scale(seed, n_start)
    if rel0 > 1e-8:
        raise ContractError(f"seed {seed} is not a root at n={n_start} (relative residual {rel0:.2e})")
    direction = 1.0 if n_end > n_start else -1.0
    targets = sorted(
        (float(x) for x in (n_samples or ()) if direction * (x - n_start) > 0 and direction * (n_end - x) >= 0),
        key=lambda x: direction * x,
    )
    ides = det.ides(ctrl.ide_table_size)
    traj = Trajectory(det.p, scatterer or det.name, [_point(det, seed, n_start)])
    if abs(n_start - 1.0) <= 0.1:
        traj.events.append(Event(EventKind.BIRTH_POINT, float(n_start), seed, {"note": "seed of window scan near n = 1"}))

    try:
        _advance(det, traj, n_end, direction, targets, ides, ctrl)
    except (BranchJumpError, StepFailureError) as exc:
        exc.partial = traj
        raise
    return traj


def _advance(det, traj, n_end, direction, targets, ides, ctrl):
    n, k = traj.points[-1].n, traj.points[-1].kappa
    dn = ctrl.dn_init
    crossed = []
    while direction * (n_end - n) > 1e-14:
        v = _slope(det, k, n)
        hit = _upcoming_crossing(det, n, k, direction, n_end, ides, ctrl, crossed)
        ahead = None
        if hit is None:
            ahead = _upcoming_crossing(det, n, k, direction, n_end, ides, ctrl, crossed, 5 * ctrl.ide_radius)
            if ahead is not None and v is not None and abs(v) * ctrl.dn_min * 10 > ctrl.trust_radius:
                # for small n the cube-root sector is too thin in n to reach at dn_min
                hit, ahead = ahead, None
        if hit is not None:
            kstar, nstar = hit
            log.debug("crossing Dirichlet eigenvalue %.6f at n=%.6f", kstar, nstar)
            new = _cross(det, n, k, kstar, nstar, ctrl)
            crossed.append(nstar)
            traj.points.extend(new)
            n, k = new[-1].n, new[-1].kappa
            while targets and direction * (targets[0] - n) <= 1e-12:
                targets.pop(0)
            dn = max(ctrl.dn_min, min(ctrl.dn_max, abs(new[-1].n - new[-2].n)))
            continue

        h = min(dn, ctrl.dn_max, abs(n_end - n))
        if targets:
            h = min(h, abs(targets[0] - n))
        if ahead is not None:
            # close in on a crossing gradually instead of stepping over it
            h = min(h, 0.5 * abs(ahead[1] - n))
        if v is not None and abs(v) * h > ctrl.trust_radius:
            h = max(ctrl.trust_radius / abs(v), min(ctrl.dn_min, h))
        n_new = n + direction * h
        if targets and abs(n_new - targets[0]) < 1e-12:
            n_new = targets[0]
        if direction * (n_new - n_end) > 0 or abs(n_new - n_end) < 1e-12:
            n_new = n_end
        pred = k + (n_new - n) * (v if v is not None else 0.0)
        knew, its, rel = _newton(det, pred, n_new)
        dpred = abs(pred - k)
        floor = 1e-7 * (1.0 + abs(k))
        ok = (
            its <= ctrl.max_newton
            and rel <= ctrl.residual_tol
            and abs(knew - pred) <= 0.3 * dpred + floor
            and abs(knew - k) <= 5.0 * dpred + floor
        )
        if not ok:
            if h <= ctrl.dn_min * (1 + 1e-12):
                cls = StepFailureError if rel > ctrl.residual_tol else BranchJumpError
                msg = f"continuation stalled at n={n:.8f}, kappa={k}"
                if cls is BranchJumpError:
                    raise BranchJumpError(msg, {"n": n, "kappa": k, "predicted": pred, "corrected": knew})
                raise StepFailureError(msg)
            dn = max(ctrl.dn_min, 0.5 * h)
            continue
        n, k = n_new, knew
        traj.points.append(_point(det, k, n))
        if targets and abs(n - targets[0]) < 1e-12:
            targets.pop(0)
        if its <= 2:
            dn = min(ctrl.dn_max, 1.5 * h)
        else:
            dn = h


def seed_roots(det, n: float, re_range=(0.5, 12.0), im_range=(0.05, 4.0)):
    """Non-real roots of ``det(., n)`` in a window of the upper half plane, ordered by real part."""
    from .rootfind import ContourBox, find_roots

    box = ContourBox.from_bounds(re_range[0], re_range[1], im_range[0], im_range[1])
    roots = find_roots(lambda z: det.value(z, n), box, df=lambda z: det.dkappa(z, n))
    return [r.location for r in roots]


def detect_real_crossings(
    traj: Trajectory,
    ide_table: Sequence[float],
    crossing_tol: float = CROSSING_TOL,
    match_tol: float = MATCH_TOL,
) -> List[Event]:
    """Real-axis contacts of a trajectory, each matched to the nearest Dirichlet eigenvalue.

    A contact is a run of samples with ``|Im kappa| < crossing_tol`` (reported
    at its smallest ``|Im kappa|``) or a sign change of ``Im kappa`` between
    neighbours (reported at the linear interpolant).  Contacts farther than
    ``match_tol`` from every table entry are returned with
    ``payload['violation'] = True``.
    """
    if not traj.points:
        return []
    n, k = traj.n, traj.kappa
    table = np.asarray(ide_table, dtype=float)
    found = []
    small = np.abs(k.imag) < crossing_tol
    i = 0
    while i < len(k):
        if small[i]:
            j = i
            while j + 1 < len(k) and small[j + 1]:
                j += 1
            m = i + int(np.argmin(np.abs(k.imag[i:j + 1])))
            found.append((n[m], k[m]))
            i = j + 1
            continue
        if i + 1 < len(k) and not small[i + 1] and k[i].imag * k[i + 1].imag < 0:
            t = k[i].imag / (k[i].imag - k[i + 1].imag)
            found.append((n[i] + t * (n[i + 1] - n[i]), k[i] + t * (k[i + 1] - k[i])))
        i += 1
    events = []
    for n_at, k_at in found:
        if table.size:
            ide = float(table[np.argmin(np.abs(table - k_at.real))])
            dist = abs(k_at - ide)
        else:
            ide, dist = None, float("inf")
        events.append(
            Event(
                EventKind.REAL_AXIS_CROSSING,
                float(n_at),
                complex(k_at),
                {"ide": ide, "distance": float(dist), "violation": bool(dist > match_tol)},
            )
        )
    return events


def predict_recurrences(kappa_star: float, p: int, how_many: int, dim: int = 2, below_one: bool = False):
    """Indices ``n* = (kappa**/kappa*)^2`` at which trajectories return to ``kappa*``.

    ``kappa**`` runs over the successive larger zeros of ``J_p`` (``j_p`` for
    ``dim=3``), or over the smaller ones when ``below_one`` is set.  Returns a
    list of ``(n_star, kappa_source)`` pairs ordered by distance from ``n = 1``.
    """
    if how_many <= 0:
        return []
    radial = bessel_j if dim == 2 else spherical_j
    if abs(radial(p, kappa_star).value) > 1e-10:
        raise ContractError(f"{kappa_star} is not a zero of the order-{p} radial function")
    det = DiskDeterminant(p) if dim == 2 else BallDeterminant(p)
    table = det.ides(min(100, how_many + 30))
    idx = int(np.argmin(np.abs(np.asarray(table) - kappa_star)))
    if abs(table[idx] - kappa_star) > 1e-8:
        raise ContractError(f"{kappa_star} is not among the first {len(table)} zeros")
    sources = table[:idx][::-1][:how_many] if below_one else table[idx + 1: idx + 1 + how_many]
    return [((ks / kappa_star) ** 2, ks) for ks in sources]


@dataclass
class AngleEstimate:
    """Limits of ``arg(dkappa/dn)`` at a crossing from below (``n -> n*-``) and above (``n -> n*+``).

    ``position_below``/``position_above`` are the limits of ``arg(kappa_n - kappa*)``.
    ``incoming``/``outgoing`` follow the traversal direction of the trajectory.
    """

    n_star: float
    kappa_star: float
    below: float
    above: float
    position_below: float
    position_above: float
    incoming: float
    outgoing: float
    admissible: tuple
    deviation: float

    @property
    def ok(self) -> bool:
        return self.deviation <= ANGLE_TOL

    def to_event(self) -> Event:
        return Event(
            EventKind.ANGLE_ESTIMATE,
            self.n_star,
            complex(self.kappa_star),
            {
                "incoming": self.incoming,
                "outgoing": self.outgoing,
                "below": self.below,
                "above": self.above,
                "position_below": self.position_below,
                "position_above": self.position_above,
                "admissible": list(self.admissible),
                "deviation": self.deviation,
            },
        )


def _wrap(a):
    return float((a + pi) % (2 * pi) - pi)


def _angle_distance(a, b):
    return abs(_wrap(a - b))


def _side_angle(n, k, nstar, kstar, sign, radius, min_points):
    rho = np.abs(k - kstar)
    sel = (rho < radius) & (rho > 0) & (sign * (n - nstar) > 0)
    if sel.sum() < min_points:
        raise ResolutionError(
            f"only {int(sel.sum())} samples within {radius} of the crossing on one side; refine the steps"
        )
    t = np.abs(n[sel] - nstar) ** (1.0 / 3.0)
    theta = np.angle(k[sel] - kstar)
    order = np.argsort(t)
    t, theta = t[order], np.unwrap(theta[order])
    # arg(kappa - kappa*) is a power series in |n - n*|^(1/3) about its limit
    coef = np.polyfit(t, theta, min(2, len(t) - 1))
    return _wrap(coef[-1])


def estimate_approach_angle(
    traj: Trajectory, event: Event, radius: float = 0.1, min_points: int = 5
) -> AngleEstimate:
    """Approach and departure directions of ``traj`` at a real-axis crossing."""
    n, k = traj.n, traj.kappa
    nstar = event.n_at
    kstar = event.payload.get("ide") if event.payload.get("ide") is not None else event.kappa_at.real
    pos_below = _side_angle(n, k, nstar, kstar, -1.0, radius, min_points)
    pos_above = _side_angle(n, k, nstar, kstar, +1.0, radius, min_points)
    # from below the motion points towards kappa*, hence the half turn
    below = _wrap(pos_below + pi)
    above = pos_above
    admissible = (pi / 3, -pi / 3, pi) if nstar > 1 else (0.0, 2 * pi / 3, -2 * pi / 3)
    deviation = max(min(_angle_distance(a, s) for s in admissible) for a in (below, above))
    forward = n[-1] >= n[0]
    incoming, outgoing = (below, above) if forward else (above, below)
    return AngleEstimate(nstar, float(kstar), below, above, pos_below, pos_above,
                         incoming, outgoing, admissible, deviation)


def symmetry_map(traj: Trajectory) -> Trajectory:
    """Image of a trajectory under ``(n, kappa) -> (1/n, kappa sqrt(n))``."""
    n = traj.n
    if not (np.all(n > 1) or np.all(n < 1)):
        raise DomainError("symmetry map needs a trajectory on one side of n = 1")
    det = None
    if traj.solver == "analytic" and traj.mode is not None:
        try:
            det = determinant_for(traj.scatterer, traj.mode)
        except DomainError:
            det = None
    pts = []
    for p in traj.points:
        n2, k2 = 1.0 / p.n, p.kappa * sqrt(p.n)
        resid = float(abs(det.value(k2, n2))) if det is not None else p.residual
        vel = None
        if p.velocity is not None:
            # d(k sqrt n)/d(1/n) = -n^2 (sqrt(n) k' + k / (2 sqrt n))
            vel = -p.n**2 * (sqrt(p.n) * p.velocity + p.kappa / (2 * sqrt(p.n)))
        pts.append(TrajectoryPoint(n2, complex(k2), resid, vel))
    return Trajectory(traj.mode, traj.scatterer, pts, [], traj.solver)


@dataclass
class ConvergenceReport:
    """Evidence metrics for ``kappa_n -> kappa*`` as ``n`` grows."""

    kappa_star: float
    n_end: float
    sup_last_decade: float
    distance_at_end: float
    distance_at_8: float
    window_max_imag: list
    imag_nonincreasing: bool
    excursion_maxima: list

    @property
    def excursions_shrinking(self) -> bool:
        e = self.excursion_maxima
        return all(b <= a for a, b in zip(e, e[1:]))

    def to_event(self) -> Event:
        return Event(
            EventKind.CONVERGENCE_CHECK,
            self.n_end,
            complex(self.kappa_star),
            {
                "sup_last_decade": self.sup_last_decade,
                "distance_at_end": self.distance_at_end,
                "distance_at_8": self.distance_at_8,
                "window_max_imag": self.window_max_imag,
                "imag_nonincreasing": self.imag_nonincreasing,
                "excursion_maxima": self.excursion_maxima,
                "excursions_shrinking": self.excursions_shrinking,
            },
        )


def convergence_diagnostics(traj: Trajectory, kappa_star: float, n_min: float = 16.0) -> ConvergenceReport:
    """Distance envelope of ``traj`` around ``kappa_star``.

    ``sup_last_decade`` is ``sup |kappa_n - kappa*|`` over the final ten units of
    ``n``; ``window_max_imag`` lists ``max |Im kappa_n|`` over unit windows
    ``[8, 9), [9, 10), ...``; ``excursion_maxima`` are the largest distances
    between consecutive real-axis contacts.
    """
    n, k = traj.n, traj.kappa
    if n.size == 0 or n.max() < n_min:
        raise ContractError(f"trajectory must extend to n >= {n_min}")
    order = np.argsort(n)
    n, k = n[order], k[order]
    dist = np.abs(k - kappa_star)
    n_end = float(n[-1])
    last = n >= n_end - 10.0
    windows = []
    lo = 8.0
    while lo < n_end:
        sel = (n >= lo) & (n < lo + 1.0)
        if sel.any():
            windows.append(float(np.max(np.abs(k[sel].imag))))
        lo += 1.0
    contacts = np.flatnonzero(np.abs(k.imag) < CROSSING_TOL)
    bounds = [0] + [int(c) for c in contacts] + [len(n) - 1]
    excursions = []
    for a, b in zip(bounds, bounds[1:]):
        if b > a + 1:
            excursions.append(float(dist[a:b + 1].max()))
    return ConvergenceReport(
        float(kappa_star),
        n_end,
        float(dist[last].max()),
        float(dist[-1]),
        float(np.interp(8.0, n, dist)),
        windows,
        bool(all(b <= a + 1e-12 for a, b in zip(windows, windows[1:]))),
        excursions,
    )


def annotate(traj: Trajectory, ide_table: Sequence[float], dim: int = 2) -> Trajectory:
    """Attach crossing, recurrence and angle events to an analytic trajectory in place."""
    crossings = detect_real_crossings(traj, ide_table)
    traj.events.extend(crossings)
    for ev in crossings:
        if ev.payload["violation"] or traj.mode is None:
            continue
        kstar = ev.payload["ide"]
        try:
            preds = predict_recurrences(kstar, traj.mode, 6, dim=dim, below_one=ev.n_at < 1)
        except ContractError:
            preds = []
        if preds:
            pn = min((p[0] for p in preds), key=lambda x: abs(x - ev.n_at))
            traj.events.append(
                Event(EventKind.IDE_RECURRENCE, ev.n_at, ev.kappa_at,
                      {"ide": kstar, "predicted_n": pn, "deviation": abs(pn - ev.n_at)})
            )
        try:
            traj.events.append(estimate_approach_angle(traj, ev).to_event())
        except ResolutionError as exc:
            log.info("no angle estimate at n=%.5f: %s", ev.n_at, exc)
    return traj
