"""Acceptance criteria 1-11, one pass/fail line each on stdout."""

import time
from math import pi

import numpy as np
import pytest

from itetraj.disk_ball import (DiskDeterminant, det_ball, energy_closed_form,
                               energy_mismatch, energy_normalization, multiplicity_residuals)
from itetraj.experiments import load_config, real_ites, run
from itetraj.geometry import Disk, Ellipse, equilateral_triangle, layout_mfs, unit_square
from itetraj.mfs import continue_mfs, find_ide, find_ite
from itetraj.rootfind import ContourBox, count_roots, locate_roots
from itetraj.specfun import bessel_real_roots
from itetraj.trajectory import EventKind, predict_recurrences, seed_roots, symmetry_map

from test_rootfind import _poly, _random_instance, split_count


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\nACCEPTANCE {number:>2} {'PASS' if ok else 'FAIL'}  {detail}")
        return ok
    return emit


def _events(traj, kind):
    return [e for e in traj.events if e.kind == kind]


def _upper(records):
    return {k: r for k, r in records.items() if k.endswith("_upper")}


def test_criterion_01_disk_crossings(report):
    start = time.perf_counter()
    records = {r.filename: r for r in run(load_config(preset="fig1"))}
    elapsed = time.perf_counter() - start
    cross = _events(records["fig1_disk_p0_above_upper"].trajectory, EventKind.REAL_AXIS_CROSSING)
    ok = (len(cross) >= 2
          and all(abs(e.kappa_at - 2.4048) < 1e-3 for e in cross[:2])
          and abs(cross[0].n_at - 5.2689) < 1e-3
          and abs(cross[1].n_at - 12.9491) < 1e-2
          and elapsed < 60)
    found = ", ".join(f"({e.n_at:.5f}, {e.kappa_at.real:.5f})" for e in cross)
    assert report(1, ok, f"p=0 crossings {found}; run {elapsed:.1f} s")


def test_criterion_02_inverse_index_branch(report, fig2_records):
    below = fig2_records["fig2_disk_p0_below_upper"].trajectory
    above = fig2_records["fig2_disk_p0_above_upper"].trajectory
    cross = _events(below, EventKind.REAL_AXIS_CROSSING)
    want = [(0.1898, 5.5201), (0.0772, 8.6537)]
    hits = all(any(abs(e.n_at - n) < 1e-3 and abs(e.kappa_at - k) < 1e-3 for e in cross) for n, k in want)
    mapped = {round(p.n, 12): p.kappa for p in symmetry_map(above).points}
    diffs = [abs(mapped[round(p.n, 12)] - p.kappa) for p in below.points if round(p.n, 12) in mapped]
    ok = hits and len(diffs) >= 0.8 * len(above) and max(diffs) < 1e-6
    found = ", ".join(f"({e.n_at:.5f}, {e.kappa_at.real:.5f})" for e in cross)
    assert report(2, ok, f"n<1 crossings {found}; symmetry map max dev {max(diffs):.1e} "
                         f"on {len(diffs)} points")


def test_criterion_03_angle_law(report, fig1_records, fig2_records):
    worst, count, missing = 0.0, 0, 0
    for rec in list(fig1_records.values()) + list(fig2_records.values()):
        traj = rec.trajectory
        cross = [e for e in _events(traj, EventKind.REAL_AXIS_CROSSING) if not e.payload["violation"]]
        angles = _events(traj, EventKind.ANGLE_ESTIMATE)
        missing += len(cross) - len(angles)
        for ev in angles:
            target = pi / 3 if ev.n_at > 1 else 2 * pi / 3
            for a in (ev.payload["below"], ev.payload["above"]):
                worst = max(worst, abs(abs(a) - target))
            count += 1
    ok = count > 0 and missing == 0 and worst < 0.05
    assert report(3, ok, f"{count} crossings, worst angle deviation {worst:.2e} rad, {missing} unestimated")


def test_criterion_04_recurrence_ratio(report, fig1_records):
    worst, seen = 0.0, 0
    for p in (0, 1, 2):
        kstar = bessel_real_roots(p, 1)[0]
        predicted = [n for n, _ in predict_recurrences(kstar, p, 2)]
        traj = fig1_records[f"fig1_disk_p{p}_above_upper"].trajectory
        observed = [e.n_at for e in _events(traj, EventKind.REAL_AXIS_CROSSING) if abs(e.kappa_at - kstar) < 5e-3]
        for pn in predicted:
            dev = min((abs(pn - o) for o in observed), default=np.inf)
            worst = max(worst, dev)
            seen += 1
    assert report(4, worst < 1e-6, f"{seen} recurrences, worst |n_pred - n_obs| = {worst:.2e}")


def test_criterion_05_triple_root_count(report, fig1_records, fig2_records):
    counts = []
    for rec in list(_upper(fig1_records).values()) + list(_upper(fig2_records).values()):
        det = DiskDeterminant(rec.trajectory.mode)
        for ev in _events(rec.trajectory, EventKind.REAL_AXIS_CROSSING):
            box = ContourBox(complex(ev.payload["ide"]), 0.2, 0.2)
            counts.append(count_roots(lambda z: det.value(z, ev.n_at), box,
                                      df=lambda z: det.dkappa(z, ev.n_at)))
    ok = len(counts) > 0 and all(c == 3 for c in counts)
    assert report(5, ok, f"counts {counts}")


def test_criterion_06_energy_identity(report, disk_p0):
    det = DiskDeterminant(0)
    pts = [p for p in disk_p0.points if abs(p.kappa.imag) > 1e-2]
    pick = [pts[i] for i in np.linspace(0, len(pts) - 1, 20).round().astype(int)]
    complex_worst = max(abs(energy_mismatch(0, p.kappa, p.n)) / energy_normalization(0, p.kappa, p.n)
                        for p in pick)
    real_worst = 0.0
    for k in real_ites(0, 4.0, 3):
        assert abs(det.value(k, 4.0)) < 1e-10 * det.scale(k, 4.0)
        closed = energy_closed_form(0, k, 4.0)
        real_worst = max(real_worst, abs(energy_mismatch(0, k, 4.0) - closed) / abs(closed))
    ok = len(pick) == 20 and complex_worst < 1e-8 and real_worst < 1e-8
    assert report(6, ok, f"non-real worst {complex_worst:.1e}, real worst {real_worst:.1e}")


def test_criterion_07_multiplicity_identities(report):
    worst = 0.0
    for p in (0, 1, 2):
        kstar = bessel_real_roots(p, 1)[0]
        nstar = predict_recurrences(kstar, p, 1)[0][0]
        for a, b in multiplicity_residuals(p, kstar, nstar).values():
            worst = max(worst, abs(a), abs(b))
    assert report(7, worst < 1e-9, f"worst boundary residual {worst:.1e}")


def test_criterion_08_ball_simultaneity(report, fig3_records):
    worst = max(abs(det_ball(0, m * pi, q * q)) for m in (1, 2, 3) for q in (2, 3))
    traj = fig3_records["fig3_ball_p0_above_upper"].trajectory
    cross = _events(traj, EventKind.REAL_AXIS_CROSSING)
    hit = any(abs(e.n_at - 4.0) < 1e-3 and abs(e.kappa_at.real - pi) < 1e-3 for e in cross)
    ok = worst < 1e-12 and hit
    first = f"({cross[0].n_at:.6f}, {cross[0].kappa_at.real:.6f})" if cross else "none"
    assert report(8, ok, f"max |f_0(m pi, q^2)| = {worst:.1e}; first ball crossing {first}")


@pytest.mark.slow
def test_criterion_09_mfs_matches_analytic(report):
    layout = layout_mfs(Disk(), 10, 0.5, 40, 3.0)
    worst = 0.0
    for n in (2.0, 4.0, 8.0):
        exact = seed_roots(DiskDeterminant(0), n)[0]
        got = find_ite(n, layout, exact + 0.03 + 0.03j).location
        worst = max(worst, abs(got - exact))
    ide = find_ide(layout, 2.3).location.real
    ok = worst < 1e-4 and abs(ide - 2.4048) < 1e-3
    assert report(9, ok, f"ITE worst deviation {worst:.1e}; IDE {ide:.6f}")


MFS_CASES = {
    "square": (unit_square(), (20, 0.25, 61, 0.75), 4.5 + 1j, 4.4429),
    "triangle": (equilateral_triangle(), (20, 0.25, 51, 0.75), 7.3 + 1.5j, 7.255),
    "ellipse": (Ellipse(1.0, 0.5), (10, 0.4, 60, 1.5), 4.0 + 1j, 3.777),
}


def _spiral_check(name):
    shape, lay, seed, ide = MFS_CASES[name]
    traj = continue_mfs(layout_mfs(shape, *lay), 4.0, 32.0, seed)
    n = traj.n
    d = np.abs(traj.kappa - ide)
    tail = d[n >= 16.0 - 1e-9]
    monotone = bool(np.all(np.diff(tail) <= 0))
    ok = abs(n[-1] - 32.0) < 1e-9 and d[-1] < 0.15 and monotone
    i = int(np.argmin(tail))
    detail = (f"{name}: d(4)={d[0]:.3f} d(16)={tail[0]:.3f} d(32)={d[-1]:.3f} "
              f"min {tail[i]:.3f} at n={n[n >= 16.0 - 1e-9][i]:.2f}, monotone={monotone}")
    return ok, detail


@pytest.mark.slow
def test_criterion_10_general_scatterers(report):
    results = [_spiral_check(name) for name in MFS_CASES]
    ok = all(r[0] for r in results)
    assert report(10, ok, "; ".join(r[1] for r in results))


def test_criterion_11_root_finder_oracle(report):
    rng = np.random.default_rng(11)
    worst, conserved, total = 0.0, 0, 0
    for _ in range(100):
        box, roots = _random_instance(rng)
        f, df = _poly(roots)
        found = locate_roots(f, box, df=df)
        err = max(min(abs(c.location - r) for c in found) for r in roots)
        if sum(c.multiplicity for c in found) != len(roots):
            err = np.inf
        worst = max(worst, err)
        conserved += split_count(f, df, box) == count_roots(f, box, df) == len(roots)
        total += 1
    ok = worst < 1e-8 and conserved == total
    assert report(11, ok, f"{total} polynomials, worst root error {worst:.1e}, conservation {conserved}/{total}")
