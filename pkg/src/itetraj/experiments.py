"""
Configuration-driven trajectory runs, record files and property verification.

A configuration is a JSON document::

    {
      "name": "fig1",
      "scatterer": {"type": "disk"},
      "solver": "analytic",
      "branches": [{"mode": 0, "n_range": [1.05, 16.0]}],
      "layout": {"m_interior": 10, "r_interior": 0.4, "m": 40, "r_source": 4.0},
      "steps": {"dn_init": 0.01, "dn": 0.25},
      "tolerances": {"angle": 0.05}
    }

See the README for every key.  Each branch is written as one file per sign
of ``Im kappa`` (``upper`` is the computed branch, ``lower`` its conjugate)
plus a JSON sidecar with the events.
"""

import json
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from math import pi
from typing import Optional

import numpy as np
from scipy import optimize

from . import __version__
from .disk_ball import (BallDeterminant, DiskDeterminant, _energy_terms, energy_closed_form,
                        energy_mismatch, multiplicity_residuals)
from .errors import ContractError, ItetrajError, UnsupportedShapeError
from .geometry import (Ball, Disk, Ellipse, ParametricCurve, Polygon, deformed_ellipse,
                       equilateral_triangle, ide_reference, layout_mfs, unit_square)
from .mfs import ACCEPT_MISFIT, continue_mfs, find_ide
from .rootfind import ContourBox, count_roots
from .trajectory import (CROSSING_TOL, MATCH_TOL, StepControl, Trajectory,
                         TrajectoryPoint, annotate, continue_trajectory, convergence_diagnostics,
                         determinant_for, detect_real_crossings, estimate_approach_angle,
                         predict_recurrences, seed_roots, symmetry_map)

log = logging.getLogger(__name__)

DEFAULT_TOLERANCES = {
    "residual": 1e-9,
    "energy": 1e-8,
    "crossing": CROSSING_TOL,
    "match": MATCH_TOL,
    "angle": 0.05,
    "recurrence": 1e-6,
    "multiplicity": 1e-9,
    "symmetry": 1e-6,
    "simultaneity": 1e-12,
    "misfit": ACCEPT_MISFIT,
}

SCAN_WINDOW = {"re": (0.5, 12.0), "im": (0.05, 4.0)}

_BALL_LIKE = ("ball",)


def _preset_mfs(name, scatterer, layout, branches, note):
    return {"name": name, "scatterer": scatterer, "solver": "mfs", "layout": layout,
            "branches": branches, "description": note}


PRESETS = {
    "fig1": {
        "name": "fig1",
        "description": "unit disk, p = 0, 1, 2, n in (1, 16]: three conjugate pairs",
        "scatterer": {"type": "disk"},
        "solver": "analytic",
        "branches": [{"mode": p, "n_range": [1.05, 16.0]} for p in (0, 1, 2)],
    },
    "fig2": {
        "name": "fig2",
        "description": "unit disk, p = 0 on both sides of n = 1; the n < 1 branch is sampled at 1/n of the n > 1 branch",
        "scatterer": {"type": "disk"},
        "solver": "analytic",
        "branches": [
            {"mode": 0, "n_range": [1.05, 16.0]},
            {"mode": 0, "n_range": [1 / 1.05, 0.0625], "scan_near_n": 1.05, "mirror": 0},
        ],
    },
    "fig3": {
        "name": "fig3",
        "description": "unit ball, p = 0, 1, 2, n in (1, 16]",
        "scatterer": {"type": "ball"},
        "solver": "analytic",
        "branches": [{"mode": p, "n_range": [1.05, 16.0]} for p in (0, 1, 2)],
    },
    "fig4": _preset_mfs(
        "fig4", {"type": "ellipse", "a": 1.0, "b": 0.5},
        {"m_interior": 10, "r_interior": 0.4, "m": 60, "r_source": 1.5},
        [{"seed": [4.0, 1.0], "n_range": [4.0, 32.0]}, {"seed": [5.0, 1.0], "n_range": [4.0, 32.0]}],
        "ellipse (1, 0.5), seeds 4 + i and 5 + i, n in [4, 32]",
    ),
    "fig5": _preset_mfs(
        "fig5", {"type": "square", "side": 1.0},
        {"m_interior": 20, "r_interior": 0.25, "m": 61, "r_source": 0.75},
        [{"seed": [4.5, 1.0], "n_range": [4.0, 32.0]}, {"seed": [7.0, 1.0], "n_range": [4.0, 20.0]}],
        "unit square, seeds 4.5 + i (n in [4, 32]) and 7 + i (n in [4, 20])",
    ),
    "fig6": _preset_mfs(
        "fig6", {"type": "triangle", "side": 1.0},
        {"m_interior": 20, "r_interior": 0.25, "m": 51, "r_source": 0.75},
        [{"seed": [7.3, 1.5], "n_range": [4.0, 32.0]},
         {"seed": [11.0, 2.0], "n_range": [4.0, 16.0], "layout": {"m": 61}}],
        "equilateral triangle, seeds 7.3 + 1.5i (n in [4, 32], m = 51) and 11 + 2i (n in [4, 16], m = 61)",
    ),
    "fig7": _preset_mfs(
        "fig7", {"type": "deformed_ellipse"},
        {"m_interior": 20, "r_interior": 0.2, "m": 51, "r_source": 1.5},
        [{"seed": [3.0, 0.8], "n_range": [4.0, 32.0]},
         {"seed": [4.0, 0.8], "n_range": [4.0, 20.0], "conjugate": False}],
        "deformed ellipse, seeds 3 + 0.8i (n in [4, 32]) and 4 + 0.8i (n in [4, 20])",
    ),
}

# Dirichlet eigenvalue guesses for shapes without a table, refined by mfs.find_ide.
IDE_GUESSES = {"deformed_ellipse": (3.0, 4.3)}


def list_presets():
    return [(name, cfg["description"]) for name, cfg in PRESETS.items()]


def load_config(path=None, preset=None) -> dict:
    if (path is None) == (preset is None):
        raise ValueError("give exactly one of a config path or a preset name")
    if preset is not None:
        if preset not in PRESETS:
            raise ValueError(f"unknown preset {preset!r}; see list-presets")
        return json.loads(json.dumps(PRESETS[preset]))
    with open(path) as fh:
        cfg = json.load(fh)
    validate_config(cfg)
    return cfg


def validate_config(cfg: dict):
    for key in ("scatterer", "branches"):
        if key not in cfg:
            raise ValueError(f"config lacks {key!r}")
    solver = cfg.get("solver", "analytic")
    if solver not in ("analytic", "mfs"):
        raise ValueError(f"solver must be 'analytic' or 'mfs', got {solver!r}")
    for b in cfg["branches"]:
        lo, hi = b["n_range"]
        if min(lo, hi) <= 0 or (lo - 1.0) * (hi - 1.0) <= 0 or min(abs(lo - 1), abs(hi - 1)) < 1e-6:
            raise ValueError(f"n_range {b['n_range']} must stay on one side of n = 1 by at least 1e-6")
        if "seed" in b and complex(*b["seed"]) == 0:
            raise ValueError("seeds must be nonzero")
        if solver == "mfs" and "seed" not in b:
            raise ValueError("MFS branches need an explicit seed")
        if solver == "analytic" and "mode" not in b:
            raise ValueError("analytic branches need a mode")


def build_scatterer(spec: dict):
    kind = spec["type"]
    if kind == "disk":
        return Disk(spec.get("radius", 1.0))
    if kind == "ball":
        return Ball(spec.get("radius", 1.0))
    if kind == "ellipse":
        return Ellipse(spec["a"], spec["b"])
    if kind == "square":
        return unit_square(spec.get("side", 1.0))
    if kind == "triangle":
        return equilateral_triangle(spec.get("side", 1.0))
    if kind == "deformed_ellipse":
        return deformed_ellipse()
    if kind == "polygon":
        return Polygon(tuple(complex(x, y) for x, y in spec["vertices"]))
    if kind == "parametric":
        return ParametricCurve(tuple(spec["xc"]), tuple(spec.get("xs", (0.0,))),
                               tuple(spec.get("yc", (0.0,))), tuple(spec["ys"]))
    raise ValueError(f"unknown scatterer type {kind!r}")


def scatterer_tag(spec: dict) -> str:
    return spec["type"]


@dataclass
class Record:
    """One trajectory file: header metadata, the trajectory and a status line."""

    header: dict
    trajectory: Trajectory
    status: str = "ok"
    filename: str = ""

    @property
    def ok(self) -> bool:
        return self.status == "ok"


def _branch_name(cfg, index, branch, sign):
    tag = scatterer_tag(cfg["scatterer"])
    if cfg.get("solver", "analytic") == "analytic":
        side = "above" if branch["n_range"][0] > 1 else "below"
        return f"{cfg.get('name', 'run')}_{tag}_p{branch['mode']}_{side}_{sign}"
    return f"{cfg.get('name', 'run')}_{tag}_seed{index}_{sign}"


def _step_control(cfg):
    steps = cfg.get("steps", {})
    tol = {**DEFAULT_TOLERANCES, **cfg.get("tolerances", {})}
    keys = {k: steps[k] for k in ("dn_init", "dn_min", "dn_max", "trust_radius", "max_newton") if k in steps}
    return StepControl(residual_tol=tol["residual"], **keys)


def _scan_seed(det, n, index=0):
    roots = seed_roots(det, n, SCAN_WINDOW["re"], SCAN_WINDOW["im"])
    if index >= len(roots):
        raise ContractError(f"window scan at n={n} found only {len(roots)} roots")
    return roots, roots[index]


def _analytic_branch(cfg, branch, mirror_of: Optional[Trajectory]):
    det = determinant_for(scatterer_tag(cfg["scatterer"]), int(branch["mode"]))
    n0, n1 = branch["n_range"]
    if "seed" in branch:
        seed = complex(*branch["seed"])
    else:
        roots, seed = _scan_seed(det, n0, branch.get("scan_index", 0))
        if "scan_near_n" in branch:
            _, ref = _scan_seed(det, branch["scan_near_n"], branch.get("scan_index", 0))
            seed = min(roots, key=lambda z: abs(z - ref))
    samples = None
    if mirror_of is not None:
        samples = [1.0 / x for x in mirror_of.n]
    traj = continue_trajectory(det, n0, n1, seed, _step_control(cfg), n_samples=samples,
                               scatterer=scatterer_tag(cfg["scatterer"]))
    annotate(traj, det.ides(40), dim=det.dim)
    return traj, seed


def branch_layout(cfg, branch):
    lay = {**cfg.get("layout", {}), **branch.get("layout", {})}
    return layout_mfs(build_scatterer(cfg["scatterer"]), int(lay["m_interior"]), float(lay["r_interior"]),
                      int(lay["m"]), float(lay["r_source"]), float(lay.get("angle_offset", 0.0)))


def _mfs_branch(cfg, branch):
    layout = branch_layout(cfg, branch)
    n0, n1 = branch["n_range"]
    dn = cfg.get("steps", {}).get("dn", 0.25)
    traj = continue_mfs(layout, n0, n1, complex(*branch["seed"]), dn=dn)
    traj.scatterer = scatterer_tag(cfg["scatterer"])
    return traj, complex(*branch["seed"])


def _header(cfg, index, branch, sign, seed):
    h = {
        "tool": f"itetraj {__version__}",
        "config": cfg.get("name", "run"),
        "scatterer": cfg["scatterer"],
        "solver": cfg.get("solver", "analytic"),
        "branch": index,
        "sign": sign,
        "n_range": branch["n_range"],
        "seed": None if seed is None else [seed.real, seed.imag],
    }
    if "mode" in branch:
        h["mode"] = branch["mode"]
    if h["solver"] == "mfs":
        h["layout"] = {**cfg.get("layout", {}), **branch.get("layout", {})}
    return h


def run_branch(cfg, index, mirror_of=None):
    """Compute one branch; returns the ``upper`` record and, unless disabled, its conjugate."""
    branch = cfg["branches"][index]
    solver = cfg.get("solver", "analytic")
    seed, status = None, "ok"
    try:
        if solver == "analytic":
            traj, seed = _analytic_branch(cfg, branch, mirror_of)
        else:
            traj, seed = _mfs_branch(cfg, branch)
    except ItetrajError as exc:
        log.warning("branch %d of %s failed: %s", index, cfg.get("name"), exc)
        traj = getattr(exc, "partial", None) or Trajectory(branch.get("mode"), scatterer_tag(cfg["scatterer"]),
                                                           solver=solver)
        status = f"failed: {type(exc).__name__}: {exc}"
    records = [Record(_header(cfg, index, branch, "upper", seed), traj, status,
                      _branch_name(cfg, index, branch, "upper"))]
    if branch.get("conjugate", True):
        conj_seed = None if seed is None else seed.conjugate()
        records.append(Record(_header(cfg, index, branch, "lower", conj_seed), traj.conjugate(), status,
                              _branch_name(cfg, index, branch, "lower")))
    return records


def run(cfg: dict, out_dir: Optional[str] = None, threads: int = 1) -> list:
    """Run every branch of ``cfg``; writes records to ``out_dir`` when given."""
    validate_config(cfg)
    branches = cfg["branches"]
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
    if not branches:
        return []
    first = [i for i, b in enumerate(branches) if "mirror" not in b]
    second = [i for i, b in enumerate(branches) if "mirror" in b]
    results = {}
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        for i, recs in zip(first, pool.map(lambda i: run_branch(cfg, i), first)):
            results[i] = recs

        def mirrored(i):
            src = results[branches[i]["mirror"]][0]
            return run_branch(cfg, i, src.trajectory if len(src.trajectory) else None)

        for i, recs in zip(second, pool.map(mirrored, second)):
            results[i] = recs
    records = [r for i in range(len(branches)) for r in results[i]]
    if out_dir is not None:
        for rec in records:
            write_record(rec, out_dir)
    return records


def _jsonable(x):
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    return x


def write_record(rec: Record, out_dir: str) -> str:
    """Write ``<name>.dat`` (rows sorted by n, 17 significant digits) and ``<name>.events.json``."""
    path = os.path.join(out_dir, rec.filename + ".dat")
    pts = sorted(rec.trajectory.points, key=lambda p: p.n)
    lines = [f"# {k}: {json.dumps(_jsonable(v), sort_keys=True)}" for k, v in rec.header.items()]
    lines.append(f"# status: {json.dumps(rec.status)}")
    residual = "misfit" if rec.header.get("solver") == "mfs" else "residual"
    lines.append(f"# columns: n re_kappa im_kappa {residual}")
    lines += [f"{p.n:.17g} {p.kappa.real:.17g} {p.kappa.imag:.17g} {p.residual:.17g}" for p in pts]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    events = [{"kind": e.kind.value, "n_at": e.n_at, "kappa_at": _jsonable(complex(e.kappa_at)),
               "payload": _jsonable(e.payload)} for e in rec.trajectory.events]
    with open(os.path.join(out_dir, rec.filename + ".events.json"), "w") as fh:
        json.dump(events, fh, indent=1, sort_keys=True)
    return path


def read_record(path: str) -> Record:
    header, rows = {}, []
    with open(path) as fh:
        for line in fh:
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition(": ")
                if key != "columns":
                    header[key] = json.loads(value)
            elif line.strip():
                rows.append([float(x) for x in line.split()])
    status = header.pop("status", "ok")
    solver = header.get("solver", "analytic")
    pts = [TrajectoryPoint(r[0], complex(r[1], r[2]), r[3]) for r in rows]
    traj = Trajectory(header.get("mode"), header["scatterer"]["type"], pts, [], solver)
    return Record(header, traj, status, os.path.splitext(os.path.basename(path))[0])


def load_records(out_dir: str, cfg: dict) -> list:
    name = cfg.get("name", "run")
    files = sorted(f for f in os.listdir(out_dir) if f.startswith(name + "_") and f.endswith(".dat"))
    return [read_record(os.path.join(out_dir, f)) for f in files]


# ---------------------------------------------------------------- verification


@dataclass
class PropertyResult:
    name: str
    record: str
    passed: bool
    measured: object
    tolerance: object
    detail: str = ""

    def as_dict(self):
        return _jsonable({"property": self.name, "record": self.record, "passed": self.passed,
                          "measured": self.measured, "tolerance": self.tolerance, "detail": self.detail})


@dataclass
class Report:
    config: str
    results: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def add(self, *args, **kwargs):
        self.results.append(PropertyResult(*args, **kwargs))

    def as_dict(self):
        return {"config": self.config, "passed": self.passed,
                "properties": [r.as_dict() for r in self.results]}


def _directional(traj):
    """Trajectory with points in traversal order (files store them sorted by n)."""
    n = traj.n
    if len(n) and n.max() < 1:
        pts = sorted(traj.points, key=lambda p: -p.n)
        return replace(traj, points=pts, events=[])
    return replace(traj, points=sorted(traj.points, key=lambda p: p.n), events=[])


def _relative_residuals(det, traj):
    return np.array([abs(det.value(p.kappa, p.n)) / max(det.scale(p.kappa, p.n), 1e-300) for p in traj.points])


def _energy_points(traj, count=20):
    idx = [i for i, p in enumerate(traj.points) if abs(p.kappa.imag) > 1e-2]
    if len(idx) <= count:
        return idx
    pick = np.linspace(0, len(idx) - 1, count).round().astype(int)
    return [idx[i] for i in pick]


def real_ites(p: int, n: float, count: int = 3, dim: int = 2, upper: float = 20.0) -> list:
    """First ``count`` positive real roots of the determinant at index ``n`` (sign-change scan)."""
    det = DiskDeterminant(p) if dim == 2 else BallDeterminant(p)
    grid = np.linspace(0.05, upper, 4000)
    vals = np.array([det.value(x, n).real for x in grid])
    out = []
    for a, b, fa, fb in zip(grid, grid[1:], vals, vals[1:]):
        if fa * fb < 0:
            out.append(optimize.brentq(lambda x: det.value(x, n).real, a, b, xtol=1e-15, rtol=1e-15))
            if len(out) == count:
                break
    return out


def _verify_analytic(rec, cfg, tol, report, companions):
    name = rec.filename
    p = int(rec.header["mode"])
    tag = scatterer_tag(cfg["scatterer"])
    det = determinant_for(tag, p)
    traj = _directional(rec.trajectory)
    if not rec.ok:
        report.add("completed", name, False, rec.status, "ok")
    if not len(traj):
        return
    res = _relative_residuals(det, traj)
    report.add("residual", name, bool(res.max() <= tol["residual"]), float(res.max()), tol["residual"],
               "max |F(kappa, n)| / scale over all rows")

    if det.dim == 2:
        worst = 0.0
        for i in _energy_points(traj):
            pt = traj.points[i]
            try:
                v2, w2 = _energy_terms(p, pt.kappa, pt.n, 200)
                worst = max(worst, abs(v2 - w2) / (v2 + w2))
            except ItetrajError:
                worst = np.inf
        report.add("energy", name, bool(worst <= tol["energy"]), worst, tol["energy"],
                   "max |int |v|^2 - n|w|^2| / int |v|^2 + n|w|^2 over up to 20 non-real rows")

    events = detect_real_crossings(traj, det.ides(40), tol["crossing"], tol["match"])
    dist = max((e.payload["distance"] for e in events), default=0.0)
    report.add("crossings_at_ides", name, not any(e.payload["violation"] for e in events), dist, tol["match"],
               f"{len(events)} real-axis contacts")
    for ev in events:
        if ev.payload["violation"]:
            continue
        kstar = ev.payload["ide"]
        where = f"n*={ev.n_at:.6f}, kappa*={kstar:.6f}"
        try:
            est = estimate_approach_angle(traj, ev)
            admissible = (pi / 3, -pi / 3) if ev.n_at > 1 else (2 * pi / 3, -2 * pi / 3)
            dev = max(min(abs((a - s + pi) % (2 * pi) - pi) for s in admissible) for a in (est.incoming, est.outgoing))
            report.add("approach_angle", name, bool(dev <= tol["angle"]), dev, tol["angle"],
                       f"{where}: incoming {est.incoming:.5f}, outgoing {est.outgoing:.5f}")
        except ItetrajError as exc:
            report.add("approach_angle", name, False, None, tol["angle"], f"{where}: {exc}")
        preds = predict_recurrences(kstar, p, 8, dim=det.dim, below_one=ev.n_at < 1)
        gap = min((abs(n_star - ev.n_at) for n_star, _ in preds), default=np.inf)
        report.add("recurrence", name, bool(gap <= tol["recurrence"]), gap, tol["recurrence"], where)
        box = ContourBox(complex(kstar), 0.2, 0.2)
        try:
            cnt = count_roots(lambda z: det.value(z, ev.n_at), box, df=lambda z: det.dkappa(z, ev.n_at))
        except ItetrajError as exc:
            cnt = f"error: {exc}"
        report.add("triple_root", name, cnt == 3, cnt, 3, where)
        if det.dim == 2:
            resid = multiplicity_residuals(p, kstar, ev.n_at)
            worst = max(abs(x) for pair in resid.values() for x in pair)
            report.add("multiplicity_identities", name, bool(worst <= tol["multiplicity"]), worst, tol["multiplicity"], where)

    n = traj.n
    if n.max() >= 16:
        kstar = det.ides(1)[0]
        rep = convergence_diagnostics(traj, kstar)
        report.add("convergence", name, bool(rep.distance_at_end < rep.distance_at_8),
                   {"distance_at_8": rep.distance_at_8, "distance_at_end": rep.distance_at_end,
                    "sup_last_decade": rep.sup_last_decade, "imag_nonincreasing": rep.imag_nonincreasing},
                   "distance_at_end < distance_at_8", f"towards {kstar:.6f}")

    src = companions.get(name)
    if src is not None and len(src.trajectory):
        mapped = symmetry_map(_directional(src.trajectory))
        here = {round(pt.n, 12): pt.kappa for pt in traj.points}
        diffs = [abs(here[round(q.n, 12)] - q.kappa) for q in mapped.points if round(q.n, 12) in here]
        worst = max(diffs) if diffs else np.inf
        report.add("symmetry", name, bool(worst <= tol["symmetry"]), worst, tol["symmetry"],
                   f"{len(diffs)} common indices with the image of {src.filename}")


def _verify_static(cfg, tol, report):
    """Checks that need no trajectory: real eigenvalue energies and ball simultaneity."""
    tag = scatterer_tag(cfg["scatterer"])
    modes = sorted({int(b["mode"]) for b in cfg["branches"] if "mode" in b})
    if tag == "disk":
        for p in modes:
            for k in real_ites(p, 4.0, 3):
                e = energy_mismatch(p, k, 4.0)
                ref = energy_closed_form(p, k, 4.0)
                rel = abs(e - ref) / abs(ref)
                report.add("energy_real", f"p={p}", bool(rel <= tol["energy"]), rel, tol["energy"],
                           f"real ITE {k:.10f} at n=4")
    if tag == "ball":
        det = BallDeterminant(0)
        worst = max(abs(det.value(m * pi, q * q)) for m in (1, 2, 3) for q in (2, 3))
        report.add("ball_simultaneity", "p=0", bool(worst <= tol["simultaneity"]), worst, tol["simultaneity"],
                   "max |f_0(m pi, q^2)| over m <= 3, q in {2, 3}")


def reference_ides(cfg, count=4) -> list:
    s = build_scatterer(cfg["scatterer"])
    try:
        return ide_reference(s, count)
    except UnsupportedShapeError:
        guesses = IDE_GUESSES.get(getattr(s, "label", None) or s.kind, ())
        layout = branch_layout(cfg, cfg["branches"][0])
        return [find_ide(layout, g).location.real for g in guesses]


def _verify_mfs(rec, cfg, tol, report, ides):
    name = rec.filename
    traj = _directional(rec.trajectory)
    if not rec.ok:
        report.add("completed", name, False, rec.status, "ok")
    if not len(traj):
        return
    worst = float(traj.residual.max())
    report.add("misfit", name, bool(worst < tol["misfit"]), worst, tol["misfit"], "max misfit over all rows")
    events = detect_real_crossings(traj, ides, tol["crossing"], tol["match"])
    report.add("crossings_at_ides", name, not any(e.payload["violation"] for e in events),
               max((e.payload["distance"] for e in events), default=0.0), tol["match"],
               f"{len(events)} real-axis contacts")
    if traj.n.max() >= 16 and ides:
        kstar = min(ides, key=lambda x: abs(x - traj.kappa[-1].real))
        rep = convergence_diagnostics(traj, kstar)
        report.add("convergence", name, bool(rep.distance_at_end < rep.distance_at_8),
                   {"distance_at_8": rep.distance_at_8, "distance_at_end": rep.distance_at_end,
                    "sup_last_decade": rep.sup_last_decade},
                   "distance_at_end < distance_at_8", f"towards {kstar:.6f}")


def verify(cfg: dict, out_dir: Optional[str] = None, threads: int = 1) -> Report:
    """Property report for ``cfg``, reading its records from ``out_dir`` or computing them."""
    tol = {**DEFAULT_TOLERANCES, **cfg.get("tolerances", {})}
    records = None
    if out_dir is not None and os.path.isdir(out_dir):
        records = load_records(out_dir, cfg) or None
    if records is None:
        records = run(cfg, out_dir, threads)
    report = Report(cfg.get("name", "run"))
    if cfg.get("solver", "analytic") == "analytic":
        _verify_static(cfg, tol, report)
        by_branch = {(r.header["branch"], r.header["sign"]): r for r in records}
        companions = {}
        for r in records:
            b = cfg["branches"][r.header["branch"]]
            if "mirror" in b and (b["mirror"], r.header["sign"]) in by_branch:
                companions[r.filename] = by_branch[(b["mirror"], r.header["sign"])]
        for r in records:
            _verify_analytic(r, cfg, tol, report, companions)
    else:
        ides = reference_ides(cfg)
        for r in records:
            _verify_mfs(r, cfg, tol, report, ides)
    return report
