"""Follow the p = 0, 1, 2 disk trajectories for n in (1, 16] and list where they touch the real axis."""

from itetraj.experiments import load_config, run
from itetraj.trajectory import EventKind


def main():
    for rec in run(load_config(preset="fig1")):
        if not rec.filename.endswith("upper"):
            continue
        traj = rec.trajectory
        print(f"{rec.filename}: {len(traj)} points, kappa(16) = {traj.kappa[-1]:.6f}")
        angles = {round(e.n_at, 9): e for e in traj.events if e.kind == EventKind.ANGLE_ESTIMATE}
        for ev in traj.events:
            if ev.kind != EventKind.REAL_AXIS_CROSSING:
                continue
            a = angles.get(round(ev.n_at, 9))
            extra = f"  velocity angles {a.payload['below']:+.4f} / {a.payload['above']:+.4f}" if a else ""
            print(f"  n = {ev.n_at:.6f}  kappa = {ev.kappa_at.real:.6f}{extra}")


if __name__ == "__main__":
    main()
