"""MFS trajectory of the unit square from 4.5 + i, printing the distance to the first Dirichlet eigenvalue.

Takes about ten minutes on one core.
"""

import sys

from itetraj.geometry import ide_reference, layout_mfs, unit_square
from itetraj.mfs import continue_mfs


def main(n_end=32.0):
    square = unit_square()
    layout = layout_mfs(square, 20, 0.25, 61, 0.75)
    ide = ide_reference(square, 1)[0]
    traj = continue_mfs(layout, 4.0, n_end, 4.5 + 1j)
    for p in traj.points:
        if abs(p.n * 2 - round(p.n * 2)) < 1e-9:
            print(f"n = {p.n:6.2f}  kappa = {p.kappa:.6f}  |kappa - {ide:.4f}| = {abs(p.kappa - ide):.4f}"
                  f"  misfit = {p.residual:.1e}")


if __name__ == "__main__":
    main(float(sys.argv[1]) if len(sys.argv) > 1 else 32.0)
