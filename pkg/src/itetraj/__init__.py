"""Transmission eigenvalue trajectories of homogeneous scatterers as the refractive index varies."""

__version__ = "0.1.0"

from .disk_ball import (alpha_coefficient, det_ball, det_disk, det_dkappa, det_dn, energy_mismatch,
                        velocity)
from .geometry import ide_reference, layout_mfs
from .mfs import continue_mfs, find_ide, find_ite, misfit
from .rootfind import ContourBox, count_roots, locate_roots, newton_polish
from .specfun import bessel_j, bessel_real_roots, hankel1, spherical_j
from .trajectory import (continue_trajectory, convergence_diagnostics, detect_real_crossings,
                         estimate_approach_angle, predict_recurrences, symmetry_map)

__all__ = [
    "alpha_coefficient", "bessel_j", "bessel_real_roots", "continue_mfs", "continue_trajectory", "ContourBox",
    "convergence_diagnostics", "count_roots", "det_ball", "det_disk", "det_dkappa", "det_dn",
    "detect_real_crossings", "energy_mismatch", "estimate_approach_angle", "find_ide", "find_ite", "hankel1",
    "ide_reference", "layout_mfs", "locate_roots", "misfit", "newton_polish", "predict_recurrences",
    "spherical_j", "symmetry_map", "velocity",
]
