import numpy as np
import pytest

from itetraj.disk_ball import DiskDeterminant
from itetraj.errors import LayoutError, SpuriousMinimumError
from itetraj.geometry import Disk, equilateral_triangle, layout_mfs, unit_square
from itetraj.mfs import (assemble, continue_mfs, find_ide, find_ite, kernel, misfit,
                         smallest_singular_value)
from itetraj.trajectory import seed_roots

DISK = layout_mfs(Disk(), 10, 0.5, 40, 3.0)


@pytest.fixture(scope="module")
def disk_root_n4():
    return seed_roots(DiskDeterminant(0), 4.0)[0]


def test_disk_misfit_small_at_analytic_ite(disk_root_n4):
    assert misfit(disk_root_n4, 4.0, DISK).value < 1e-5
    assert misfit(1.0, 4.0, DISK).value > 1e-2


def test_dirichlet_misfit_at_disk_eigenvalue():
    assert misfit(2.404825557695773, None, DISK, "dirichlet").value < 1e-4
    assert misfit(3.0, None, DISK, "dirichlet").value > 1e-2


def test_smallest_singular_value_examples():
    assert smallest_singular_value(np.diag([3.0, 2.0, 1e-6])) == pytest.approx(1e-6, rel=1e-10)
    rng = np.random.default_rng(3)
    a = rng.standard_normal((50, 60)) + 1j * rng.standard_normal((50, 60))
    lam = np.linalg.eigvalsh(a @ a.conj().T)
    assert abs(smallest_singular_value(a) - np.sqrt(lam[0])) < 1e-9


def test_misfit_continuous_and_conjugate_symmetric(disk_root_n4):
    k = disk_root_n4 + 0.3
    a, b = misfit(k, 4.0, DISK).value, misfit(k + 1e-7, 4.0, DISK).value
    assert abs(a - b) < 1e-5
    sq = layout_mfs(unit_square(), 20, 0.25, 61, 0.75)
    for z in (4.5 + 1j, 3.1 + 0.4j):
        assert abs(misfit(z, 6.0, sq).value - misfit(z.conjugate(), 6.0, sq).value) < 1e-12


def test_misfit_scale_invariant(disk_root_n4):
    for k in (disk_root_n4, 2.2 + 0.7j):
        a = misfit(k, 4.0, DISK).value
        assert misfit(k, 4.0, DISK, scale=1e6).value == pytest.approx(a, rel=1e-8, abs=1e-14)
        assert misfit(k, 4.0, DISK, scale=-3j).value == pytest.approx(a, rel=1e-8, abs=1e-14)


def test_rotation_equivariance_on_disk():
    turned = layout_mfs(Disk(), 10, 0.5, 40, 3.0, angle_offset=0.3)
    for k in (2.0 + 0.5j, 4.1 + 1.2j):
        assert abs(misfit(k, 4.0, DISK).value - misfit(k, 4.0, turned).value) < 1e-9


def test_assemble_shapes():
    sys_ = assemble(2.0 + 0.5j, 4.0, DISK)
    assert sys_.matrix.shape == (2 * 40 + 2 * 10, 2 * 40)
    assert sys_.boundary_rows == 80
    assert np.allclose(np.linalg.norm(sys_.matrix, axis=0), 1.0)
    dsys = assemble(2.0, None, DISK, "dirichlet")
    assert dsys.matrix.shape == (50, 40)
    with pytest.raises(ValueError):
        assemble(2.0, None, DISK)
    with pytest.raises(ValueError):
        assemble(2.0, 4.0, DISK, "neumann")


def test_find_ite_disk(disk_root_n4):
    root = find_ite(4.0, DISK, disk_root_n4 + 0.02 - 0.02j)
    assert abs(root.location - disk_root_n4) < 1e-5


@pytest.mark.slow
@pytest.mark.parametrize("n", [2.0, 8.0])
def test_find_ite_disk_other_indices(n):
    exact = seed_roots(DiskDeterminant(0), n)[0]
    assert abs(find_ite(n, DISK, exact + 0.03j).location - exact) < 1e-4


def test_find_ide_examples():
    assert abs(find_ide(DISK, 2.3).location - 2.404825557695773) < 1e-3
    sq = layout_mfs(unit_square(), 20, 0.25, 61, 0.75)
    assert abs(find_ide(sq, 4.3).location - 4.4429) < 1e-2


@pytest.mark.slow
def test_find_ide_triangle():
    tri = layout_mfs(equilateral_triangle(), 20, 0.25, 51, 0.75)
    assert abs(find_ide(tri, 7.1).location - 7.255) < 2e-2


def test_spurious_minimum_is_reported():
    with pytest.raises(SpuriousMinimumError) as info:
        find_ite(4.0, DISK, 1.0 + 0.1j, accept=1e-30)
    assert info.value.value > 0


def test_coincident_source_rejected():
    with pytest.raises(LayoutError):
        kernel(2.0, np.array([1.0 + 0j]), np.array([1.0 + 0j]))


def test_short_disk_continuation_follows_determinant():
    det = DiskDeterminant(0)
    seed = seed_roots(det, 4.0)[0]
    traj = continue_mfs(DISK, 4.0, 4.5, seed)
    assert len(traj) == 3 and traj.solver == "mfs"
    for p in traj.points:
        exact = seed_roots(det, p.n)
        assert min(abs(p.kappa - e) for e in exact) < 1e-5
