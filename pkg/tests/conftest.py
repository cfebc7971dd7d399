import pytest

from itetraj.experiments import load_config, run


def _by_name(records):
    return {r.filename: r for r in records}


@pytest.fixture(scope="session")
def fig1_records():
    return _by_name(run(load_config(preset="fig1")))


@pytest.fixture(scope="session")
def fig2_records():
    return _by_name(run(load_config(preset="fig2")))


@pytest.fixture(scope="session")
def fig3_records():
    return _by_name(run(load_config(preset="fig3")))


@pytest.fixture(scope="session")
def disk_p0(fig1_records):
    """Upper-half-plane disk trajectory for p = 0 over n in [1.05, 16]."""
    return fig1_records["fig1_disk_p0_above_upper"].trajectory
