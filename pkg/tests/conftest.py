import pytest

from uom_sim.hamiltonians import SystemParams

# reference operating point used throughout the test suite (values in Hz)
STD_HZ = dict(
    omega_q=3.0e9,
    omega_m=250.0e6,
    omega_c0=500.0e6,
    g_x=60.0e6,
    g_z0=40.0e6,
    Gamma=0.05e6,
    gamma=0.1e6,
    kappa=0.2e6,
    n_th=0.0,
)


@pytest.fixture
def std_params() -> SystemParams:
    return SystemParams.from_hz(**STD_HZ)


@pytest.fixture
def lossless_params() -> SystemParams:
    clean = dict(STD_HZ, Gamma=0.0, gamma=0.0, kappa=0.0)
    return SystemParams.from_hz(**clean)
