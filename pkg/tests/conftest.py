import pytest

from heatwell import (
    Field,
    GaussianFamilySpec,
    Parameters,
    RadialGrid,
    SolverConfig,
    evolve,
    well_depth_upper,
)

# a = 1/2 family, n = 3, p = 3
A_FAMILY = 0.5
B_SMALL = 0.5
B_LARGE = 5.0

# criterion number -> (passed, summary line); filled by test_acceptance
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture(scope="session")
def params():
    return Parameters(3, 3.0)


@pytest.fixture(scope="session")
def grid(params):
    return RadialGrid(16.0, 1024, params.n)


@pytest.fixture(scope="session")
def fine_grid(params):
    return RadialGrid(16.0, 4096, params.n)


@pytest.fixture(scope="session")
def d_est(params, grid):
    return well_depth_upper(GaussianFamilySpec(), params, grid).d_upper


@pytest.fixture(scope="session")
def w_run(params, grid, d_est):
    """Small-b datum integrated to s = 20."""
    return evolve(Field.gaussian(grid, A_FAMILY, B_SMALL), params, SolverConfig(s_max=20.0), d_est=d_est)


@pytest.fixture(scope="session")
def z_runs(params, grid, d_est):
    """Large-b datum at dt, dt/2 and dt/4."""
    cfg = SolverConfig(s_max=20.0)
    out = []
    for _ in range(3):
        out.append(evolve(Field.gaussian(grid, A_FAMILY, B_LARGE), params, cfg, d_est=d_est))
        cfg = cfg.refined()
    return out


@pytest.fixture(scope="session")
def z_run(z_runs):
    return z_runs[0]


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, line = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {line}")
