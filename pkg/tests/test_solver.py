import math

import numpy as np
import pytest

from heatwell.errors import ParameterError, StepFailure
from heatwell.solver import SolverConfig, apply_l, evolve, step
from heatwell.trace import Verdict
from heatwell.weighted_space import Field, Parameters, RadialGrid, dirichlet_form, inner_volume, l2k_norm_sq

PARAMS = Parameters(3, 3.0)
GRID = RadialGrid(16.0, 1024, 3)


class TestConfig:
    @pytest.mark.parametrize(
        "kw",
        [
            {"dt_init": 0.0},
            {"dt_min": 1e-2, "dt_init": 1e-3},
            {"s_max": 0.0},
            {"blowup_threshold": 1.0},
            {"growth_cap": 1.0},
            {"record_every": 0},
        ],
    )
    def test_invalid(self, kw):
        with pytest.raises(ParameterError):
            SolverConfig(**kw)

    def test_refined(self):
        c = SolverConfig().refined(4)
        assert c.dt_init == pytest.approx(2.5e-4) and c.dt_min == pytest.approx(2.5e-11)


def test_operator_on_zero():
    assert apply_l(Field.zeros(GRID)).is_zero()


def test_operator_eigenfunction_interior():
    g = RadialGrid(16.0, 2048, 3)
    phi = Field.gaussian(g, 0.25)
    lphi = apply_l(phi).values
    inner = g.r < 8.0
    rel = np.abs(lphi[inner] / phi.values[inner] - 1.5)
    assert rel.max() < 1e-4


def test_operator_quadratic_form_is_dirichlet_form():
    w = Field.gaussian(GRID, 0.6, 1.3)
    assert inner_volume(apply_l(w), w) == pytest.approx(dirichlet_form(w), rel=1e-12)


def test_discrete_kavian_bound():
    rng = np.random.default_rng(3)
    for _ in range(10):
        a = rng.uniform(0.2, 2.0, size=3)
        c = rng.normal(size=3)
        f = Field.from_function(GRID, lambda r: np.exp(-np.outer(a, r * r)).T @ c)
        assert inner_volume(apply_l(f), f) >= (1.5 - 1e-3) * inner_volume(f, f)


def test_step_zero_is_steady():
    assert step(Field.zeros(GRID), 0.1, PARAMS).is_zero()


def test_step_rejects_bad_dt():
    with pytest.raises(ParameterError):
        step(Field.zeros(GRID), 0.0, PARAMS)


def test_step_failure_on_overflow():
    w = Field.gaussian(GRID, 0.5, 1e200)
    with pytest.raises(StepFailure):
        step(w, 1.0, PARAMS)


@pytest.mark.parametrize("dt", [1e-3, 0.1, 10.0, 1e4])
def test_implicit_part_contracts(dt):
    w = Field.gaussian(GRID, 0.4, 2.0)
    w_new = step(w, dt, PARAMS, nonlinear=False, linear_source=False)
    assert inner_volume(w_new, w_new) <= inner_volume(w, w)


def test_linear_step_on_eigenfunction():
    dt = 0.01
    w = Field.gaussian(RadialGrid(16.0, 2048, 3), 0.25)
    w_new = step(w, dt, PARAMS, nonlinear=False)
    factor = (1 + dt / 2.0) / (1 + dt * 1.5)
    inner = w.grid.r < 8.0
    np.testing.assert_allclose(w_new.values[inner], factor * w.values[inner], rtol=1e-6)
    assert math.sqrt(l2k_norm_sq(w_new)) <= math.sqrt(l2k_norm_sq(w)) * (1 + dt / 2.0)


def test_zero_datum_is_global_and_constant():
    trace, out = evolve(Field.zeros(GRID), PARAMS, SolverConfig(s_max=1.0), d_est=1.0)
    assert out.verdict is Verdict.GLOBAL
    assert all(r.energy == 0 and r.sup_norm == 0 for r in trace.rows)


def test_run_lands_exactly_on_horizon():
    trace, out = evolve(Field.gaussian(GRID, 0.5, 0.2), PARAMS, SolverConfig(s_max=0.3337), d_est=15.0)
    assert trace.rows[-1].s == 0.3337 == out.s_final
    assert all(b.s > a.s for a, b in zip(trace.rows, trace.rows[1:]))


def test_time_column_is_original_time():
    trace, _ = evolve(Field.gaussian(GRID, 0.5, 0.2), PARAMS, SolverConfig(s_max=0.5), d_est=15.0)
    for r in trace.rows:
        assert r.t == pytest.approx(math.expm1(r.s), rel=1e-14, abs=0)


def test_checkpoints_respect_record_every():
    trace, _ = evolve(Field.gaussian(GRID, 0.5, 0.2), PARAMS, SolverConfig(s_max=0.05, record_every=10), d_est=15.0)
    assert [round(s, 9) for s, _ in trace.checkpoints] == [0.0, 0.01, 0.02, 0.03, 0.04, 0.05]


def test_dt_halving_and_recovery():
    cfg = SolverConfig(dt_init=0.05, s_max=0.2, growth_cap=1.01)
    _, out = evolve(Field.gaussian(GRID, 0.5, 2.0), PARAMS, cfg, d_est=15.0)
    assert out.rejected_steps > 0


def test_blowup_by_threshold():
    cfg = SolverConfig(blowup_threshold=50.0)
    _, out = evolve(Field.gaussian(GRID, 0.5, 5.0), PARAMS, cfg, d_est=15.0)
    assert out.verdict is Verdict.BLOWUP
    assert "threshold" in out.reason
    lo, hi = out.T_s_interval
    assert lo < out.T_s < hi and out.T == pytest.approx(math.expm1(out.T_s))


def test_blowup_by_dt_min():
    _, out = evolve(Field.gaussian(GRID, 0.5, 5.0), PARAMS, SolverConfig(), d_est=15.0)
    assert out.verdict is Verdict.BLOWUP and "dt_min" in out.reason
    assert out.T_s < 20.0


def test_inconclusive_when_horizon_reached_above_threshold():
    # sup-norm 0.5 stays below the threshold while ||w||_{H^1(K)} ~ 2.5 does not
    cfg = SolverConfig(blowup_threshold=2.0, s_max=0.01)
    _, out = evolve(Field.gaussian(GRID, 0.5, 0.5), PARAMS, cfg, d_est=15.0)
    assert out.verdict is Verdict.INCONCLUSIVE
    assert out.T_s is None and out.T is None


def test_grid_dimension_mismatch():
    with pytest.raises(ParameterError, match="dimension"):
        evolve(Field.zeros(RadialGrid(16.0, 64, 4)), PARAMS, SolverConfig())


def test_classification_recorded(w_run, z_run):
    assert w_run[1].classification.value == "InWellHeuristic"
    assert z_run[1].classification.value == "ExteriorCertified"
