import numpy as np
import pytest

from heatwell import diagnostics
from heatwell.functionals import Classification
from heatwell.trace import RunOutcome, SimulationTrace, TraceRow, Verdict
from heatwell.weighted_space import Parameters

PARAMS = Parameters(3, 3.0)


def make_trace(s, energy, nehari, l2, sup=None, dissip=None, outcome=None):
    n = len(s)
    sup = sup if sup is not None else [1.0] * n
    dissip = dissip if dissip is not None else [0.0] * n
    rows = [
        TraceRow(s=s[k], t=np.expm1(s[k]), dt=0.0, energy=energy[k], nehari=nehari[k], l2k_sq=l2[k],
                 sup_norm=sup[k], h1k_sq=l2[k], dissipation_accum=dissip[k])
        for k in range(n)
    ]
    return diagnostics.m_functionals(SimulationTrace(PARAMS, rows, outcome=outcome))


def test_m_functionals_trapezoid():
    s = [0.0, 0.5, 1.5]
    tr = make_trace(s, [0, 0, 0], [1.0, 2.0, 3.0], [2.0, 4.0, 6.0])
    m = tr.column("m")
    # M' = l2/2 = 1, 2, 3
    assert m == pytest.approx([0.0, 0.75, 0.75 + 2.5])
    assert tr.column("m_double_prime") == [-1.0, -2.0, -3.0]


def test_energy_ledger_and_monotonicity():
    tr = make_trace([0, 1, 2], [5.0, 3.0, 3.5], [1, 1, 1], [1, 1, 1], dissip=[0.0, 2.0, 1.0])
    np.testing.assert_allclose(diagnostics.energy_ledger(tr), [0.0, 0.0, 0.5])
    assert diagnostics.energy_monotone_violation(tr) == pytest.approx(0.5)
    assert diagnostics.energy_monotone_violation(tr, np.array([True, True, False])) == 0.0


def test_resolved_mask():
    tr = make_trace([0, 1, 2], [0, 0, 0], [1, 1, 1], [1, 1, 1], sup=[1.0, 10.0, 100.0])
    # p = 3: length scale 1/sup against h = 0.01, limit 0.5
    np.testing.assert_array_equal(diagnostics.resolved_mask(tr, 0.01), [True, True, False])


def test_fd_residual_exact_for_linear_m_prime():
    # M' linear in s with slope -I (constant): residual zero
    s = np.linspace(0, 1, 11)
    tr = make_trace(list(s), [0] * 11, [-2.0] * 11, list(2 * (1 + 2 * s)))
    res, scale = diagnostics.m_prime_fd_residuals(tr)
    assert res.max() == pytest.approx(0.0, abs=1e-12)
    assert scale.min() > 0


def test_fd_skips_fast_growth():
    tr = make_trace([0, 0.1, 0.2], [0] * 3, [1, 1, 1], [1, 2, 3], sup=[1.0, 5.0, 5.1])
    res, _ = diagnostics.m_prime_fd_residuals(tr)
    assert res.size == 1


def test_epsilon_one_and_s_prime():
    tr = make_trace([0, 1], [-3.0, -4.0], [-2.0, -5.0], [1.0, 2.0])
    assert diagnostics.epsilon_one(tr, 10.0) == pytest.approx(2.0)
    # E(u0) < 0, so s' = 0
    assert diagnostics.first_s_prime(tr, PARAMS) == 0.0
    tr = make_trace([0, 1, 2], [1.0, 0.9, 0.8], [1, 1, 1], [1.0, 3.0, 9.0])
    # (n(p-1)-2)/4 = 1 so s' is the first row with ||w||^2 > 4 E(u0) = 4
    assert diagnostics.first_s_prime(tr, PARAMS) == 2.0
    assert diagnostics.cauchy_schwarz_margins(tr, PARAMS).size == 1


def test_no_s_prime_gives_empty_margins():
    tr = make_trace([0, 1], [1.0, 1.0], [1, 1], [1.0, 1.0])
    assert diagnostics.first_s_prime(tr, PARAMS) is None
    assert diagnostics.cauchy_schwarz_margins(tr, PARAMS).size == 0


def test_invariance_monitor():
    out = RunOutcome(Classification.IN_WELL_HEURISTIC, Verdict.GLOBAL)
    tr = make_trace([0, 1, 2, 3], [0] * 4, [1.0, 0.5, -0.1, 0.2], [1] * 4, outcome=out)
    rep = diagnostics.invariance_monitor(tr)
    assert rep.initial_sign == 1 and rep.first_flip_s == 2 and not rep.ok and rep.expected_invariant
    masked = diagnostics.invariance_monitor(tr, np.array([True, True, False, True]))
    assert masked.ok


def test_zero_state_is_not_a_flip():
    tr = make_trace([0, 1], [0, 0], [1.0, 0.0], [1, 0], sup=[1.0, 0.0])
    assert diagnostics.invariance_monitor(tr).ok


def test_verdict_midpoint():
    raw = RunOutcome(Classification.EXTERIOR_CERTIFIED, Verdict.BLOWUP, T_s_interval=(0.2, 0.4))
    tr = make_trace([0, 0.2], [0, 0], [-1, -1], [1, 1], outcome=raw)
    out = diagnostics.verdict(tr, PARAMS)
    assert out.T_s == pytest.approx(0.3)
    assert out.T == pytest.approx(np.expm1(0.3))


def test_verdict_requires_outcome():
    tr = make_trace([0], [0], [0], [0])
    with pytest.raises(ValueError):
        diagnostics.verdict(tr, PARAMS)


class TestRuns:
    """Properties of the shared W and Z trajectories."""

    def test_w_energy_nonincreasing(self, w_run):
        tr = w_run[0]
        assert diagnostics.energy_monotone_violation(tr) <= diagnostics.energy_ledger(tr).max()

    def test_w_m_prime_bounded(self, w_run):
        mp = np.array(w_run[0].column("m_prime"))
        assert np.all(np.isfinite(mp)) and mp.max() <= mp[0] * (1 + 1e-12)

    def test_refined_z_runs_invariant_while_resolved(self, z_runs, grid):
        for tr, _ in z_runs:
            mask = diagnostics.resolved_mask(tr, grid.h)
            assert mask.sum() > 5
            assert diagnostics.invariance_monitor(tr, mask).ok
            assert diagnostics.energy_monotone_violation(tr, mask) == 0.0

    def test_z_m_double_prime_dominates_eps_one(self, z_run, d_est):
        tr = z_run[0]
        eps1 = diagnostics.epsilon_one(tr, d_est)
        assert eps1 > 0
        assert min(tr.column("m_double_prime")) >= eps1


def test_verdict_converts_clock():
    raw = RunOutcome(Classification.EXTERIOR_CERTIFIED, Verdict.BLOWUP, T_s_interval=(2.3, 2.3))
    tr = make_trace([0, 2.3], [0, 0], [-1, -1], [1, 1], outcome=raw)
    assert diagnostics.verdict(tr, PARAMS).T == pytest.approx(8.974, abs=5e-4)


def test_global_verdict_has_no_times():
    raw = RunOutcome(Classification.IN_WELL_HEURISTIC, Verdict.GLOBAL)
    tr = make_trace([0, 1], [1, 1], [1, 1], [2.0, 3.0], outcome=raw)
    out = diagnostics.verdict(tr, PARAMS)
    assert out.T_s is None and out.T is None and out.max_h1k_sq == 3.0
