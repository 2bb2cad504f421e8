import numpy as np
import pytest

import kerrwalk.sweep as sweep_mod
from kerrwalk import (
    InitialState,
    Regime,
    RegimeThresholds,
    SweepError,
    SweepSpec,
    classify_regime,
    run_sweep,
)


class TestClassifyRegime:
    @pytest.mark.parametrize(
        "ipr_norm,sp_bar,var,expected",
        [
            (0.02, 0.9, 0.01, Regime.SELF_TRAPPED),
            (0.9, 0.001, 0.01, Regime.SPREADING),
            (0.05, 0.01, 0.01, Regime.MOBILE_SOLITON),
            (0.05, 0.01, 0.2, Regime.CHAOTIC_LIKE),
            (0.9, 0.5, 0.0, Regime.SELF_TRAPPED),  # sp rule wins over ipr rule
            (0.5, 0.0, 0.0, Regime.SPREADING),     # thresholds are inclusive
        ],
    )
    def test_rule_table(self, ipr_norm, sp_bar, var, expected):
        assert classify_regime(ipr_norm, sp_bar, var) is expected

    def test_custom_thresholds(self):
        strict = RegimeThresholds(self_trapped_sp=0.95)
        assert classify_regime(0.02, 0.9, 0.0, strict) is Regime.MOBILE_SOLITON
        assert classify_regime(0.02, 0.96, 0.0, strict) is Regime.SELF_TRAPPED


class TestSweepSpec:
    def test_window_default(self):
        spec = SweepSpec((0.0, np.pi, 3), (0.0, 2.0, 3), steps=2000)
        assert spec.window() == (1600, 2000)

    def test_grid_values(self):
        spec = SweepSpec((0.0, np.pi, 5), (0.0, 2.0, 3), steps=100)
        np.testing.assert_allclose(spec.theta_values(), np.linspace(0, np.pi, 5))
        np.testing.assert_allclose(spec.chi_values(), np.linspace(0, 2, 3))

    @pytest.mark.parametrize(
        "kwargs,field",
        [
            (dict(theta_range=(0.0, np.pi, 1), chi_range=(0.0, 1.0, 2), steps=10), "count"),
            (dict(theta_range=(1.0, 0.5, 3), chi_range=(0.0, 1.0, 2), steps=10), "min < max"),
            (dict(theta_range=(0.0, 7.0, 3), chi_range=(0.0, 1.0, 2), steps=10), "theta_range"),
            (dict(theta_range=(0.0, 1.0, 3), chi_range=(-0.5, 1.0, 2), steps=10), "chi_range"),
            (dict(theta_range=(0.0, 1.0, 3), chi_range=(0.0, 1.0, 2), steps=0), "steps"),
            (dict(theta_range=(0.0, 1.0, 3), chi_range=(0.0, 1.0, 2), steps=10,
                  window_start_frac=1.0), "window_start_frac"),
        ],
    )
    def test_validation(self, kwargs, field):
        with pytest.raises(ValueError, match=field):
            SweepSpec(**kwargs)


SMALL_SPEC = SweepSpec(
    theta_range=(0.35, 2.75, 3),
    chi_range=(0.0, 1.2, 2),
    steps=300,
    initial=InitialState.RIGHT_ONLY,
)


class TestRunSweep:
    def test_row_major_ordering(self):
        cells = run_sweep(SMALL_SPEC)
        thetas = SMALL_SPEC.theta_values()
        chis = SMALL_SPEC.chi_values()
        assert len(cells) == 6
        for i in range(3):
            for j in range(2):
                cell = cells[i * 2 + j]
                assert cell.theta == thetas[i] or (i == 2 and cell.theta == pytest.approx(thetas[i]))
                assert cell.chi == chis[j]

    def test_parallelism_is_value_invariant(self):
        serial = run_sweep(SMALL_SPEC, parallelism=1)
        parallel = run_sweep(SMALL_SPEC, parallelism=2)
        assert serial == parallel

    def test_deterministic_reruns(self):
        assert run_sweep(SMALL_SPEC) == run_sweep(SMALL_SPEC)

    def test_ipr_norm_max_is_exactly_one(self):
        cells = run_sweep(SMALL_SPEC)
        top = [c for c in cells if c.ipr_norm == 1.0]
        assert len(top) == 1
        assert max(c.ipr_norm for c in cells) == 1.0
        assert all(0.0 <= c.ipr_norm <= 1.0 for c in cells)

    def test_mirror_symmetry_right_only_exact(self):
        spec = SweepSpec(
            theta_range=(0.0, np.pi, 5),
            chi_range=(0.0, 1.5, 3),
            steps=400,
            initial=InitialState.RIGHT_ONLY,
        )
        cells = run_sweep(spec)
        n_th, n_ch = 5, 3
        for i in range(n_th):
            for j in range(n_ch):
                mirror = cells[(n_th - 1 - i) * n_ch + j]
                assert cells[i * n_ch + j].sp_bar == mirror.sp_bar
                assert cells[i * n_ch + j].ipr_bar == mirror.ipr_bar

    def test_mirror_asymmetry_symmetric_circular(self):
        spec = SweepSpec(
            theta_range=(0.0, np.pi, 5),
            chi_range=(0.0, 1.5, 3),
            steps=400,
            initial=InitialState.SYMMETRIC_CIRCULAR,
        )
        cells = run_sweep(spec)
        n_th, n_ch = 5, 3
        defects = [
            abs(cells[i * n_ch + j].sp_bar - cells[(n_th - 1 - i) * n_ch + j].sp_bar)
            for i in range(n_th)
            for j in range(n_ch)
        ]
        assert max(defects) > 1e-6

    def test_trapped_anchor_cell_has_largest_sp(self):
        # 2x2 grid around the known self-trapping corner
        spec = SweepSpec(
            theta_range=(np.pi / 4, np.pi / 3, 2),
            chi_range=(0.0, 0.6, 2),
            steps=2000,
            initial=InitialState.SYMMETRIC_CIRCULAR,
        )
        cells = run_sweep(spec)
        best = max(cells, key=lambda c: c.sp_bar)
        assert best.theta == pytest.approx(np.pi / 3)
        assert best.chi == pytest.approx(0.6)
        assert best.sp_bar > 0.5

    def test_linear_column_delocalizes(self):
        spec = SweepSpec(
            theta_range=(np.pi / 4, np.pi / 3, 2),
            chi_range=(0.0, 1e-9, 2),
            steps=600,
            initial=InitialState.SYMMETRIC_CIRCULAR,
        )
        for cell in run_sweep(spec):
            assert cell.sp_bar < 0.05

    def test_cell_failure_reports_coordinates_and_partial(self, monkeypatch):
        real = sweep_mod._cell_averages
        first_theta = float(SMALL_SPEC.theta_values()[0])

        def flaky(task):
            if task.theta == first_theta and task.chi > 0.0:
                raise RuntimeError("boom")
            return real(task)

        monkeypatch.setattr(sweep_mod, "_cell_averages", flaky)
        with pytest.raises(SweepError) as err:
            run_sweep(SMALL_SPEC)
        assert err.value.theta == first_theta
        assert err.value.chi == pytest.approx(1.2)
        assert len(err.value.completed) == 1  # only cell (0, 0) finished
        assert "boom" in str(err.value)

    def test_parallelism_validation(self):
        with pytest.raises(ValueError, match="parallelism"):
            run_sweep(SMALL_SPEC, parallelism=0)
