import numpy as np
import pytest

import trendcycle as tc
from trendcycle.errors import ConfigError, InvalidArgumentError
from trendcycle.filters import MmsreSpec, poly_columns
from trendcycle.outliers import (
    OutlierKind,
    OutlierSpec,
    check_unique,
    load_outlier_specs,
    regressor_column,
    regressor_columns,
)
from trendcycle.robust import robust_apply, robust_asym_filter, robust_symmetric_filter
from trendcycle.series import Month, TimeSeries

T0 = Month(2022, 1)
JS = np.arange(-6, 7)


def augmented_wls_oracle(h, degree, kernel, columns, window_values):
    """Fitted value at the window centre from an independent lstsq solve."""
    js = np.arange(-h, h + 1, dtype=float)
    design = poly_columns(js, degree)
    if columns.size:
        design = np.column_stack([design, columns])
    w = np.sqrt(kernel)
    beta, *_ = np.linalg.lstsq(w[:, None] * design, w * window_values, rcond=None)
    return float(beta[0])


class TestRegressorColumns:
    def test_ao_outside_window_inactive(self):
        spec = OutlierSpec(OutlierKind.AO, T0)
        assert regressor_column(spec, T0 + 7, JS, 6) is None
        assert regressor_column(spec, T0 - 7, JS, 6) is None

    def test_ao_inside_window(self):
        spec = OutlierSpec(OutlierKind.AO, T0)
        col = regressor_column(spec, T0 + 2, JS, 6)
        expected = (JS == -2).astype(float)
        np.testing.assert_array_equal(col, expected)

    def test_ls_step_at_center(self):
        # the step sits at j = 0; the dummy marks the pre-break side so that
        # the estimate at the break tracks the post-break level
        spec = OutlierSpec(OutlierKind.LS, T0)
        col = regressor_column(spec, T0, JS, 6)
        np.testing.assert_array_equal(col, (JS < 0).astype(float))
        col_before = regressor_column(spec, T0 - 1, JS, 6)
        np.testing.assert_array_equal(col_before, (JS >= 1).astype(float))

    def test_ls_after_break_uses_pre_period_dummy(self):
        spec = OutlierSpec(OutlierKind.LS, T0)
        col = regressor_column(spec, T0 + 3, JS, 6)
        np.testing.assert_array_equal(col, (JS < -3).astype(float))

    def test_ao_trend_at_t0_plus_h_matches_ao(self):
        spec = OutlierSpec(OutlierKind.AO_TREND, T0)
        ao = OutlierSpec(OutlierKind.AO, T0)
        col = regressor_column(spec, T0 + 6, JS, 6)
        np.testing.assert_array_equal(col, regressor_column(ao, T0 + 6, JS, 6))

    def test_ao_trend_complement_inside(self):
        spec = OutlierSpec(OutlierKind.AO_TREND, T0)
        col = regressor_column(spec, T0 + 2, JS, 6)
        np.testing.assert_array_equal(col, (JS != -2).astype(float))

    def test_ao_trend_before_shock_is_dummy(self):
        spec = OutlierSpec(OutlierKind.AO_TREND, T0)
        col = regressor_column(spec, T0 - 2, JS, 6)
        np.testing.assert_array_equal(col, (JS == 2).astype(float))

    def test_collinear_column_dropped(self):
        # an LS far in the past spans the whole window: constant column
        spec = OutlierSpec(OutlierKind.LS, T0)
        design = poly_columns(JS, 3)
        cols, active = regressor_columns([spec], T0 + 20, JS, 6, design)
        assert cols.shape[1] == 0 and active == ()

    def test_duplicates_rejected(self):
        spec = OutlierSpec(OutlierKind.AO, T0)
        with pytest.raises(ConfigError):
            check_unique([spec, spec])

    def test_json_round_trip(self, tmp_path):
        path = tmp_path / "specs.json"
        path.write_text(
            '[{"kind": "ao", "date": "2022-01"}, {"kind": "ls", "date": "2020-03"}]',
            encoding="utf-8",
        )
        specs = load_outlier_specs(path)
        assert specs == (
            OutlierSpec(OutlierKind.AO, Month(2022, 1)),
            OutlierSpec(OutlierKind.LS, Month(2020, 3)),
        )

    def test_bad_json_kind(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('[{"kind": "boom", "date": "2022-01"}]', encoding="utf-8")
        with pytest.raises(ConfigError):
            load_outlier_specs(path)

    def test_flag_grammar(self):
        spec = OutlierSpec.parse("ls:2022-01")
        assert spec == OutlierSpec(OutlierKind.LS, Month(2022, 1))
        with pytest.raises(ConfigError):
            OutlierSpec.parse("nope:2022-01")


class TestRobustSymmetricFilter:
    def test_no_specs_is_henderson(self, h13):
        ma, active = robust_symmetric_filter(6, [], T0)
        assert active == ()
        np.testing.assert_allclose(ma.weights, h13.weights, atol=1e-12)

    def test_ao_at_center_shock_invariant(self, rng):
        spec = OutlierSpec(OutlierKind.AO, T0)
        ma, active = robust_symmetric_filter(6, [spec], T0)
        assert active == (spec,)
        assert abs(ma.weight_sum() - 1.0) < 1e-10
        assert abs(ma.weight(0)) < 1e-10  # shocked observation carries no weight
        trend = 50 + 0.3 * np.arange(-6, 7)
        for c in (0.0, 10.0, -250.0):
            window = trend + c * (JS == 0)
            est = float(ma.weights @ window)
            assert est == pytest.approx(50.0, abs=1e-8)

    def test_matches_augmented_wls_oracle(self, rng):
        spec = OutlierSpec(OutlierKind.AO, T0)
        kernel = tc.henderson_kernel(6)
        ma, _ = robust_symmetric_filter(6, [spec], T0 + 2)
        window = rng.normal(100, 5, 13)
        cols = regressor_column(spec, T0 + 2, JS, 6)[:, None]
        oracle = augmented_wls_oracle(6, 3, kernel, cols, window)
        assert float(ma.weights @ window) == pytest.approx(oracle, abs=1e-8)

    def test_ls_step_reproduced(self):
        spec = OutlierSpec(OutlierKind.LS, T0)
        step = 100.0 + 10.0 * (JS >= 0)
        for t_offset in range(-6, 7):
            t = T0 + t_offset
            ma, active = robust_symmetric_filter(6, [spec], t)
            window = 100.0 + 10.0 * (np.arange(t_offset - 6, t_offset + 7) >= 0)
            expected = 110.0 if t_offset >= 0 else 100.0
            assert float(ma.weights @ window) == pytest.approx(expected, abs=1e-9)

    def test_polynomial_reproduction_kept(self):
        spec = OutlierSpec(OutlierKind.AO, T0)
        ma, _ = robust_symmetric_filter(6, [spec], T0 + 1)
        for k in range(4):
            target = 1.0 if k == 0 else 0.0
            assert float(ma.weights @ JS.astype(float) ** k) == pytest.approx(
                target, abs=1e-9
            )


class TestRobustAsymFilter:
    def test_no_specs_is_musgrave(self, h13, musgrave13):
        ratio = tc.musgrave_slope_ratio(3.5)
        for q in range(6):
            spec = MmsreSpec(0, ratio, q, model_degree=1)
            ma = robust_asym_filter(h13, spec, [], T0)
            np.testing.assert_allclose(
                ma.weights, musgrave13.asymmetric[q].weights, atol=1e-12
            )

    def test_ao_at_last_point_invariant(self):
        out = OutlierSpec(OutlierKind.AO, T0)
        sym_r, _ = robust_symmetric_filter(6, [out], T0)
        spec = MmsreSpec(0, tc.musgrave_slope_ratio(3.5), q=0, model_degree=1)
        ma = robust_asym_filter(sym_r, spec, [out], T0)
        assert ma.lower == 6 and ma.upper == 0
        assert abs(ma.weight(0)) < 1e-10
        trend = 50 + 0.2 * np.arange(-6, 1)
        est0 = float(ma.weights @ trend)
        est10 = float(ma.weights @ (trend + 10.0 * (np.arange(-6, 1) == 0)))
        assert est10 == pytest.approx(est0, abs=1e-8)

    def test_constraints_hold(self):
        out = OutlierSpec(OutlierKind.LS, T0)
        t = T0 + 1
        sym_r, active = robust_symmetric_filter(6, [out], t)
        spec = MmsreSpec(0, tc.musgrave_slope_ratio(3.5), q=2, model_degree=1)
        ma = robust_asym_filter(sym_r, spec, active, t)
        ones = np.ones(13)
        col = regressor_column(out, t, JS, 6)
        observed = JS <= 2
        assert float(ma.weights.sum()) == pytest.approx(float(ones @ sym_r.weights), abs=1e-10)
        assert float(col[observed] @ ma.weights) == pytest.approx(
            float(col @ sym_r.weights), abs=1e-10
        )

    def test_infeasible_constraints_raise(self):
        # seven active constraints cannot fit in a 7-weight window: force a
        # rank problem with six consecutive AOs plus the constant
        t = T0
        outs = [OutlierSpec(OutlierKind.AO, T0 - k) for k in range(7)]
        sym_r, active = robust_symmetric_filter(6, outs, t)
        spec = MmsreSpec(0, 0.3224, q=0, model_degree=1)
        with pytest.raises(tc.InvalidSpecError):
            robust_asym_filter(sym_r, spec, active, t)


def constant_series(n=61, level=100.0, start=Month(2018, 1)):
    return TimeSeries(start, np.full(n, level))


class TestRobustApply:
    def test_no_specs_matches_linear_pipeline(self, rng, musgrave13):
        y = 100 + rng.normal(0, 2, 60)
        s = TimeSeries(Month(2018, 1), y)
        est_lin = tc.apply_filter_set(s, musgrave13)
        est_rob, plan = robust_apply(s, [], h=6, r=3.5)
        np.testing.assert_allclose(est_rob.values, est_lin.values, atol=1e-12)
        assert not any(pf.fallback for pf in plan.periods)

    def test_ao_scenario_flat(self):
        # degree-0 trend with a 10% additive outlier: robust estimates stay flat
        s = constant_series()
        idx = s.index_of(T0)
        values = s.values.copy()
        values[idx] *= 1.1
        shocked = TimeSeries(s.start, values)
        est, plan = robust_apply(shocked, [OutlierSpec(OutlierKind.AO, T0)])
        np.testing.assert_allclose(est.values, 100.0, atol=1e-8)

    def test_ls_scenario_step_reproduced(self):
        s = constant_series()
        idx = s.index_of(T0)
        values = s.values.copy()
        values[idx:] *= 1.1
        shocked = TimeSeries(s.start, values)
        est, plan = robust_apply(shocked, [OutlierSpec(OutlierKind.LS, T0)])
        np.testing.assert_allclose(est.values, values, atol=1e-8)

    def test_shock_invariance_property(self, rng):
        # estimates do not move when the modelled shock size changes
        base = 100 + 0.5 * np.arange(61)
        idx = 30
        t0 = Month(2018, 1) + idx
        for c in (0.0, 7.0, -12.0):
            values = base.copy()
            values[idx] += c
            est, _ = robust_apply(
                TimeSeries(Month(2018, 1), values), [OutlierSpec(OutlierKind.AO, t0)]
            )
            if c == 0.0:
                ref = est.values
            else:
                np.testing.assert_allclose(est.values, ref, atol=1e-8)

    def test_fallback_equals_linear_member(self, musgrave13):
        # enough consecutive AOs at the series end exhaust the q=0 window
        s = constant_series()
        end = s.end
        outs = [OutlierSpec(OutlierKind.AO, end - k) for k in range(7)]
        est, plan = robust_apply(s, outs)
        flagged = [pf for pf in plan.periods if pf.fallback]
        assert flagged, "expected at least one fallback period"
        for pf in flagged:
            assert pf.kind == "asym_end"
            expected = musgrave13.asymmetric[pf.q]
            np.testing.assert_array_equal(pf.ma.weights, expected.weights)

    def test_future_dated_spec_ignored(self):
        s = constant_series()
        est, plan = robust_apply(s, [OutlierSpec(OutlierKind.AO, s.end + 3)])
        np.testing.assert_allclose(est.values, 100.0, atol=1e-12)
        assert all(not pf.active for pf in plan.periods)

    def test_constant_preservation_every_filter(self):
        s = constant_series()
        outs = [
            OutlierSpec(OutlierKind.AO, T0),
            OutlierSpec(OutlierKind.LS, Month(2019, 6)),
        ]
        _, plan = robust_apply(s, outs)
        for pf in plan.periods:
            assert abs(pf.ma.weight_sum() - 1.0) < 1e-9

    def test_start_boundary_mirrors_end(self, rng):
        # with no shocks the start filters are the reversed end filters
        s = constant_series(40)
        _, plan = robust_apply(s, [])
        for q in range(6):
            start_pf = plan.periods[q]
            end_pf = plan.periods[len(s) - 1 - q]
            assert start_pf.kind == "asym_start" and end_pf.kind == "asym_end"
            np.testing.assert_allclose(
                start_pf.ma.weights, end_pf.ma.weights[::-1], atol=1e-12
            )

    def test_plan_export(self, tmp_path):
        from trendcycle.robust import write_plan_csv

        s = constant_series(30)
        _, plan = robust_apply(s, [OutlierSpec(OutlierKind.AO, Month(2019, 1))])
        path = tmp_path / "plan.csv"
        write_plan_csv(path, plan)
        lines = path.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "period,filter_kind,q,fallback_flag"
        assert len(lines) == 31
        assert lines[1].startswith("2018-01,asym_start,0,")

    def test_short_series_rejected(self):
        with pytest.raises(InvalidArgumentError):
            robust_apply(constant_series(10), [])
