import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coifreq.coi import (
    CoiEstimate,
    SolverConfig,
    build_system,
    coi_series,
    median_baseline,
    normal_equation_solution,
    rocof_fit,
    rocof_nerc,
    solve_weights,
)
from coifreq.errors import (
    DegenerateWeightsError,
    SingularSystemError,
    UnderdeterminedError,
    WindowInvalidError,
    WindowRangeError,
)

from conftest import make_mset, make_window


def fit_set(frame, dt=0.1):
    """Frame column k is sample T_k for k = 0..K; window anchors at sample 0."""
    return make_mset(frame, dt=dt)


class TestBuildSystem:
    def test_single_channel_k3_omega1(self):
        mset = fit_set(np.full((1, 4), 60.0))
        a, b = build_system(mset, make_window(3), SolverConfig(omega=1.0))
        expected_a = np.array(
            [
                [60.0, -1.0, -1.0],
                [60.0, -2.0, -1.0],
                [60.0, -3.0, -1.0],
                [1.0, 0.0, 0.0],
                [1.0, 0.0, 0.0],
            ]
        )
        np.testing.assert_array_equal(a, expected_a)
        np.testing.assert_array_equal(b, [0.0, 0.0, 0.0, 1.0, 1.0])

    def test_underdetermined(self):
        mset = fit_set(np.full((2, 3), 60.0))
        with pytest.raises(UnderdeterminedError):
            build_system(mset, make_window(2), SolverConfig())

    def test_two_channels_k4_omega30(self):
        mset = fit_set(np.full((2, 5), 60.0))
        a, b = build_system(mset, make_window(4), SolverConfig(omega=30.0))
        assert a.shape == (7, 4)
        np.testing.assert_array_equal(a[4], [30.0, 30.0, 0.0, 0.0])
        np.testing.assert_array_equal(a[5], [30.0, 0.0, 0.0, 0.0])
        np.testing.assert_array_equal(a[6], [0.0, 30.0, 0.0, 0.0])
        np.testing.assert_array_equal(b[-3:], [30.0, 15.0, 15.0])

    def test_masked_cell_invalidates_window(self):
        frame = np.full((2, 8), 60.0)
        mask = np.ones_like(frame, dtype=bool)
        mask[1, 3] = False
        mset = make_mset(frame, mask=mask)
        with pytest.raises(WindowInvalidError) as exc:
            build_system(mset, make_window(6), SolverConfig())
        assert exc.value.details["channel"] == "ch1"
        assert exc.value.details["sample"] == 3


def line_frame(n, k, delta_f=-0.001, f0=60.0, osc=None):
    """f_n[T_j] = f0 + j*delta_f + osc[n, j] for j=0..k."""
    j = np.arange(k + 1)
    frame = np.tile(f0 + j * delta_f, (n, 1))
    if osc is not None:
        frame = frame + osc
    return frame


class TestSolveWeights:
    def test_identical_channels_uniform_weights(self):
        mset = fit_set(line_frame(2, 10, delta_f=-0.01))
        a, b = build_system(mset, make_window(10), SolverConfig(omega=1.0))
        sol = solve_weights(a, b)
        np.testing.assert_allclose(sol.weights, [0.5, 0.5], atol=1e-8)
        assert sol.delta_f == pytest.approx(-0.01, abs=1e-10)
        assert sol.f0_fit == pytest.approx(60.0, abs=1e-8)
        # oracle: explicit normal-equation solve
        oracle = normal_equation_solution(a, b)
        np.testing.assert_allclose(
            np.r_[sol.weights, sol.delta_f, sol.f0_fit], oracle, rtol=1e-8
        )

    def test_antisymmetric_oscillation_cancelled(self):
        k = np.arange(11)
        osc = 0.005 * (-1.0) ** k
        frame = line_frame(2, 10, delta_f=-0.01, osc=np.vstack([osc, -osc]))
        mset = fit_set(frame)
        a, b = build_system(mset, make_window(10), SolverConfig(omega=1.0))
        sol = solve_weights(a, b)
        np.testing.assert_allclose(sol.weights, [0.5, 0.5], atol=1e-8)
        assert sol.delta_f == pytest.approx(-0.01, abs=1e-10)
        oracle = normal_equation_solution(a, b)
        np.testing.assert_allclose(
            np.r_[sol.weights, sol.delta_f, sol.f0_fit], oracle, rtol=1e-8
        )

    def test_scaled_oscillation_two_thirds_one_third(self):
        k = np.arange(21)
        o = 0.01 * np.sin(1.3 * k)
        frame = line_frame(2, 20, delta_f=-0.01, osc=np.vstack([o, -2.0 * o]))
        mset = fit_set(frame)
        a, b = build_system(mset, make_window(20), SolverConfig(omega=0.01))
        sol = solve_weights(a, b)
        # fit rows are scale-invariant, so compare after weight-sum
        # normalization; expected values frozen from the oracle below
        np.testing.assert_allclose(sol.weights / sol.weight_sum, [2 / 3, 1 / 3], atol=1e-2)
        np.testing.assert_allclose(sol.weights, [0.639899, 0.325126], atol=1e-5)
        assert sol.delta_f / sol.weight_sum == pytest.approx(-0.01, abs=1e-3)
        # omega=0.01 leaves A moderately ill-conditioned, which costs the
        # squared-condition normal-equation oracle a few digits
        oracle = normal_equation_solution(a, b)
        np.testing.assert_allclose(
            np.r_[sol.weights, sol.delta_f, sol.f0_fit], oracle, rtol=1e-6
        )

    def test_rank_deficient_raises(self):
        a = np.zeros((8, 4))
        a[:, 0] = 1.0
        with pytest.raises(SingularSystemError):
            solve_weights(a, np.zeros(8))

    def test_negative_weights_flagged(self):
        # strong anti-correlated channels force a negative weight at small omega
        k = np.arange(16)
        o = 0.02 * np.sin(1.7 * k)
        frame = line_frame(2, 15, osc=np.vstack([2.0 * o, o]))
        mset = fit_set(frame)
        a, b = build_system(mset, make_window(15), SolverConfig(omega=0.01))
        sol = solve_weights(a, b)
        if np.any(sol.weights < 0):
            assert "negative_weights" in sol.flags

    def test_optimality_against_perturbations(self, rng):
        mset = fit_set(60.0 + 0.01 * rng.standard_normal((3, 13)))
        a, b = build_system(mset, make_window(12), SolverConfig(omega=1.0))
        sol = solve_weights(a, b)
        x = np.r_[sol.weights, sol.delta_f, sol.f0_fit]
        base = np.linalg.norm(a @ x - b)
        for _ in range(200):
            p = rng.standard_normal(len(x)) * 10.0 ** rng.uniform(-6, -1)
            assert np.linalg.norm(a @ (x + p) - b) >= base - 1e-12

    def test_omega_limit_uniform_weights(self, rng):
        frame = 60.0 + 0.05 * rng.standard_normal((4, 20))
        mset = fit_set(frame)
        a, b = build_system(mset, make_window(19), SolverConfig(omega=1e6))
        sol = solve_weights(a, b)
        np.testing.assert_allclose(sol.weights, 0.25, atol=1e-3)

    def test_weight_sum_gap_nonincreasing_in_omega(self, rng):
        frame = 60.0 + 0.05 * rng.standard_normal((3, 25))
        mset = fit_set(frame)
        gaps = []
        for omega in [0.01, 1.0, 30.0, 1e3, 1e6]:
            a, b = build_system(mset, make_window(24), SolverConfig(omega=omega))
            gaps.append(abs(solve_weights(a, b).weight_sum - 1.0))
        assert all(g2 <= g1 + 1e-12 for g1, g2 in zip(gaps, gaps[1:]))

    def test_exact_model_recovery_uniform_cancel(self):
        # uniform cancelling vector keeps all soft rows consistent, so the
        # exact solution is recovered at every omega
        k_samples = 40
        j = np.arange(1, k_samples + 1)
        o1 = 0.05 * np.sin(1.9 * j)
        o2 = 0.05 * np.cos(0.9 * j)
        o3 = 0.03 * np.sin(0.7 * j + 1.0)
        o4 = -(o1 + o2 + o3)
        frame = line_frame(4, k_samples, delta_f=-0.004)
        frame[:, 1:] += np.vstack([o1, o2, o3, o4])
        mset = fit_set(frame)
        for omega in [0.01, 1.0, 30.0, 1e4]:
            a, b = build_system(mset, make_window(k_samples), SolverConfig(omega=omega))
            sol = solve_weights(a, b)
            assert sol.delta_f == pytest.approx(-0.004, abs=1e-10), omega
            assert sol.f0_fit == pytest.approx(60.0, abs=1e-10), omega
        a, b = build_system(mset, make_window(k_samples), SolverConfig(omega=0.01))
        sol = solve_weights(a, b)
        np.testing.assert_allclose(sol.weights, 0.25, atol=1e-3)

    def test_exact_model_recovery_nonuniform_normalized(self):
        # with a non-uniform cancelling vector the fit block's scale
        # invariance lets the soft rows rescale the solution ray, so the
        # recovery holds after normalizing by the weight sum
        x_star = np.array([0.5, 0.3, 0.2])
        k_samples = 40
        j = np.arange(1, k_samples + 1)
        basis = np.vstack([np.ones_like(j, dtype=float), j.astype(float)]).T
        proj = np.eye(k_samples) - basis @ np.linalg.lstsq(
            basis, np.eye(k_samples), rcond=None
        )[0]
        o1 = proj @ (0.05 * np.sin(1.9 * j))
        o2 = proj @ (0.05 * np.cos(0.9 * j))
        o3 = -(x_star[0] * o1 + x_star[1] * o2) / x_star[2]
        frame = line_frame(3, k_samples, delta_f=-0.004)
        frame[:, 1:] += np.vstack([o1, o2, o3])
        mset = fit_set(frame)
        a, b = build_system(mset, make_window(k_samples), SolverConfig(omega=0.01))
        sol = solve_weights(a, b)
        np.testing.assert_allclose(sol.weights / sol.weight_sum, x_star, atol=1e-3)
        assert sol.delta_f / sol.weight_sum == pytest.approx(-0.004, abs=1e-5)


class TestCoiSeries:
    def test_equal_weights_mean(self):
        mset = make_mset([[59.9, 59.9], [60.1, 60.1]])
        est = coi_series(mset, [0.5, 0.5])
        assert est.f_coi[0] == pytest.approx(60.0)

    def test_unnormalized_weights(self):
        mset = make_mset([[59.9, 59.9], [60.1, 60.1]])
        est = coi_series(mset, [2.0, 2.0])
        assert est.f_coi[0] == pytest.approx(60.0)

    def test_masked_cell_renormalizes(self):
        frame = np.array([[59.95, 59.95], [60.3, 60.3]])
        mask = np.array([[True, True], [False, True]])
        mset = make_mset(frame, mask=mask)
        est = coi_series(mset, [0.7, 0.3])
        assert est.f_coi[0] == pytest.approx(59.95)

    def test_zero_weight_sum(self):
        mset = make_mset([[60.0, 60.0], [60.0, 60.0]])
        with pytest.raises(DegenerateWeightsError):
            coi_series(mset, [1.0, -1.0])

    @given(scale=st.floats(1e-3, 1e3, allow_nan=False))
    @settings(max_examples=25, deadline=None)
    def test_invariant_under_positive_rescale(self, scale):
        mset = make_mset([[59.9, 60.0], [60.1, 60.2]])
        base = coi_series(mset, [0.7, 0.3])
        scaled = coi_series(mset, [0.7 * float(scale), 0.3 * float(scale)])
        np.testing.assert_allclose(scaled.f_coi, base.f_coi, rtol=1e-9)


class TestRocof:
    def test_fit_division(self):
        sol = _solution(delta_f=-0.005)
        assert rocof_fit(sol, 0.1) == pytest.approx(-0.05)

    def test_fit_zero(self):
        assert rocof_fit(_solution(delta_f=0.0), 0.1) == 0.0

    def test_fit_30fps(self):
        assert rocof_fit(_solution(delta_f=-0.01), 1.0 / 30.0) == pytest.approx(-0.3)

    def test_nerc_decline_positive(self):
        est = _linear_estimate(slope=-0.05)
        win = make_window(10, t0=0.0)
        assert rocof_nerc(est, win) == pytest.approx(0.05, abs=1e-12)

    def test_nerc_flat_zero(self):
        est = _linear_estimate(slope=0.0)
        assert rocof_nerc(est, make_window(10)) == 0.0

    def test_nerc_over_frequency_negative(self):
        est = _linear_estimate(slope=0.04)
        assert rocof_nerc(est, make_window(10)) == pytest.approx(-0.04, abs=1e-12)

    def test_nerc_range_error(self):
        est = _linear_estimate(slope=0.0, n=4)  # only 0.3 s of data
        with pytest.raises(WindowRangeError):
            rocof_nerc(est, make_window(2))


def _solution(delta_f):
    from coifreq.coi import WeightSolution

    return WeightSolution(
        weights=np.array([1.0]),
        delta_f=delta_f,
        f0_fit=60.0,
        residual_norm=0.0,
        weight_sum=1.0,
        condition_estimate=1.0,
    )


def _linear_estimate(slope, n=11, dt=0.1):
    t = dt * np.arange(n)
    return CoiEstimate(timestamps=t, f_coi=60.0 + slope * t)


class TestMedianBaseline:
    def test_odd_channel_median(self):
        frame = np.tile([[59.98], [60.00], [60.02]], (1, 12))
        est = median_baseline(make_mset(frame), make_window(10))
        assert est.f_coi[0] == pytest.approx(60.00)
        assert est.method == "median"

    def test_even_channel_mean_of_central_pair(self):
        frame = np.tile([[59.98], [60.02]], (1, 12))
        est = median_baseline(make_mset(frame), make_window(10))
        assert est.f_coi[0] == pytest.approx(60.00)

    def test_exact_line_slope(self):
        dt = 0.1
        t = dt * np.arange(12)
        frame = np.tile(60.0 - 0.05 * t, (3, 1))
        est = median_baseline(make_mset(frame, dt=dt), make_window(10))
        assert est.rocof_fit == pytest.approx(-0.05, abs=1e-10)

    def test_all_masked_instant_invalid(self):
        frame = np.full((2, 12), 60.0)
        mask = np.ones_like(frame, dtype=bool)
        mask[:, 5] = False
        with pytest.raises(WindowInvalidError):
            median_baseline(make_mset(frame, mask=mask), make_window(10))
