"""Tests for bridge sampling, crossing detection and the MC engine.

Statistical assertions use the exact moments of the pinned bridge as
oracles (mean, variance, covariance s(1-u)) with 4-5 standard-error
tolerances; everything running from a seed is deterministic, so the
remaining assertions are exact.
"""

import math

import numpy as np
import pytest

from bridgestop import (
    BridgePath,
    CrossingRule,
    DomainError,
    ProblemSpec,
    SpacePoint,
    TimeGrid,
    bridge_step,
    candidate_value,
    first_crossing,
    mc_estimate,
    path_rng,
    run_strategy,
    simulate_path,
    solve_thresholds,
)
from bridgestop.simulation import _simulate_block


@pytest.fixture(scope="module")
def ts1():
    return solve_thresholds(ProblemSpec.problem1())


@pytest.fixture(scope="module")
def ts2():
    return solve_thresholds(ProblemSpec.problem2(0))


@pytest.fixture(scope="module")
def ts3():
    return solve_thresholds(ProblemSpec.problem3(1.0))


class TestTimeGrid:
    def test_geometric_endpoints_and_monotone(self):
        grid = TimeGrid(t0=0.1, epsilon=1e-6, n_steps=500, spacing="geometric")
        pts = grid.points()
        assert pts[0] == 0.1
        assert pts[-1] == 1.0 - 1e-6
        assert np.all(np.diff(pts) > 0.0)
        # constant ratio of 1 - s_k
        ratios = (1.0 - pts[1:]) / (1.0 - pts[:-1])
        assert np.allclose(ratios, ratios[0], rtol=1e-9)

    def test_uniform(self):
        pts = TimeGrid(t0=0.0, epsilon=0.5, n_steps=2, spacing="uniform").points()
        assert pts.tolist() == [0.0, 0.5]

    def test_validation(self):
        with pytest.raises(DomainError):
            TimeGrid(t0=0.9999999, epsilon=1e-6)
        with pytest.raises(DomainError):
            TimeGrid(n_steps=1)
        with pytest.raises(DomainError):
            TimeGrid(spacing="log")
        with pytest.raises(DomainError):
            TimeGrid(epsilon=0.0)


class TestBridgeStep:
    def test_domain(self):
        rng = path_rng(0, 0)
        with pytest.raises(DomainError):
            bridge_step(0.5, 0.0, 0.5, rng)
        with pytest.raises(DomainError):
            bridge_step(0.5, 0.0, 1.0, rng)

    def test_pinning(self):
        rng = path_rng(1, 0)
        draws = [bridge_step(0.0, 3.0, 1.0 - 1e-12, rng) for _ in range(100)]
        assert max(abs(d) for d in draws) < 1e-5

    def test_moments_statistical(self):
        # exact law from (t, x, u) = (0, 0, 0.5): mean 0, variance 0.25
        n = 1_000_000
        draws = 0.5 * path_rng(42, 0).standard_normal(n)  # same transform as bridge_step
        # spot check the scalar path agrees with the transform
        rng = path_rng(42, 0)
        assert bridge_step(0.0, 0.0, 0.5, rng) == draws[0]
        se_mean = 0.5 / math.sqrt(n)
        assert abs(draws.mean()) < 4.0 * se_mean
        var = draws.var(ddof=1)
        se_var = 0.25 * math.sqrt(2.0 / (n - 1))
        assert abs(var - 0.25) < 4.0 * se_var


class TestSimulatePath:
    def test_start_and_shape(self):
        grid = TimeGrid(t0=0.0, epsilon=1e-6, n_steps=50)
        path = simulate_path(SpacePoint(0.0, 5.0), grid, path_rng(7, 0))
        assert path.values[0] == 5.0
        assert len(path.values) == 50

    def test_two_point_grid(self):
        grid = TimeGrid(t0=0.0, epsilon=0.25, n_steps=2, spacing="uniform")
        path = simulate_path(SpacePoint(0.0, 1.0), grid, path_rng(7, 1))
        assert len(path.values) == 2

    def test_grid_mismatch(self):
        grid = TimeGrid(t0=0.25, epsilon=1e-6, n_steps=10)
        with pytest.raises(DomainError):
            simulate_path(SpacePoint(0.0, 0.0), grid, path_rng(0, 0))

    def test_block_engine_matches_scalar_paths_bitwise(self):
        grid = TimeGrid(t0=0.0, epsilon=1e-6, n_steps=40)
        pts = grid.points()
        block = _simulate_block(0.7, pts, 99, 5, 3)
        for row, idx in enumerate(range(5, 8)):
            path = simulate_path(SpacePoint(0.0, 0.7), grid, path_rng(99, idx))
            assert np.array_equal(path.values, block[row])

    def test_covariance_oracle(self):
        # Cov(X_s, X_u) = s (1 - u) for the bridge started at (0, 0)
        grid = TimeGrid(t0=0.0, epsilon=1e-6, n_steps=11, spacing="uniform")
        pts = grid.points()
        n = 100_000
        values = np.vstack(
            [_simulate_block(0.0, pts, 2024, lo, min(4096, n - lo)) for lo in range(0, n, 4096)]
        )
        i, j = 3, 7
        s, u = pts[i], pts[j]
        prod = values[:, i] * values[:, j]
        cov = prod.mean()
        se = prod.std(ddof=1) / math.sqrt(n)
        assert abs(cov - s * (1.0 - u)) < 5.0 * se


def _path_from_scaled(scaled, grid):
    values = np.asarray(scaled) * np.sqrt(1.0 - grid.points())
    return BridgePath(grid=grid, values=values, start=SpacePoint(grid.t0, values[0]), seed=None)


class TestFirstCrossing:
    GRID = TimeGrid(t0=0.0, epsilon=0.1, n_steps=6, spacing="uniform")

    def test_immediate_when_started_beyond(self):
        path = _path_from_scaled([1.2, 0.5, 0.1, 0.0, -0.2, 0.0], self.GRID)
        assert first_crossing(path, CrossingRule("up", 1.0)) == 0

    def test_absent_is_none(self):
        path = _path_from_scaled([0.0, 0.1, 0.2, 0.1, 0.0, 0.1], self.GRID)
        assert first_crossing(path, CrossingRule("up", 1.0)) is None

    def test_start_index(self):
        path = _path_from_scaled([1.2, 0.5, 1.3, 0.0, -0.2, 0.0], self.GRID)
        assert first_crossing(path, CrossingRule("up", 1.0), start=1) == 2

    def test_inner_zero_level_needs_sign_change_or_zero(self):
        rule = CrossingRule("inner", 0.0)
        touches = _path_from_scaled([0.5, 0.2, 0.0, -0.1, 0.3, 0.1], self.GRID)
        assert first_crossing(touches, rule) == 2
        jumps = _path_from_scaled([0.5, 0.2, 0.1, -0.1, 0.3, 0.1], self.GRID)
        assert first_crossing(jumps, rule) == 3
        never = _path_from_scaled([0.5, 0.2, 0.1, 0.1, 0.3, 0.1], self.GRID)
        assert first_crossing(never, rule) is None

    def test_nested_levels_order(self):
        path = _path_from_scaled([0.0, 0.6, 1.1, 1.6, 0.2, 0.0], self.GRID)
        lo = first_crossing(path, CrossingRule("up", 1.0))
        hi = first_crossing(path, CrossingRule("up", 1.5))
        assert lo <= hi

    def test_rule_validation(self):
        with pytest.raises(DomainError):
            CrossingRule("sideways", 1.0)
        with pytest.raises(DomainError):
            CrossingRule("up", math.inf)


class TestRunStrategy:
    GRID = TimeGrid(t0=0.0, epsilon=0.1, n_steps=6, spacing="uniform")

    def test_problem1_forced_second_stop(self, ts1):
        # drops below C*, never recovers to B*: the sale is forced at the
        # cutoff and the spread stays positive
        spec = ProblemSpec.problem1()
        path = _path_from_scaled([0.0, -0.7, -0.3, -0.1, -0.05, -0.01], self.GRID)
        out = run_strategy(spec, ts1, path)
        assert out.tau1 == self.GRID.points()[1]
        assert out.tau2 == self.GRID.points()[-1]
        assert out.x1 < 0.0
        assert out.spread == out.x2 - out.x1
        assert out.spread > 0.0

    def test_problem1_ordering(self, ts1):
        spec = ProblemSpec.problem1()
        grid = TimeGrid(t0=0.0, epsilon=1e-6, n_steps=300)
        for i in range(20):
            path = simulate_path(SpacePoint(0.0, 0.0), grid, path_rng(5, i))
            out = run_strategy(spec, ts1, path)
            assert 0.0 <= out.tau1 <= out.tau2 < 1.0

    def test_problem2_immediate_first_stop(self, ts2):
        spec = ProblemSpec.problem2(0)
        path = _path_from_scaled([2.0, 1.0, 0.5, -0.9, -0.3, 0.0], self.GRID)
        out = run_strategy(spec, ts2, path)
        assert out.tau1 == 0.0
        assert out.x1 == path.values[0]
        # short branch: sell high first, buy back at the lower threshold
        assert out.tau2 == self.GRID.points()[3]
        assert out.spread == out.x1 - out.x2

    def test_problem3_zero_inner_threshold(self, ts3):
        spec = ProblemSpec.problem3(1.0)
        assert ts3.a_star == 0.0
        path = _path_from_scaled([0.5, 0.2, -0.1, 1.3, 0.4, 0.1], self.GRID)
        out = run_strategy(spec, ts3, path)
        assert out.tau1 == self.GRID.points()[2]  # sign change
        assert out.spread == abs(out.x2) - abs(out.x1)

    def test_matches_block_strategy(self, ts1):
        # the scalar runner and the vectorised engine agree path by path
        spec = ProblemSpec.problem1()
        grid = TimeGrid(t0=0.0, epsilon=1e-6, n_steps=200)
        report, details = mc_estimate(spec, SpacePoint(0.0, 0.0), ts1, grid, 150, 77, details=True)
        for i in range(0, 150, 37):
            path = simulate_path(SpacePoint(0.0, 0.0), grid, path_rng(77, i))
            out = run_strategy(spec, ts1, path)
            assert out.spread == details["spread"][i]
            assert out.tau1 == details["tau1"][i]
            assert out.tau2 == details["tau2"][i]


class TestMCEstimate:
    START = SpacePoint(0.0, 0.0)

    def test_reproducible(self, ts1):
        spec = ProblemSpec.problem1()
        grid = TimeGrid(n_steps=300)
        a = mc_estimate(spec, self.START, ts1, grid, 500, base_seed=11)
        b = mc_estimate(spec, self.START, ts1, grid, 500, base_seed=11)
        assert a == b
        c = mc_estimate(spec, self.START, ts1, grid, 500, base_seed=12)
        assert c.mean != a.mean

    def test_report_fields(self, ts1):
        spec = ProblemSpec.problem1()
        grid = TimeGrid(n_steps=300)
        rep, details = mc_estimate(spec, self.START, ts1, grid, 400, 3, details=True)
        assert rep.n_paths == 400
        assert rep.analytic == candidate_value(spec, self.START, ts1).value
        assert rep.z_score == (rep.mean - rep.analytic) / rep.std_error
        assert np.all(details["tau1"] <= details["tau2"])
        assert np.all(details["tau2"] < 1.0)

    def test_path_count_floor(self, ts1):
        with pytest.raises(DomainError):
            mc_estimate(ProblemSpec.problem1(), self.START, ts1, TimeGrid(), 99, 1)

    @pytest.mark.parametrize("kind_param", [(1, None), (2, 0), (3, 2.0)])
    def test_matches_analytic_smoke(self, kind_param):
        kind, param = kind_param
        if kind == 1:
            spec = ProblemSpec.problem1()
        elif kind == 2:
            spec = ProblemSpec.problem2(param)
        else:
            spec = ProblemSpec.problem3(param)
        ts = solve_thresholds(spec)
        grid = TimeGrid(t0=0.0, epsilon=1e-6, n_steps=800)
        rep = mc_estimate(spec, self.START, ts, grid, 5000, base_seed=101)
        assert abs(rep.mean - rep.analytic) < max(4.0 * rep.std_error, 0.02)
        assert rep.mean > 0.0

    def test_refined_mode_halves_the_step(self, ts1):
        from bridgestop import mc_estimate_refined

        spec = ProblemSpec.problem1()
        grid = TimeGrid(t0=0.0, epsilon=1e-6, n_steps=125)
        coarse, fine = mc_estimate_refined(spec, self.START, ts1, grid, 20000, base_seed=13)
        assert fine.grid.n_steps == 250
        assert abs(fine.mean - fine.analytic) < abs(coarse.mean - coarse.analytic)

    def test_grid_refinement_shrinks_bias(self, ts1):
        # deterministic under the fixed seed; the crossing-detection bias
        # falls monotonically as the grid step halves
        spec = ProblemSpec.problem1()
        errs = []
        for steps in (125, 500, 2000):
            grid = TimeGrid(t0=0.0, epsilon=1e-6, n_steps=steps)
            rep = mc_estimate(spec, self.START, ts1, grid, 30000, base_seed=13)
            errs.append(abs(rep.mean - rep.analytic))
        assert errs[0] > errs[1] > errs[2]
