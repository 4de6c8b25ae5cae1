import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import birdflock as bf
from birdflock import FlockState
from birdflock.diagnostics import DiagnosticsSeries, potential
from oracles import quadrature_energy, random_in_bounds_state, random_params

SIM_PARAMS = bf.ControlParams()
seeds = st.integers(0, 2**32 - 1)


def random_flock(seed, k=3, params=None):
    rng = np.random.default_rng(seed)
    p = params if params is not None else random_params(rng)
    x, v = random_in_bounds_state(rng, p, k)
    return FlockState(0.0, x, v), p


def triangle_flock():
    v = [bf.polar_to_velocity(45, 0.54), bf.polar_to_velocity(135, 0.42),
         bf.polar_to_velocity(270, 0.99)]
    return FlockState(0.0, [(0, 0), (1.25, 0), (0.63, 1.08)], v)


class TestLaplacians:
    def test_two_agent_example(self):
        flock = FlockState(0, [(0, 0), (1.25, 0)], [(0, 0), (1, 0)])
        lap = bf.build_laplacians(flock, SIM_PARAMS)
        a = 0.62470
        np.testing.assert_allclose(lap.L_x, [[a, -a], [-a, a]], atol=5e-6)
        f = 1 / 0.5625**2 - 1 / 0.6875**2
        np.testing.assert_allclose(lap.L_f, [[f, -f], [-f, f]], rtol=1e-12)

    @given(seeds, st.integers(2, 4))
    def test_symmetric_zero_row_sums(self, seed, k):
        flock, p = random_flock(seed, k)
        for L in bf.build_laplacians(flock, p).__dict__.values():
            np.testing.assert_array_equal(L, L.T)
            np.testing.assert_allclose(L.sum(axis=1), 0, atol=1e-9 * np.abs(L).max())

    @given(seeds, st.integers(2, 4))
    def test_alignment_off_diagonals_negative(self, seed, k):
        flock, p = random_flock(seed, k)
        L = bf.build_laplacians(flock, p).L_x
        assert np.all(L[~np.eye(k, dtype=bool)] < 0)

    @given(seeds, st.integers(2, 4))
    def test_alignment_laplacian_is_psd(self, seed, k):
        flock, p = random_flock(seed, k)
        L = bf.build_laplacians(flock, p).L_x
        assert np.linalg.eigvalsh(L).min() >= -1e-12 * np.abs(L).max()

    def test_compact_form_on_triangle(self):
        flock = triangle_flock()
        np.testing.assert_allclose(bf.laplacian_form_inputs(flock, SIM_PARAMS),
                                   bf.control_inputs(flock, SIM_PARAMS), rtol=1e-12)


class TestProjectVelocity:
    def test_equal_velocities(self):
        proj = bf.project_velocity(FlockState(0, [(0, 0), (1.2, 0)], [(0.4, 0.1)] * 2))
        np.testing.assert_array_equal(proj.residual, 0)
        assert proj.residual_norm == 0

    def test_two_agents(self):
        proj = bf.project_velocity(FlockState(0, [(0, 0), (1.2, 0)], [(1, 0), (0, 0)]))
        np.testing.assert_allclose(proj.mean, (0.5, 0))
        np.testing.assert_allclose(proj.residual, [(0.5, 0), (-0.5, 0)])
        assert proj.residual_norm == pytest.approx(0.70711, abs=5e-6)

    @given(seeds, st.integers(2, 4))
    def test_decomposition_is_orthogonal(self, seed, k):
        flock, _ = random_flock(seed, k)
        proj = bf.project_velocity(flock)
        np.testing.assert_allclose(proj.residual.sum(axis=0), 0, atol=1e-12)
        np.testing.assert_allclose(proj.mean + proj.residual, flock.velocities, atol=1e-15)

    @given(seeds, st.integers(2, 4))
    def test_pythagoras(self, seed, k):
        flock, _ = random_flock(seed, k)
        proj = bf.project_velocity(flock)
        total = float(np.sum(flock.velocities ** 2))
        split = k * float(proj.mean @ proj.mean) + proj.residual_norm ** 2
        assert split == pytest.approx(total, rel=1e-12)


class TestEnergy:
    def test_hand_evaluated_pair(self):
        # one pair at s = 1.5625, both parts integrated by hand
        delta = SIM_PARAMS.delta
        f0_part = 1 / 0.5625 - 1 / (1.25 - delta)
        f1_part = 1 / delta - 1 / 0.6875
        assert f0_part == pytest.approx(0.97778, abs=5e-6)
        assert potential([1.5625], SIM_PARAMS) == pytest.approx(0.5 * (f0_part - f1_part), abs=1e-9)

    def test_triangle_against_quadrature(self):
        assert bf.energy(triangle_flock(), SIM_PARAMS) == pytest.approx(-1499995.1563447549, abs=1e-8)

    def test_pairs_at_upper_limit_give_zero(self):
        # s is rounded when it is formed from positions, hence the loose tolerance
        r = math.sqrt(SIM_PARAMS.d1 - SIM_PARAMS.delta)
        flock = FlockState(0, [(0, 0), (r, 0)], [(0.2, 0.3)] * 2)
        assert bf.energy(flock, SIM_PARAMS) == pytest.approx(0.0, abs=1e-3)
        assert potential([SIM_PARAMS.d1 - SIM_PARAMS.delta], SIM_PARAMS) == pytest.approx(0, abs=1e-3)

    def test_out_of_bounds_raises(self):
        flock = FlockState(0, [(0, 0), (2, 0)], [(0, 0)] * 2)
        with pytest.raises(bf.DistanceBoundViolation):
            bf.energy(flock, SIM_PARAMS)

    @pytest.mark.parametrize("theta", [2, 4])
    def test_quadrature_with_random_params(self, theta):
        rng = np.random.default_rng(theta)
        p = random_params(rng).replace(theta=theta)
        x, v = random_in_bounds_state(rng, p, 3)
        expected = quadrature_energy(x.tolist(), v.tolist(), p)
        assert bf.energy(FlockState(0, x, v), p) == pytest.approx(expected, rel=1e-13)

    @settings(max_examples=50)
    @given(seeds)
    def test_potential_decreases_toward_upper_limit(self, seed):
        # the integrand is positive below the f0 = f1 crossing and negative above it
        rng = np.random.default_rng(seed)
        p = random_params(rng)
        s = np.sort(rng.uniform(p.d0 + 1e-3, p.d1 - 1e-3, size=2))
        mid = 0.5 * (p.d0 + p.d1)
        values = potential(s[:, None], p)
        if s[1] <= mid:
            assert values[0] >= values[1]
        elif s[0] >= mid:
            assert values[0] <= values[1]


class TestDiagnosticsSeries:
    def test_record_matches_snapshot_functions(self):
        flock = triangle_flock()
        rec = bf.diagnostics_record(flock, SIM_PARAMS)
        assert rec.energy == bf.energy(flock, SIM_PARAMS)
        assert rec.dispersion == pytest.approx(bf.velocity_dispersion(flock), rel=1e-15)
        assert rec.projected_speed_norm == pytest.approx(bf.project_velocity(flock).residual_norm)
        assert rec.min_sq_dist == pytest.approx(1.5508)
        assert rec.max_sq_dist == pytest.approx(1.5633)
        d = [1.25, math.sqrt(1.5508), math.sqrt(1.5633)]
        assert rec.avg_distance == pytest.approx(sum(d) / 3)

    def test_energy_nan_out_of_bounds(self):
        flock = FlockState(0, [(0, 0), (3, 0)], [(0, 0)] * 2)
        assert math.isnan(bf.diagnostics_record(flock, SIM_PARAMS).energy)

    def test_table_columns(self, leaderless_run):
        table = leaderless_run.diagnostics.as_table()
        assert table.shape == (25001, len(DiagnosticsSeries.COLUMNS))
        np.testing.assert_array_equal(table[:, 0], leaderless_run.times)


class TestMonitor:
    def test_leaderless_run_passes(self, leaderless_run):
        verdicts = bf.monitor(leaderless_run)
        assert [v.check for v in verdicts] == ["energy", "mean_velocity", "bounds", "convergence"]
        assert all(v.enforced and v.passed for v in verdicts)
        assert verdicts[0].detail["total_decrease"] > 0
        conv = verdicts[3].detail
        assert 0 < conv["first_crossing_time"] <= conv["settle_time"] < 250
        assert bf.monitor_passed(verdicts)

    def test_leader_follower_energy_is_informational(self):
        trajectory = bf.run(bf.leader_follower2(integrator=bf.IntegratorConfig("rk4", 0.01, 20.0)))
        verdicts = {v.check: v for v in bf.monitor(trajectory)}
        assert not verdicts["energy"].enforced
        assert not verdicts["mean_velocity"].enforced
        assert verdicts["bounds"].enforced and verdicts["bounds"].passed
        assert bf.monitor_passed(verdicts.values())

    def test_baseline_fails_bounds(self, baseline_runs):
        verdicts = bf.monitor(baseline_runs[bf.ControlLawKind.MODEL3_CUCKER_DONG])
        bounds = verdicts[2]
        assert not bounds.passed
        assert bounds.first_failure_time == pytest.approx(
            baseline_runs[bf.ControlLawKind.MODEL3_CUCKER_DONG].violation.time)
        assert not bf.monitor_passed(verdicts)

    def test_consensus_flock_is_an_equilibrium(self):
        v = bf.polar_to_velocity(30, 0.5)
        initial = [(0, 0, 30, 0.5), (1.2, 0, 30, 0.5), (0.6, 1.0, 30, 0.5)]
        spec = bf.ScenarioSpec("proposed", SIM_PARAMS, initial, bf.IntegratorConfig("rk4", 0.01, 1.0))
        trajectory = bf.run(spec)
        np.testing.assert_allclose(trajectory.velocities, np.broadcast_to(v, trajectory.velocities.shape),
                                   atol=1e-15)
        e = trajectory.diagnostics.energy
        np.testing.assert_allclose(e, e[0], rtol=1e-15)
        assert all(v.passed for v in bf.monitor(trajectory))

    def test_energy_step_failure_is_located(self, leaderless_run):
        diag = leaderless_run.diagnostics
        bumped = DiagnosticsSeries(**{**diag.__dict__, "energy": diag.energy.copy()})
        bumped.energy[100] += 1.0
        broken = bf.Trajectory(leaderless_run.spec, leaderless_run.times, leaderless_run.positions,
                               leaderless_run.velocities, leaderless_run.accelerations, bumped)
        verdict = bf.monitor(broken)[0]
        assert not verdict.passed
        assert verdict.first_failure_time == pytest.approx(1.0)
