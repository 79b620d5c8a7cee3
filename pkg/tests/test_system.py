"""
Switching System Evolution Tests

Tests exact evolution under piecewise-constant schedules, the chattering
discretization and its window-count bound, and the tensor factorisation of
X-trajectories into A- and B0-trajectories.
"""

import math

import numpy as np
import pytest

from switchgrade.catalog import A0, A1, B0_PRIME, system_A, system_B_prime
from switchgrade.errors import DimensionError, InvalidInputError, RangeError
from switchgrade.matexp import eigenvalues, expm, kron
from switchgrade.models import MeasurableLaw, Schedule, SwitchingSystem, Trajectory
from switchgrade.system import (chatter_discretize, discretization_constants, evolve, piece_exponentials,
                                product_of_exponentials, propagate, reference_solve, required_k, shift,
                                split_tensor_schedule, tensor_lift, window_integrals)


def _random_vertex_schedule(rng, pieces, size, mean=0.5):
    return Schedule.vertex(rng.exponential(mean, pieces) + 1e-3, rng.integers(0, size, pieces), size)


class TestEvolve:
    """Trajectories under piecewise-constant schedules."""

    def test_pause_vertex_flow(self):
        """Sitting on A0 from (1, 1) gives (1, e^{-t})."""
        traj = evolve(system_A(), Schedule.vertex([3.0], [0], 2), [1.0, 1.0], step=0.1)
        np.testing.assert_allclose(traj.states[:, 0], 1.0, atol=1e-14)
        np.testing.assert_allclose(traj.states[:, 1], np.exp(-traj.times), atol=1e-14)

    def test_spiral_half_turn(self):
        """x(pi) = (-e^{-pi}, 0) from (1, 0) under A1."""
        traj = evolve(system_A(), Schedule.vertex([np.pi], [1], 2), [1.0, 0.0])
        np.testing.assert_allclose(traj.final, [-np.exp(-np.pi), 0.0], atol=1e-14)

    def test_spiral_half_turn_matches_rk4(self):
        law = MeasurableLaw.constant([0.0, 1.0])
        ref = reference_solve(system_A(), law, [1.0, 0.0], np.pi, step=1e-4)
        np.testing.assert_allclose(ref, [-np.exp(-np.pi), 0.0], atol=1e-10)

    def test_starts_at_x0_and_samples_boundaries(self):
        sched = Schedule.vertex([0.35, 0.2, 1.0], [0, 1, 0], 2)
        traj = evolve(system_A(), sched, [0.3, -0.7], step=0.05)
        np.testing.assert_array_equal(traj.states[0], [0.3, -0.7])
        for b in sched.boundaries:
            assert np.min(np.abs(traj.times - b)) < 1e-12
        assert np.max(np.diff(traj.times)) <= 0.05 + 1e-12

    def test_flow_composable(self):
        """Evolving two schedules in turn equals evolving their concatenation."""
        rng = np.random.default_rng(11)
        sys = system_B_prime()
        s1, s2 = _random_vertex_schedule(rng, 20, 2), _random_vertex_schedule(rng, 15, 2)
        x0 = np.array([0.4, 1.1])
        mid = evolve(sys, s1, x0).final
        np.testing.assert_allclose(evolve(sys, s2, mid).final, evolve(sys, s1.concat(s2), x0).final, rtol=1e-10)

    def test_vertex_schedule_equals_product_of_exponentials(self):
        rng = np.random.default_rng(5)
        sys = system_A()
        sched = _random_vertex_schedule(rng, 30, 2)
        explicit = np.eye(2)
        for d, i in zip(sched.durations, sched.vertex_indices):
            explicit = expm(sys.generators[i], d) @ explicit
        np.testing.assert_allclose(product_of_exponentials(sys, sched), explicit, atol=1e-14)
        np.testing.assert_allclose(evolve(sys, sched, [1.0, 2.0]).final, propagate(sys, sched, [1.0, 2.0]),
                                   atol=1e-13)

    def test_piece_exponentials_use_hull_element(self):
        sched = Schedule([1.5], [[0.25, 0.75]])
        E = piece_exponentials(system_A(), sched)
        np.testing.assert_allclose(E[0], expm(0.25 * A0 + 0.75 * A1, 1.5), atol=1e-14)

    def test_gronwall_envelope(self):
        """||x(t)|| <= e^{Ct} ||x(0)|| with C the largest generator norm."""
        rng = np.random.default_rng(2)
        for sys in (system_A(), system_B_prime()):
            C = sys.max_norm
            for _ in range(10):
                sched = _random_vertex_schedule(rng, 12, 2)
                traj = evolve(sys, sched, rng.normal(size=2), step=0.05)
                norms = np.linalg.norm(traj.states, axis=1)
                assert np.all(norms <= np.exp(C * traj.times) * norms[0] * (1 + 1e-12))

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            evolve(system_A(), Schedule.vertex([1.0], [0], 2), [1.0, 0.0, 0.0])
        with pytest.raises(DimensionError):
            evolve(system_A(), Schedule.vertex([1.0], [0], 3), [1.0, 0.0])

    def test_non_positive_step(self):
        with pytest.raises(InvalidInputError):
            evolve(system_A(), Schedule.vertex([1.0], [0], 2), [1.0, 0.0], step=0.0)

    def test_trajectory_csv(self, tmp_path):
        traj = evolve(system_A(), Schedule.vertex([0.5], [1], 2), [1.0, 0.0], step=0.25)
        path = traj.to_csv(tmp_path / 'traj.csv')
        lines = path.read_text().splitlines()
        assert lines[0] == 't,x1,x2'
        data = np.loadtxt(path, delimiter=',', skiprows=1)
        np.testing.assert_array_equal(data[:, 0], traj.times)
        np.testing.assert_array_equal(data[:, 1:], traj.states)


class TestScheduleModel:
    """Validation and reshaping of schedules."""

    def test_rejects_non_positive_duration(self):
        with pytest.raises(InvalidInputError):
            Schedule([1.0, 0.0], [[1.0, 0.0], [0.0, 1.0]])

    def test_rejects_off_simplex(self):
        with pytest.raises(InvalidInputError):
            Schedule([1.0], [[0.6, 0.5]])
        with pytest.raises(InvalidInputError):
            Schedule([1.0], [[1.5, -0.5]])

    def test_rejects_shape_mismatch(self):
        with pytest.raises(DimensionError):
            Schedule([1.0, 2.0], [[1.0, 0.0]])

    def test_vertex_index_range(self):
        with pytest.raises(InvalidInputError):
            Schedule.vertex([1.0], [2], 2)

    def test_schedule_is_read_only(self):
        sched = Schedule.vertex([1.0, 2.0], [0, 1], 2)
        with pytest.raises(ValueError):
            sched.durations[0] = 5.0

    def test_fit_horizon_repeats_and_truncates(self):
        sched = Schedule.vertex([1.0, 0.5], [0, 1], 2).fit_horizon(4.0)
        assert sched.total == pytest.approx(4.0, abs=1e-12)
        np.testing.assert_allclose(sched.durations, [1.0, 0.5, 1.0, 0.5, 1.0])
        np.testing.assert_array_equal(sched.vertex_indices, [0, 1, 0, 1, 0])

    def test_fit_horizon_shortens(self):
        sched = Schedule.vertex([3.0], [1], 2).fit_horizon(1.25)
        np.testing.assert_allclose(sched.durations, [1.25])

    def test_fit_horizon_just_past_a_whole_repeat(self):
        horizon = 30.0 + 5e-12
        sched = Schedule.vertex([10.0], [0], 2).fit_horizon(horizon)
        assert sched.durations.size == 3
        assert sched.total == pytest.approx(horizon, abs=1e-12)

    def test_trajectory_rejects_unordered_times(self):
        with pytest.raises(InvalidInputError):
            Trajectory([0.0, 0.5, 0.5], np.zeros((3, 2)))

    def test_law_leaving_simplex(self):
        law = MeasurableLaw.from_alpha(lambda t: 2.0 * np.asarray(t))
        with pytest.raises(InvalidInputError):
            law.evaluate([0.9])

    def test_system_rejects_mixed_dims(self):
        with pytest.raises(DimensionError):
            SwitchingSystem((np.eye(2), np.eye(3)))


class TestChatterDiscretize:
    """Vertex schedules with the law's occupation times window by window."""

    def test_constant_law_single_window(self):
        sched = chatter_discretize(MeasurableLaw.constant([0.5, 0.5]), 1.0, 1)
        np.testing.assert_allclose(sched.durations, [0.5, 0.5], atol=1e-15)
        np.testing.assert_array_equal(sched.vertex_indices, [0, 1])

    def test_linear_law_two_windows(self):
        """alpha(t) = t: generator 1 gets 1/8 then 3/8."""
        sched = chatter_discretize(MeasurableLaw.from_alpha(lambda t: t), 1.0, 2)
        np.testing.assert_allclose(sched.durations, [3 / 8, 1 / 8, 1 / 8, 3 / 8], atol=1e-12)
        np.testing.assert_array_equal(sched.vertex_indices, [0, 1, 0, 1])

    def test_window_integrals_match_exact(self):
        integrals = window_integrals(MeasurableLaw.from_alpha(lambda t: t), 1.0, 2)
        np.testing.assert_allclose(integrals, [[3 / 8, 1 / 8], [1 / 8, 3 / 8]], atol=1e-12)

    def test_zero_pieces_dropped(self):
        sched = chatter_discretize(MeasurableLaw.constant([1.0, 0.0]), 2.0, 4)
        assert sched.pieces == 4
        assert np.all(sched.vertex_indices == 0)

    def test_total_and_occupation(self, smooth_laws):
        T, k = 2.0, 50
        h = T / k
        for law in smooth_laws:
            sched = chatter_discretize(law, T, k)
            assert sched.is_vertex
            assert sched.total == pytest.approx(T, abs=1e-12)
            mids = sched.boundaries[:-1] + 0.5 * sched.durations
            occupation = np.zeros((k, 2))
            np.add.at(occupation, (np.floor(mids / h).astype(int), sched.vertex_indices), sched.durations)
            np.testing.assert_allclose(occupation, window_integrals(law, T, k), atol=1e-9)


class TestRequiredK:
    """The window count bound."""

    def test_formula_example(self):
        """max ||A_i|| = 2, T = 1, ||x0|| = 1, eps = 0.1."""
        sys = SwitchingSystem((np.diag([2.0, -1.0]),))
        consts = discretization_constants(0.1, 1.0, 1.0, sys)
        assert consts.C == pytest.approx(3.0)
        assert consts.K == pytest.approx(3.0 * math.exp(3.0))
        assert consts.k == math.ceil(360.0 * math.exp(6.0))

    def test_least_integer(self):
        sys = system_A()
        for eps in (1.0, 0.3, 1e-2):
            c = discretization_constants(eps, 2.0, 1.0, sys)
            need = 4.0 * c.C * c.K * 2.0 * math.exp(c.C * 2.0)
            assert c.k * eps >= need
            assert (c.k - 1) * eps < need

    def test_nonincreasing_in_eps(self):
        ks = [required_k(eps, 2.0, 1.0, system_A()) for eps in (1e-3, 1e-2, 1e-1, 1.0)]
        assert ks == sorted(ks, reverse=True)

    def test_overflow(self):
        with pytest.raises(RangeError):
            required_k(1e-300, 2.0, 1.0, system_A())

    def test_non_positive(self):
        with pytest.raises(InvalidInputError):
            required_k(0.0, 1.0, 1.0, system_A())

    @pytest.mark.slow
    @pytest.mark.acceptance
    @pytest.mark.parametrize('eps', [1e-1, 1e-2])
    def test_discretization_accuracy(self, smooth_laws, eps):
        """Chattered endpoint within eps of an RK4 reference at T = 2."""
        sys, T, x0 = system_A(), 2.0, np.array([1.0, 0.0])
        k = required_k(eps, T, 1.0, sys)
        for law in smooth_laws:
            approx = propagate(sys, chatter_discretize(law, T, k), x0)
            reference = reference_solve(sys, law, x0, T, step=1e-5)
            assert np.linalg.norm(approx - reference) <= eps, law.label


class TestShift:
    """A -> A - mu I."""

    def test_zero_shift_is_identity(self):
        sys = system_A()
        assert shift(sys, 0.0) is sys

    def test_shift_gives_B(self, lam, sys_B):
        shifted = shift(system_B_prime(), lam)
        for G, H in zip(shifted.generators, sys_B.generators):
            np.testing.assert_allclose(G, H, atol=1e-15)
        np.testing.assert_allclose(sys_B.generators[0], [[-lam, -2.0], [0.5, -lam]], atol=1e-15)

    def test_eigenvalues_move(self):
        shifted = shift(SwitchingSystem((B0_PRIME,)), 0.3)
        np.testing.assert_allclose(np.sort_complex(eigenvalues(shifted.generators[0])),
                                   np.sort_complex(eigenvalues(B0_PRIME) - 0.3), atol=1e-14)


class TestTensorFactorisation:
    """X-trajectories from u (x) v are x(t) (x) y(t)."""

    def test_split_schedule_weights(self):
        sched = Schedule([1.0, 2.0], [[0.2, 0.3, 0.5], [0.0, 0.0, 1.0]])
        sa, sb = split_tensor_schedule(sched)
        np.testing.assert_allclose(sa.weights, [[0.5, 0.5], [0.0, 1.0]])
        np.testing.assert_allclose(sb.weights, [[0.5, 0.2, 0.3], [1.0, 0.0, 0.0]])

    def test_evolution_factors(self, sys_A, sys_B0, sys_X):
        rng = np.random.default_rng(9)
        sched = Schedule(rng.uniform(0.05, 0.5, 25), rng.dirichlet(np.ones(3), 25))
        sa, sb = split_tensor_schedule(sched)
        u, v = np.array([1.0, 0.5]), np.array([0.3, -1.0])
        z = propagate(sys_X, sched, kron(u, v))
        x, y = propagate(sys_A, sa, u), propagate(sys_B0, sb, v)
        np.testing.assert_allclose(z, kron(x, y), atol=1e-8)

    def test_lift_weights(self):
        lawA = MeasurableLaw.from_alpha(lambda t: 0.5 * np.ones_like(t))
        lawB0 = MeasurableLaw.constant([0.5, 0.2, 0.3])
        lifted = tensor_lift(lawA, lawB0)
        np.testing.assert_allclose(lifted(1.0), [0.2, 0.3, 0.5])

    def test_lift_rejects_disagreeing_laws(self):
        lifted = tensor_lift(MeasurableLaw.constant([0.5, 0.5]), MeasurableLaw.constant([0.1, 0.4, 0.5]))
        with pytest.raises(InvalidInputError):
            lifted(0.0)

    def test_lift_rejects_sizes(self):
        with pytest.raises(DimensionError):
            tensor_lift(MeasurableLaw.constant([0.2, 0.3, 0.5]), MeasurableLaw.constant([0.5, 0.5]))
