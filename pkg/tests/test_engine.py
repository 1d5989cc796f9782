import math

import numpy as np
import pytest

from swarmdyn import (
    BangBang,
    Constant,
    ContinuousRarest,
    IntegratorConfig,
    NegativityViolation,
    NonFiniteState,
    NotConvergedError,
    StepSizeUnderflow,
    SwarmParams,
    find_steady_state,
    half_control_equilibrium,
    integrate,
    one_segment_equilibrium,
    one_segment_field,
    phase_field,
    two_segment_field,
)

FIG1_TARGET = np.array([12 / 19, 1 / 3, 1 / 3, 2.5])


def tight(t_end, **kwargs):
    return IntegratorConfig(rel_tol=1e-11, abs_tol=1e-13, t_end=t_end, **kwargs)


def test_bang_bang_reaches_shared_equilibrium(fig1_params):
    field = two_segment_field(fig1_params)
    traj = integrate(field, np.array([1.0, 0.2, 1.0, 0.5]), BangBang(), IntegratorConfig(t_end=40.0))
    assert traj.first_time(lambda x: abs(x[1] - x[2]) < 1e-6) is not None
    assert np.max(np.abs(traj.final_state - FIG1_TARGET)) < 1e-4


def test_equilibrium_start_stays_constant(fig1_params):
    field = two_segment_field(fig1_params)
    eq = half_control_equilibrium(fig1_params).as_array()
    traj = integrate(field, eq, Constant(0.5), tight(10.0))
    assert np.max(np.abs(traj.states - eq)) < 1e-9


def test_one_segment_convergence():
    p = SwarmParams(beta=2, gamma=3, lambda_l=2, lambda_s=1, delta=1, beta0=1)
    traj = integrate(one_segment_field(p), np.zeros(2), None, IntegratorConfig(t_end=60.0))
    assert traj.controls is None
    assert np.max(np.abs(traj.final_state - np.array(one_segment_equilibrium(p)))) < 1e-6


def test_find_steady_state_const_half(fig1_params):
    field = two_segment_field(fig1_params)
    x, t = find_steady_state(field, np.zeros(4), Constant(0.5), tight(100.0, steady_tol=1e-9))
    assert np.max(np.abs(x - FIG1_TARGET)) < 1e-6
    assert 0 < t < 100


def test_find_steady_state_immediate_when_tolerance_loose(fig1_params):
    field = two_segment_field(fig1_params)
    x0 = np.array([1.0, 1.0, 1.0, 1.0])
    x, t = find_steady_state(field, x0, Constant(0.5), IntegratorConfig(t_end=10.0, steady_tol=100.0))
    assert t == 0.0
    assert np.array_equal(x, x0)


def test_find_steady_state_not_converged_carries_state(fig1_params):
    field = two_segment_field(fig1_params)
    with pytest.raises(NotConvergedError) as info:
        find_steady_state(field, np.zeros(4), Constant(0.5), IntegratorConfig(t_end=0.5, steady_tol=1e-12))
    assert info.value.rhs_norm > 0
    assert info.value.state.shape == (4,)


def test_rk4_linear_decay_matches_exponential():
    # freezing every population except the seeders leaves dx_s/dt = ls - d x_s
    ls, d = 1.0, 2.0

    def field(x, u):
        return np.array([ls - d * x[0]])

    cfg = IntegratorConfig(method="rk4", step=0.01, t_end=10.0)
    traj = integrate(field, np.array([3.0]), None, cfg)
    expected = ls / d + (3.0 - ls / d) * np.exp(-d * traj.times)
    assert np.max(np.abs(traj.states[:, 0] - expected)) < 1e-8


def test_rk4_step_halving_improves_terminal_state(fig1_params):
    field = two_segment_field(fig1_params)
    x0 = np.array([1.0, 0.2, 1.0, 0.5])
    coarse = integrate(field, x0, Constant(0.5), IntegratorConfig(method="rk4", step=0.2, t_end=5.0))
    fine = integrate(field, x0, Constant(0.5), IntegratorConfig(method="rk4", step=0.1, t_end=5.0))
    reference = integrate(field, x0, Constant(0.5), tight(5.0))
    err_coarse = np.max(np.abs(coarse.final_state - reference.final_state))
    err_fine = np.max(np.abs(fine.final_state - reference.final_state))
    assert err_fine < err_coarse / 8  # fourth order: halving gains ~16x
    assert err_fine < 1e-5


def test_adaptive_tolerance_tightening_consistent(fig1_params):
    field = two_segment_field(fig1_params)
    x0 = np.array([1.0, 0.2, 1.0, 0.5])
    loose = integrate(field, x0, ContinuousRarest(), IntegratorConfig(rel_tol=1e-7, abs_tol=1e-9, t_end=5.0))
    tight_traj = integrate(field, x0, ContinuousRarest(), IntegratorConfig(rel_tol=1e-8, abs_tol=1e-10, t_end=5.0))
    assert np.max(np.abs(loose.final_state - tight_traj.final_state)) < 1e-6


def test_negative_undershoot_clamped():
    # drive a component to a value just below zero: clamps to exactly 0
    def field(x, u):
        return np.array([-1.0])

    cfg = IntegratorConfig(method="rk4", step=0.001, t_end=0.01, abs_tol=1e-2)
    traj = integrate(field, np.array([0.0095]), None, cfg)
    assert traj.final_state[0] == 0.0
    assert np.min(traj.states) >= 0.0


def test_negativity_violation_raises():
    def field(x, u):
        return np.array([-1.0])

    cfg = IntegratorConfig(method="rk4", step=0.1, t_end=1.0)
    with pytest.raises(NegativityViolation):
        integrate(field, np.array([0.05]), None, cfg)


def test_divergence_raises_non_finite():
    def field(x, u):
        return x * x  # finite-time blow-up

    with pytest.raises(NonFiniteState):
        integrate(field, np.array([1.0]), None, IntegratorConfig(rel_tol=1e-2, abs_tol=1e-2, t_end=2.0))


def test_chattering_underflows_step_size():
    # a pure switching field with no sliding band collapses the step
    def field(x, u):
        return np.array([-math.copysign(1e6, x[0])])

    with pytest.raises(StepSizeUnderflow):
        integrate(field, np.array([1.0]), None, IntegratorConfig(t_end=10.0))


def test_record_grid(fig1_params):
    field = two_segment_field(fig1_params)
    cfg = IntegratorConfig(t_end=1.0, record_every=0.1)
    traj = integrate(field, np.array([1.0, 0.2, 1.0, 0.5]), Constant(0.5), cfg)
    assert traj.times[0] == 0.0
    assert traj.times[-1] == pytest.approx(1.0, abs=1e-9)
    assert len(traj) == 11
    assert np.allclose(np.diff(traj.times), 0.1, atol=1e-9)


def test_zero_horizon_records_initial_state_only(fig1_params):
    field = two_segment_field(fig1_params)
    x0 = np.array([1.0, 0.2, 1.0, 0.5])
    traj = integrate(field, x0, Constant(0.5), IntegratorConfig(t_end=0.0))
    assert len(traj) == 1
    assert np.array_equal(traj.states[0], x0)


def test_trajectory_records_controls(fig1_params):
    field = two_segment_field(fig1_params)
    traj = integrate(field, np.array([1.0, 0.2, 1.0, 0.5]), BangBang(), IntegratorConfig(t_end=1.0))
    assert traj.controls is not None
    assert set(np.round(traj.controls, 6)) <= {0.0, 0.5, 1.0}
    assert traj.controls[0] == 1.0  # x_a(0) < x_b(0)


def test_trajectory_times_strictly_increasing(fig1_params):
    field = two_segment_field(fig1_params)
    traj = integrate(field, np.zeros(4), ContinuousRarest(), IntegratorConfig(t_end=20.0))
    assert np.all(np.diff(traj.times) > 0)
    assert np.min(traj.states) >= 0.0


def test_config_validation():
    with pytest.raises(ValueError):
        IntegratorConfig(method="euler")
    with pytest.raises(ValueError):
        IntegratorConfig(method="rk4")  # missing step
    with pytest.raises(ValueError):
        IntegratorConfig(t_end=-1.0)
    with pytest.raises(ValueError):
        IntegratorConfig(rel_tol=0.0)


class TestPhaseField:
    def test_corner_trajectories_reach_equilibrium(self, fig1_params):
        result = phase_field(
            fig1_params,
            BangBang(),
            (0.0, 2.0),
            (0.0, 2.0),
            resolution=5,
            cfg=IntegratorConfig(t_end=60.0),
        )
        assert len(result.trajectories) == 4
        for traj in result.trajectories:
            xf = traj.final_state
            assert abs(xf[1] - 1 / 3) < 1e-3
            assert abs(xf[2] - 1 / 3) < 1e-3

    def test_arrow_vanishes_at_equilibrium(self, fig1_params):
        eq = half_control_equilibrium(fig1_params)
        result = phase_field(
            fig1_params,
            ContinuousRarest(),
            (eq.x_a, 3 * eq.x_a),
            (eq.x_b, 3 * eq.x_b),
            resolution=3,
            corner_trajectories=False,
        )
        assert result.slaved == (pytest.approx(eq.x_l), pytest.approx(eq.x_s))
        assert abs(result.dx_a[0, 0]) < 1e-12
        assert abs(result.dx_b[0, 0]) < 1e-12

    def test_off_diagonal_neighbourhood_stays_bounded(self, skew_params):
        from swarmdyn import continuous_control_equilibria

        eqs = continuous_control_equilibria(skew_params)
        off = eqs.off_diagonal[1]  # (5.237, 0.772)
        x0 = off.as_array() * np.array([1.0, 1.001, 1.001, 1.0])
        field = two_segment_field(skew_params)
        traj = integrate(field, x0, ContinuousRarest(), IntegratorConfig(t_end=5.0))
        assert np.max(np.abs(traj.final_state - off.as_array())) < 0.2

    def test_grid_validation(self, fig1_params):
        with pytest.raises(ValueError):
            phase_field(fig1_params, BangBang(), (0.0, 0.0), (0.0, 2.0))
        with pytest.raises(ValueError):
            phase_field(fig1_params, BangBang(), (-1.0, 1.0), (0.0, 2.0))
        with pytest.raises(ValueError):
            phase_field(fig1_params, BangBang(), (0.0, 2.0), (0.0, 2.0), resolution=1)
