"""Coefficient validation and the difference operators."""

import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcayley.cayley_core import (
    BRANCH_DENOMINATOR,
    BRANCH_NUMERATOR,
    CayleyParams,
    Trajectory,
    ValidityStatus,
    cayley_average,
    constant_trajectory,
    jackson_derivative,
    residual,
    residual_noise_floor,
    step_ratio,
    validate,
)
from qcayley.exceptions import ForbiddenParameterError, ParameterError
from qcayley.lattice import LatticeWindow, iterate, point
from qcayley.scaled_complex import ScaledComplex

from conftest import rel_err, sc


def brute_force_validity(q, eta, w, k_limit=64, tol=1e-12):
    """Independent scan of both forbidden branches over k = 0..k_limit."""
    for k in range(k_limit + 1):
        f1 = -1.0 / ((1.0 - eta) * (q - 1.0) * q**k)
        if abs(w - f1) <= tol * abs(f1):
            return "forbidden", k, BRANCH_NUMERATOR
        if eta > 0.0:
            f2 = 1.0 / (eta * (q - 1.0) * q**k)
            if abs(w - f2) <= tol * abs(f2):
                return "forbidden", k, BRANCH_DENOMINATOR
    return "valid", None, None


class TestValidate:
    def test_first_branch_direct_substitution(self):
        v = validate(2.0, 0.0, -1.0)  # -1/((1)(1)(1))
        assert v.status is ValidityStatus.FORBIDDEN
        assert (v.k, v.branch) == (0, BRANCH_NUMERATOR)

    def test_second_branch_direct_substitution(self):
        v = validate(2.0, 0.25, 2.0)  # 1/(0.25 * 1 * 2) at k=1
        assert v.status is ValidityStatus.FORBIDDEN
        assert (v.k, v.branch) == (1, BRANCH_DENOMINATOR)

    def test_generic_complex_w_valid_vs_brute_force(self):
        v = validate(2.0, 0.3, 1 + 1j)
        assert v.status is ValidityStatus.VALID
        assert brute_force_validity(2.0, 0.3, 1 + 1j)[0] == "valid"

    def test_zero_w_always_valid(self):
        assert validate(3.0, 0.4, 0j).status is ValidityStatus.VALID

    def test_near_singular_within_relative_1e6(self):
        w = 2.0 * (1.0 + 1e-8)  # near the k=1 denominator value
        v = validate(2.0, 0.25, w)
        assert v.status is ValidityStatus.NEAR_SINGULAR
        assert v.k == 1
        assert v.distance == pytest.approx(1e-8, rel=1e-3)

    def test_eta_half_admitted(self):
        assert validate(2.0, 0.5, 10j).status is ValidityStatus.VALID
        # forbidden values exist at eta = 1/2 too
        assert validate(2.0, 0.5, 2.0).status is ValidityStatus.FORBIDDEN

    def test_range_errors(self):
        with pytest.raises(ParameterError):
            validate(1.0, 0.0, 1.0)
        with pytest.raises(ParameterError):
            validate(2.0, 0.6, 1.0)
        with pytest.raises(ParameterError):
            validate(2.0, -0.1, 1.0)

    @given(
        st.floats(min_value=1.05, max_value=3.0),
        st.floats(min_value=0.0, max_value=0.5),
        st.integers(min_value=0, max_value=12),
        st.booleans(),
    )
    @settings(max_examples=120)
    def test_every_forbidden_value_is_caught(self, q, eta, k, second_branch):
        if second_branch:
            if eta < 0.01:
                return
            w = 1.0 / (eta * (q - 1.0) * q**k)
            branch = BRANCH_DENOMINATOR
        else:
            w = -1.0 / ((1.0 - eta) * (q - 1.0) * q**k)
            branch = BRANCH_NUMERATOR
        v = validate(q, eta, w)
        assert v.status is ValidityStatus.FORBIDDEN
        assert (v.k, v.branch) == (k, branch)

    @given(
        st.floats(min_value=1.05, max_value=3.0),
        st.floats(min_value=0.0, max_value=0.45),
        st.floats(min_value=-8, max_value=8),
        st.floats(min_value=-8, max_value=8),
    )
    @settings(max_examples=150)
    def test_agrees_with_brute_force_and_conjugation(self, q, eta, wr, wi):
        w = complex(wr, wi)
        if w == 0:
            return
        v = validate(q, eta, w)
        brute = brute_force_validity(q, eta, w)
        if v.status is ValidityStatus.FORBIDDEN:
            assert brute == ("forbidden", v.k, v.branch)
        elif v.status is ValidityStatus.VALID:
            assert brute[0] == "valid"
        # forbidden values are real, so conjugating w cannot change the status
        assert validate(q, eta, w.conjugate()).status is v.status


class TestStepRatio:
    def test_w_zero_is_one(self):
        params = CayleyParams(q=2.0, eta=0.3, w=0j)
        for k in (0, 3, 17):
            r = step_ratio(params, point(2.0, k))
            assert r.to_complex() == 1 + 0j

    def test_hand_value(self):
        params = CayleyParams(q=2.0, eta=0.0, w=1.0)
        r = step_ratio(params, point(2.0, 0))
        assert r.to_complex() == 2 + 0j

    def test_eta_half_limit_is_minus_one(self):
        params = CayleyParams(q=2.0, eta=0.5, w=3 - 2j)
        r = step_ratio(params, point(2.0, 60))
        assert abs(r.to_complex() + 1.0) < 1e-6

    def test_forbidden_params_error(self):
        params = CayleyParams(q=2.0, eta=0.0, w=-1.0)
        with pytest.raises(ForbiddenParameterError):
            step_ratio(params, point(2.0, 0))


def scaled_traj(window, values):
    return Trajectory(window, tuple(ScaledComplex.from_complex(v) for v in values))


class TestOperators:
    def test_derivative_of_constant_is_zero(self):
        window = LatticeWindow(2.0, 6)
        traj = constant_trajectory(window, 5 - 2j)
        for k in range(6):
            assert jackson_derivative(traj, k).is_zero()

    def test_derivative_of_linear_is_one(self):
        window = LatticeWindow(2.0, 8)
        traj = scaled_traj(window, [2.0**k for k in range(9)])
        for k in range(8):
            assert jackson_derivative(traj, k).to_complex() == pytest.approx(1.0)

    def test_derivative_of_square_hand_value(self):
        window = LatticeWindow(3.0, 4)
        traj = scaled_traj(window, [(3.0**k) ** 2 for k in range(5)])
        assert jackson_derivative(traj, 0).to_complex() == pytest.approx(4.0)

    def test_average_eta_zero_picks_current(self):
        window = LatticeWindow(2.0, 4)
        traj = scaled_traj(window, [1, 2, 3, 4, 5])
        assert cayley_average(traj, 0.0, 2).to_complex() == 3 + 0j

    def test_average_of_constant(self):
        window = LatticeWindow(2.0, 4)
        traj = constant_trajectory(window, 7 + 1j)
        for eta in (0.0, 0.2, 0.5):
            assert rel_err(cayley_average(traj, eta, 1).to_complex(), 7 + 1j) < 1e-15

    def test_average_midpoint(self):
        window = LatticeWindow(2.0, 2)
        traj = scaled_traj(window, [2, 4, 8])
        assert cayley_average(traj, 0.5, 0).to_complex() == 3 + 0j

    def test_window_edge_errors(self):
        window = LatticeWindow(2.0, 3)
        traj = constant_trajectory(window, 1.0)
        with pytest.raises(ParameterError):
            jackson_derivative(traj, 3)
        with pytest.raises(ParameterError):
            cayley_average(traj, 0.2, 3)


class TestResidual:
    def test_exact_solution_has_zero_residual(self):
        from qcayley.solutions import product_solution

        rng = random.Random(31)
        for _ in range(25):
            q = 1.0 + 2.0 * rng.random()
            eta = 0.45 * rng.random()
            w = complex(rng.uniform(-3, 3), rng.uniform(-3, 3))
            params = CayleyParams(q=q, eta=eta, w=w)
            if params.validity.status is not ValidityStatus.VALID:
                continue
            window = LatticeWindow(q, 48)
            P = product_solution(params, window)
            E = residual(params, P)
            floors = residual_noise_floor(params, P)
            for k in range(window.k_max):
                # zero up to rounding noise scaled to the operands
                assert E[k].mag2() <= floors[k] - 33  # 2^-33 ~ 1.2e-10 relative

    def test_constant_trajectory_residual_is_minus_w_times_value(self):
        params = CayleyParams(q=2.0, eta=0.25, w=1.5)
        window = LatticeWindow(2.0, 12)
        eps = 0.7
        traj = constant_trajectory(window, eps / params.w)
        E = residual(params, traj)
        for k in range(window.k_max):
            assert rel_err(E[k].to_complex(), -eps) < 1e-12

    def test_round_trip_recovers_prescribed_forcing(self):
        from qcayley.solutions import PerturbationSpec, RandomPhase, synthesize

        params = CayleyParams(q=1.9, eta=0.2, w=0.8 - 0.6j)
        window = LatticeWindow(1.9, 64)
        bundle = synthesize(params, window, PerturbationSpec(0.3, RandomPhase(11)), 1j)
        E_rec = residual(params, bundle.phi)
        floors = residual_noise_floor(params, bundle.phi)
        for k in range(window.k_max):
            diff = (E_rec[k] - bundle.E[k]).mag2()
            scale = max(math.log2(0.3), floors[k])
            assert diff <= scale - 33

    def test_linearity(self):
        from qcayley.solutions import PerturbationSpec, RandomPhase, synthesize

        params = CayleyParams(q=2.2, eta=0.1, w=1 + 0.5j)
        window = LatticeWindow(2.2, 24)
        b1 = synthesize(params, window, PerturbationSpec(1.0, RandomPhase(1)), 0.5)
        b2 = synthesize(params, window, PerturbationSpec(1.0, RandomPhase(2)), -1j)
        a, b = 0.7 - 0.2j, -1.1 + 0.4j
        a_sc, b_sc = sc(a), sc(b)
        combo = Trajectory(
            window,
            tuple(a_sc * x + b_sc * y for x, y in zip(b1.phi.values, b2.phi.values)),
        )
        e1, e2, ec = (residual(params, t) for t in (b1.phi, b2.phi, combo))
        floors = residual_noise_floor(params, combo)
        for k in range(window.k_max):
            want = a_sc * e1[k] + b_sc * e2[k]
            diff_mag = (ec[k] - want).mag2()
            # relative to the larger of the value and the rounding scale
            scale = max(want.mag2(), floors[k])
            assert diff_mag <= scale + math.log2(1e-12)

    def test_recurrence_consistency_zero_residual(self):
        # values built via x(q^{k+1}) = r(q^k) x(q^k) satisfy the equation
        rng = random.Random(5150)
        for _ in range(10):
            q = 1.0 + 2.0 * rng.random()
            params = CayleyParams(
                q=q,
                eta=0.45 * rng.random(),
                w=complex(rng.uniform(-2, 2), rng.uniform(-2, 2)),
            )
            if params.validity.status is not ValidityStatus.VALID:
                continue
            window = LatticeWindow(q, 32)
            acc = sc(rng.uniform(-1, 1) + 1j * rng.uniform(-1, 1))
            values = [acc]
            for pt in iterate(window)[:-1]:
                acc = acc * step_ratio(params, pt)
                values.append(acc)
            traj = Trajectory(window, tuple(values))
            E = residual(params, traj)
            floors = residual_noise_floor(params, traj)
            for k in range(window.k_max):
                assert E[k].mag2() <= floors[k] - 33

    def test_trajectory_length_validation(self):
        with pytest.raises(ParameterError):
            Trajectory(LatticeWindow(2.0, 3), (sc(1.0),) * 3)
