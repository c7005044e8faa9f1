import math

import numpy as np
import pytest

from gelsolve.characteristics import (
    ArmsFlow,
    G_map,
    H_map,
    SolverConfig,
    alpha_beta_trajectory,
    alpha_via_gamma,
    beta_infinity,
    bisect_increasing,
    ell_smolu,
    gel_time,
    l_flory,
    m_crit,
)
from gelsolve.errors import DomainError, ModelError, SolverError
from gelsolve.measures import (
    ArmMeasure,
    ExponentialDensity,
    Monodisperse,
    PowerLawDensity,
)

MU = {0: 0.5, 1: 0.25, 3: 0.25}
ARM = ArmMeasure.monodisperse(MU)
FAST = SolverConfig(ode_dt=0.01)


def test_solver_config_validation():
    with pytest.raises(DomainError):
        SolverConfig(root_tol=0.0)
    with pytest.raises(DomainError):
        SolverConfig(ode_dt=-1.0)


class TestBisection:
    def test_simple_root(self):
        r = bisect_increasing(lambda x: x * x, 0.0, 2.0, 2.0, tol=1e-12)
        assert r == pytest.approx(math.sqrt(2.0), abs=1e-11)

    def test_endpoint_never_evaluated(self):
        def f(x):
            if x in (0.0, 1.0):
                raise AssertionError("endpoint touched")
            return x

        assert bisect_increasing(f, 0.0, 1.0, 0.5, tol=1e-10) == pytest.approx(0.5)

    def test_nonconvergence(self):
        with pytest.raises(SolverError):
            bisect_increasing(lambda x: x, 0.0, 1.0, 0.5, tol=1e-12, max_iter=3)


class TestGelTime:
    def test_monodisperse(self):
        assert gel_time(Monodisperse()) == 1.0

    def test_arms(self):
        assert gel_time(ARM) == 2.0  # 1/(K - A0) = 1/0.5

    def test_infinite_second_moment(self):
        assert gel_time(PowerLawDensity(1.5)) == 0.0

    def test_subcritical_arms(self):
        sub = ArmMeasure.monodisperse({1: 1.0})  # K = 0 <= A0
        assert gel_time(sub) == math.inf


class TestEllSmolu:
    def test_pre_gel_is_one(self):
        assert ell_smolu(0.5, Monodisperse()) == 1.0

    def test_monodisperse_post_gel(self):
        assert ell_smolu(2.0, Monodisperse()) == pytest.approx(0.5, abs=1e-11)

    def test_exponential_post_gel(self):
        # x g0'(x) = 2/(1 - ln x)^3 = 1/4 gives 1 - ln x = 2
        val = ell_smolu(4.0, ExponentialDensity())
        assert val == pytest.approx(math.exp(-1.0), abs=1e-11)

    def test_nonincreasing_and_continuous(self):
        grid = np.linspace(0.5, 6.0, 56)
        vals = [ell_smolu(t, Monodisperse()) for t in grid]
        diffs = np.diff(vals)
        assert (diffs <= 1e-12).all()
        assert (np.abs(diffs) < 0.2).all()

    def test_negative_time(self):
        with pytest.raises(DomainError):
            ell_smolu(-1.0, Monodisperse())


class TestMCrit:
    def test_matches_ell(self):
        assert m_crit(2.0, Monodisperse()) == pytest.approx(0.5, abs=1e-11)
        assert m_crit(4.0, ExponentialDensity()) == pytest.approx(
            math.exp(-1.0), abs=1e-11
        )

    def test_rejected_at_gel_time(self):
        with pytest.raises(DomainError):
            m_crit(1.0, Monodisperse())


class TestLFlory:
    def test_pre_gel_is_one(self):
        assert l_flory(0.5, Monodisperse()) == 1.0

    def test_fixed_point_value(self):
        # reference by fixed-point iteration of l = e^{-2(1-l)}
        l = 0.5
        for _ in range(200):
            l = math.exp(-2.0 * (1.0 - l))
        assert l_flory(2.0, Monodisperse()) == pytest.approx(l, abs=1e-10)

    def test_below_critical_point(self):
        t = 3.0
        assert l_flory(t, Monodisperse()) < m_crit(t, Monodisperse())

    def test_infinite_mass_rejected(self):
        with pytest.raises(ModelError):
            l_flory(2.0, PowerLawDensity(1.5))

    def test_tiny_root_relative_accuracy(self):
        # l ~ e^{-t} for large t on monodisperse data; absolute bisection
        # alone cannot see this
        t = 40.0
        l = l_flory(t, Monodisperse())
        assert l == pytest.approx(math.exp(-t * (1.0 - l)), rel=1e-10)


class TestGH:
    def test_g_at_one(self):
        assert G_map(ARM, 1.0) == pytest.approx(1.0 / 3.0)

    def test_g_zero_of_tangency_point(self):
        assert G_map(ARM, 1.0 / math.sqrt(3.0)) == pytest.approx(0.0, abs=1e-14)

    def test_g_below_identity(self):
        for x in (0.1, 0.4, 0.7, 0.95):
            assert G_map(ARM, x) < x

    def test_h_round_trip(self):
        assert H_map(ARM, G_map(ARM, 0.5)) == pytest.approx(0.5, abs=1e-11)

    def test_h_of_zero(self):
        assert H_map(ARM, 0.0) == pytest.approx(1.0 / math.sqrt(3.0), abs=1e-11)

    def test_h_domain(self):
        with pytest.raises(DomainError):
            H_map(ARM, 1.0 / 3.0)  # the G(1) limit is excluded
        # for this ARM, G(0+) = -inf, so any negative u is still in range
        assert H_map(ARM, -10.0) < 0.1
        finite_bottom = ArmMeasure.monodisperse({2: 0.25, 3: 0.25})  # G(0) = 0
        with pytest.raises(DomainError):
            H_map(finite_bottom, -1.0)

    def test_degenerate_kernel_rejected(self):
        flat = ArmMeasure.monodisperse({1: 0.5, 2: 0.25})  # k0'' == 0
        with pytest.raises(DomainError):
            G_map(flat, 0.5)


class TestArmsFlow:
    def test_initial_state(self):
        st = ArmsFlow(ARM, FAST).state(0.0)
        assert (st.alpha, st.beta, st.ell) == (1.0, 0.0, 1.0)

    def test_pre_gel_closed_form(self):
        flow = ArmsFlow(ARM, FAST)
        for t in (0.5, 1.0, 1.7, 2.0):
            st = flow.state(t)
            assert st.alpha == pytest.approx(1.0 + t, abs=1e-12)
            assert st.beta == pytest.approx(t / (1.0 + t), abs=1e-12)

    def test_alpha_beta_monotone(self):
        states = alpha_beta_trajectory(ARM, 6.0, FAST)
        alphas = [s.alpha for s in states]
        betas = [s.beta for s in states]
        assert all(a <= b + 1e-12 for a, b in zip(alphas, alphas[1:]))
        assert all(a <= b + 1e-12 for a, b in zip(betas, betas[1:]))

    def test_alpha_ode_slope(self):
        # d(alpha)/dt should equal k0(ell_t, 1)
        flow = ArmsFlow(ARM, FAST)
        h = 1e-3
        for t in (2.5, 3.0, 4.0):
            fd = (flow.state(t + h).alpha - flow.state(t - h).alpha) / (2 * h)
            st = flow.state(t)
            assert fd == pytest.approx(ARM.k0(st.ell, 1.0), abs=1e-6)

    def test_arm_count_bound(self):
        # k0(ell_t, 1)/alpha_t <= A0/(1 + t A0)
        flow = ArmsFlow(ARM, FAST)
        for t in np.linspace(0.0, 6.0, 25):
            st = flow.state(t)
            a_t = ARM.k0(st.ell, 1.0) / st.alpha
            assert a_t <= 1.0 / (1.0 + t) + 1e-9

    def test_continuity_at_gel_time(self):
        flow = ArmsFlow(ARM, FAST)
        below = flow.state(2.0)
        above = flow.state(2.0 + 1e-6)
        assert above.alpha == pytest.approx(below.alpha, abs=1e-5)
        assert above.ell == pytest.approx(1.0, abs=1e-2)

    def test_out_of_order_queries_consistent(self):
        a = ArmsFlow(ARM, FAST)
        v1 = a.state(4.0).alpha
        v2 = a.state(3.0).alpha
        b = ArmsFlow(ARM, FAST)
        assert b.state(3.0).alpha == pytest.approx(v2, abs=1e-12)
        assert b.state(4.0).alpha == pytest.approx(v1, abs=1e-12)


def test_alpha_gamma_cross_check():
    ode = ArmsFlow(ARM, FAST).state(4.0).alpha
    quad = alpha_via_gamma(ARM, 4.0, FAST)
    assert quad == pytest.approx(ode, abs=1e-9)


def test_beta_infinity():
    # analytic limit c/k0(c) with c = 1/sqrt(3)
    assert beta_infinity(ARM, 200.0, SolverConfig(ode_dt=0.05)) == pytest.approx(
        2.0 / math.sqrt(3.0), abs=1e-8
    )


def test_beta_infinity_no_gelation():
    sub = ArmMeasure.monodisperse({1: 1.0})
    assert beta_infinity(sub, 10.0, FAST) == 1.0
