"""Closed-form layer tests: thresholds, transmission times, marginals."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_instance
from coopsense.analysis import (
    hat_omega,
    limit_allocation,
    marginal_curve,
    marginal_time,
    necessity_check,
    tau_from_energy,
)
from coopsense.errors import InfeasibleAllocationError
from coopsense.numerics import energy_time_kernel


class TestNecessityCheck:
    def test_reference_scenario(self, default_instance):
        verdict = necessity_check(default_instance)
        assert verdict.x_star == pytest.approx(1970.055, rel=1e-4)
        assert verdict.threshold == pytest.approx(150.0)
        assert verdict.overlap_possible

    def test_small_budget_rules_overlap_out(self):
        inst = make_instance(energy_budget=0.1)
        verdict = necessity_check(inst)
        assert verdict.x_star < verdict.threshold
        assert not verdict.overlap_possible

    def test_x_star_solves_defining_equation(self, default_instance):
        v = necessity_check(default_instance)
        lhs = 20e6 * v.x_star / (1e5 * math.log2(1.0 + v.x_star))
        assert lhs == pytest.approx(1.0 * (9e3 + 1.2e4 + 1.5e4), rel=1e-9)

    def test_degenerate_tiny_budget(self):
        inst = make_instance(energy_budget=1e-9)
        verdict = necessity_check(inst)
        assert verdict.x_star == 0.0
        assert not verdict.overlap_possible


class TestHatOmega:
    def test_reference_value(self, default_instance):
        # Mass at which full power exactly drains 1 J on the weakest channel.
        assert hat_omega(9e3, default_instance, 1.0) == pytest.approx(
            3.2538973, rel=1e-6
        )

    def test_energy_balance_at_threshold(self, default_instance):
        w = hat_omega(9e3, default_instance, 1.0)
        t = 1.0 / (1e5 * math.log2(91.0))
        assert w * 20e6 * t * 0.01 == pytest.approx(1.0, rel=1e-12)

    def test_rejects_bad_args(self, default_instance):
        with pytest.raises(ValueError):
            hat_omega(0.0, default_instance, 1.0)
        with pytest.raises(ValueError):
            hat_omega(9e3, default_instance, -1.0)


class TestTauFromEnergy:
    def test_max_power_branch(self, default_instance):
        t = tau_from_energy(0.5, 9e3, 1.0, default_instance)
        assert t == pytest.approx(1.5366188628986423e-06, rel=1e-12)
        assert t == pytest.approx(default_instance.per_bit_floor(1), rel=1e-12)

    def test_binding_branch_spends_exact_budget(self, default_instance):
        # Above the threshold the optimum spends every joule; the energy
        # identity omega*C*g(tau)/gamma == E is an independent oracle.
        cases = [(0.5, 9e3, 0.1), (0.9, 1.5e4, 0.1), (4.0, 9e3, 1.0)]
        for omega, gain, energy in cases:
            t = tau_from_energy(omega, gain, energy, default_instance)
            spent = omega * 20e6 * energy_time_kernel(t, 1e5) / gain
            assert spent == pytest.approx(energy, rel=1e-8)

    def test_binding_branch_reference_value(self, default_instance):
        assert tau_from_energy(0.5, 9e3, 0.1, default_instance) == pytest.approx(
            1.750816348801852e-06, rel=1e-9
        )

    def test_monotone_in_mass(self, default_instance):
        taus = [
            tau_from_energy(w, 9e3, 0.1, default_instance)
            for w in (0.1, 0.3, 0.5, 0.7, 0.9)
        ]
        assert all(a <= b + 1e-18 for a, b in zip(taus, taus[1:]))

    def test_infeasible_beyond_shannon_limit(self, default_instance):
        # gamma=9e3, E=0.01: the zero-power limit needs more than 0.01 J
        # for the full mission.
        with pytest.raises(InfeasibleAllocationError):
            tau_from_energy(1.0, 9e3, 0.01, default_instance)

    @given(
        omega=st.floats(min_value=0.01, max_value=1.0),
        energy=st.floats(min_value=0.05, max_value=2.0),
    )
    @settings(max_examples=200, deadline=None)
    def test_energy_identity_property(self, omega, energy):
        inst = make_instance()
        t = tau_from_energy(omega, 9e3, energy, inst)
        spent = omega * 20e6 * energy_time_kernel(t, 1e5) / 9e3
        assert spent <= energy * (1.0 + 1e-8)


class TestMarginalTime:
    def test_constant_in_max_power_regime(self, default_instance):
        a = marginal_time(0.5, 9e3, 1.0, default_instance)
        b = marginal_time(1.0, 9e3, 1.0, default_instance)
        assert a == pytest.approx(b, rel=1e-12)
        assert a == pytest.approx(20e6 * default_instance.per_bit_floor(1), rel=1e-12)

    def test_matches_finite_difference_in_binding_branch(self, default_instance):
        # Central difference of omega * C * tau(omega), well inside the
        # energy-binding branch.
        for omega, gain, energy in [(0.6, 9e3, 0.1), (1.2, 1.5e4, 0.1)]:
            h = omega * 1e-7

            def tx_time(w):
                return w * 20e6 * tau_from_energy(w, gain, energy, default_instance)

            fd = (tx_time(omega + h) - tx_time(omega - h)) / (2.0 * h)
            assert marginal_time(omega, gain, energy, default_instance) == pytest.approx(
                fd, rel=1e-6
            )

    def test_upward_jump_at_threshold(self, default_instance):
        # The derivative is discontinuous at the max-power threshold: the
        # binding branch starts strictly steeper.
        w_hat = hat_omega(9e3, default_instance, 0.1)
        below = marginal_time(w_hat * (1.0 - 1e-9), 9e3, 0.1, default_instance)
        above = marginal_time(w_hat * (1.0 + 1e-9), 9e3, 0.1, default_instance)
        assert above > below * 1.01

    def test_nondecreasing_overall(self, default_instance):
        ws = [0.05 * k for k in range(1, 20)]
        ms = [marginal_time(w, 9e3, 0.1, default_instance) for w in ws]
        assert all(a <= b + 1e-12 for a, b in zip(ms, ms[1:]))

    def test_curve_constants(self, default_instance):
        curve = marginal_curve(1, default_instance)
        assert curve.uav == 1
        assert curve.hat_omega == pytest.approx(hat_omega(9e3, default_instance, 1.0))
        assert curve.coeff_a == pytest.approx(
            20e6 * math.log(2.0) / (1e5 * 9e3 * 1.0), rel=1e-12
        )


class TestLimitAllocation:
    def test_extremes_and_interior(self):
        assert limit_allocation(make_instance(workload=1e-9)) == 1.0
        assert limit_allocation(make_instance(workload=1e5)) == 0.0
        assert limit_allocation(make_instance(workload=2.0)) is None
