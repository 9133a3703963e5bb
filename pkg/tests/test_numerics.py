"""Special-function tests: Lambert-W branches, bisection, energy kernel.

The Lambert-W implementation is compared against scipy.special.lambertw
(an independent implementation) and against the defining identity
w * exp(w) = y, which needs no reference library at all.
"""

import math

import pytest
import scipy.special
from hypothesis import given, settings
from hypothesis import strategies as st

from coopsense.errors import BracketError
from coopsense.numerics import (
    RootBracket,
    bisect,
    energy_time_kernel,
    energy_time_kernel_grad,
    energy_time_kernel_hess,
    lambert_w0,
    lambert_w_minus1,
)

_INV_E = math.exp(-1.0)


class TestLambertWMinus1:
    def test_against_scipy(self):
        ys = [-0.36, -0.3, -0.1, -1e-3, -1e-6, -1e-12, -1e-100]
        for y in ys:
            ref = float(scipy.special.lambertw(y, k=-1).real)
            assert lambert_w_minus1(y) == pytest.approx(ref, rel=1e-10, abs=1e-10)

    def test_near_branch_point_identity(self):
        # scipy loses accuracy just above -1/e; the defining identity is
        # the better oracle there.  W ~ -1 - sqrt(2e*(y + 1/e)).
        y = -_INV_E + 1e-12
        w = lambert_w_minus1(y)
        assert w == pytest.approx(-1.0 - math.sqrt(2.0 * math.e * 1e-12), rel=1e-5)
        assert w * math.exp(w) == pytest.approx(y, rel=1e-12)

    def test_defining_identity(self):
        for y in [-0.35, -0.2, -0.05, -1e-4, -1e-8]:
            w = lambert_w_minus1(y)
            assert w <= -1.0
            assert w * math.exp(w) == pytest.approx(y, rel=1e-10)

    def test_branch_point(self):
        assert lambert_w_minus1(-_INV_E) == pytest.approx(-1.0, abs=1e-7)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            lambert_w_minus1(0.0)
        with pytest.raises(ValueError):
            lambert_w_minus1(0.5)
        with pytest.raises(ValueError):
            lambert_w_minus1(-1.0)

    @given(st.floats(min_value=-30.0, max_value=-1.0001))
    @settings(max_examples=300, deadline=None)
    def test_round_trip_from_w(self, w):
        # Forward map w -> w e^w lands in [-1/e, 0); inverting must
        # recover w to near machine precision.  Within ~1e-6 of the branch
        # point the inverse is square-root ill-conditioned in float64, so
        # the strict round trip stays away from it (endpoint tested below).
        y = w * math.exp(w)
        recovered = lambert_w_minus1(y)
        assert recovered == pytest.approx(w, rel=1e-10, abs=1e-10)

    def test_round_trip_endpoint(self):
        assert lambert_w_minus1(-1.0 * math.exp(-1.0)) == -1.0


class TestLambertW0:
    def test_against_scipy(self):
        ys = [-_INV_E + 1e-12, -0.3, -1e-6, 0.0, 1e-6, 0.5, 1.0, 10.0, 1e6]
        for y in ys:
            ref = float(scipy.special.lambertw(y, k=0).real)
            assert lambert_w0(y) == pytest.approx(ref, rel=1e-10, abs=1e-12)

    @given(st.floats(min_value=-1.0, max_value=20.0))
    @settings(max_examples=300, deadline=None)
    def test_round_trip_from_w(self, w):
        y = w * math.exp(w)
        assert lambert_w0(y) == pytest.approx(w, rel=1e-9, abs=1e-9)


class TestBisect:
    def test_linear_root(self):
        root = bisect(lambda x: x - 3.25, RootBracket(0.0, 10.0))
        assert root == pytest.approx(3.25, abs=1e-10)

    def test_exact_endpoint(self):
        assert bisect(lambda x: x, RootBracket(0.0, 1.0)) == 0.0

    def test_no_sign_change(self):
        with pytest.raises(BracketError):
            bisect(lambda x: x * x + 1.0, RootBracket(-1.0, 1.0))

    def test_bad_bracket(self):
        with pytest.raises(ValueError):
            RootBracket(2.0, 1.0)


class TestEnergyTimeKernel:
    B = 1e5

    def test_positive_and_decreasing(self):
        ts = [1e-7, 1e-6, 1e-5, 1e-4, 1e-3]
        vals = [energy_time_kernel(t, self.B) for t in ts]
        assert all(v > 0.0 for v in vals)
        assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_large_time_limit(self):
        # g(t) -> ln2 / B from above as t -> infinity.
        limit = math.log(2.0) / self.B
        assert energy_time_kernel(1e3, self.B) == pytest.approx(limit, rel=1e-6)
        assert energy_time_kernel(1e3, self.B) > limit

    def test_grad_matches_finite_difference(self):
        for t in [2e-6, 1e-5, 1e-4]:
            h = t * 1e-6
            fd = (
                energy_time_kernel(t + h, self.B) - energy_time_kernel(t - h, self.B)
            ) / (2.0 * h)
            assert energy_time_kernel_grad(t, self.B) == pytest.approx(fd, rel=1e-5)

    def test_hess_matches_finite_difference(self):
        for t in [2e-6, 1e-5, 1e-4]:
            h = t * 1e-5
            fd = (
                energy_time_kernel_grad(t + h, self.B)
                - energy_time_kernel_grad(t - h, self.B)
            ) / (2.0 * h)
            assert energy_time_kernel_hess(t, self.B) == pytest.approx(fd, rel=1e-4)

    def test_grad_negative_hess_positive(self):
        for t in [1e-6, 1e-5, 1e-2]:
            assert energy_time_kernel_grad(t, self.B) < 0.0
            assert energy_time_kernel_hess(t, self.B) > 0.0

    def test_overflow_guard(self):
        # Far below any practical per-bit time the kernel saturates to inf
        # instead of overflowing.
        assert energy_time_kernel(1e-30, self.B) == math.inf
        assert energy_time_kernel_grad(1e-30, self.B) == -math.inf
        assert energy_time_kernel_hess(1e-30, self.B) == math.inf

    def test_rejects_nonpositive_time(self):
        for fn in (energy_time_kernel, energy_time_kernel_grad, energy_time_kernel_hess):
            with pytest.raises(ValueError):
                fn(0.0, self.B)
            with pytest.raises(ValueError):
                fn(-1.0, self.B)
