"""
Headline Results

End-to-end reproductions of the construction's numbers: the 4^n product
identity, extremality of both planar norms on large sample sets, and the
marginal-stability evidence for the 4D system.
"""

import numpy as np
import pytest

from switchgrade.catalog import B0_PRIME, B1_PRIME
from switchgrade.lyapunov import default_grid, growth_envelope, lambda_lower_product_search, lambda_upper_extremal
from switchgrade.matexp import expm, opnorm

pytestmark = pytest.mark.acceptance


class TestProductIdentity:
    """Quarter turns of the rotating pair multiply to diag(-4, -1/4)."""

    def test_powers_grow_like_four_to_the_n(self):
        P = expm(B0_PRIME, np.pi / 2) @ expm(B1_PRIME, np.pi / 2)
        np.testing.assert_allclose(P, np.diag([-4.0, -0.25]), atol=1e-14)
        M = np.eye(2)
        for n in range(1, 11):
            M = M @ P
            assert abs(opnorm(M) / 4.0 ** n - 1.0) <= 1e-9


class TestExtremality:
    """Both planar extremal norms survive 200 sample directions."""

    def test_norm_B_on_B0(self, sys_B0, norm_B):
        report = lambda_upper_extremal(sys_B0, norm_B, 0.0, samples=200, slack=1e-9)
        assert report.passed
        assert report.samples == 200

    def test_slightly_negative_mu_fails(self, sys_B0, norm_B):
        assert not lambda_upper_extremal(sys_B0, norm_B, -0.01, samples=200).passed


@pytest.mark.slow
class TestMarginalStability:
    """X neither grows nor decays."""

    def test_growth_envelope_is_bounded(self, sys_X):
        envelope = growth_envelope(sys_X, schedules=500, duration=50.0, seed=0)
        assert np.isfinite(envelope['C'])
        assert envelope['C'] <= 2.0
        assert envelope['schedules'] == 500

    def test_longer_schedules_stay_inside_the_envelope(self, sys_X):
        assert growth_envelope(sys_X, schedules=100, duration=150.0, seed=1)['C'] <= 2.0

    def test_product_search_rate_is_zero(self, sys_X):
        estimate = lambda_lower_product_search(sys_X, 40.0, default_grid(64), 32)
        assert -5e-3 <= estimate.lower <= 5e-3
