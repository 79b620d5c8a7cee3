"""
Structural Certificate Tests

Hurwitz tests, spectral abscissa, algebra rank and irreducibility for the
planar systems and their 4D lift.
"""

import numpy as np
import pytest

from switchgrade.catalog import A0, A1, system_A
from switchgrade.errors import InconclusiveError, InvalidInputError
from switchgrade.matexp import expm, kron, opnorm
from switchgrade.models import SwitchingSystem
from switchgrade.spectral import (algebra_closure_rank, common_invariant_subspace, hull_is_hurwitz, is_hurwitz,
                                  is_irreducible, similarity, spectral_abscissa)


class TestSpectralAbscissa:
    """Largest real part of the spectrum."""

    def test_pause(self):
        assert spectral_abscissa(A0) == pytest.approx(0.0, abs=1e-15)

    def test_spiral(self):
        assert spectral_abscissa(A1) == pytest.approx(-1.0, abs=1e-14)

    def test_shifted_rotation(self, lam, sys_B):
        for G in sys_B.generators:
            assert spectral_abscissa(G) == pytest.approx(-lam, abs=1e-12)


class TestHurwitz:
    """Every eigenvalue strictly in the left half plane."""

    def test_pause_is_not_hurwitz(self):
        assert not is_hurwitz(A0)

    def test_spiral_is_hurwitz(self):
        assert is_hurwitz(A1)

    def test_hull_point_of_X(self, sys_X):
        assert is_hurwitz(sys_X.combination([0.5, 0.3, 0.2]))

    def test_all_of_X(self, sys_X):
        ok, worst = hull_is_hurwitz(sys_X, samples=50)
        assert ok
        assert worst < 0

    def test_hurwitz_exponentials_decay(self, sys_X):
        for M in list(sys_X.generators) + [sys_X.combination([0.2, 0.2, 0.6])]:
            assert opnorm(expm(M, 50.0)) < opnorm(expm(M, 10.0)) < 1.0


class TestAlgebraRank:
    """Dimension of the algebra the generators span."""

    def test_identity(self):
        assert algebra_closure_rank(SwitchingSystem((np.eye(2),))) == 1

    def test_planar_pair(self):
        assert algebra_closure_rank(system_A()) == 4

    def test_X_generates_everything(self, sys_X):
        assert algebra_closure_rank(sys_X) == 16

    def test_commuting_diagonals(self):
        assert algebra_closure_rank(SwitchingSystem((np.diag([1.0, 2.0]), np.diag([3.0, 4.0])))) == 2

    def test_similarity_invariance(self, sys_X):
        rng = np.random.default_rng(4)
        for _ in range(3):
            S = rng.normal(size=(4, 4)) + 4 * np.eye(4)
            assert algebra_closure_rank(similarity(sys_X, S)) == 16
        S = rng.normal(size=(2, 2)) + 2 * np.eye(2)
        assert algebra_closure_rank(similarity(system_A(), S)) == 4

    def test_similarity_must_be_invertible(self):
        with pytest.raises(InvalidInputError):
            similarity(system_A(), np.zeros((2, 2)))


class TestIrreducibility:
    """Common invariant subspaces."""

    def test_A_is_irreducible(self):
        assert is_irreducible(system_A())

    def test_B_and_B0_are_irreducible(self, sys_B, sys_B0):
        assert is_irreducible(sys_B)
        assert is_irreducible(sys_B0)

    def test_diagonal_pair_is_reducible(self):
        assert not is_irreducible(SwitchingSystem((np.diag([1.0, 2.0]), np.diag([3.0, 4.0]))))

    def test_full_rank_implies_irreducible(self, sys_X):
        assert algebra_closure_rank(sys_X) == 16
        assert is_irreducible(sys_X)

    def test_diagonal_4d_is_reducible(self):
        sys = SwitchingSystem((np.diag([1.0, 2.0, 3.0, 4.0]), np.diag([4.0, 3.0, 2.0, 1.0])))
        assert algebra_closure_rank(sys) == 4
        assert not is_irreducible(sys)
        Q = common_invariant_subspace(sys)
        for G in sys.generators:
            P = np.eye(4) - Q @ Q.T
            assert np.abs(P @ G @ Q).max() < 1e-9

    def test_rotation_planes_are_found(self):
        """A 4D generator with no real eigenvectors still has invariant rotation planes."""
        R = np.array([[0.0, -1.0], [1.0, 0.0]])
        J = np.block([[R, np.zeros((2, 2))], [np.zeros((2, 2)), 2.0 * R]])
        sys = SwitchingSystem((J,))
        assert algebra_closure_rank(sys) < 16
        assert not is_irreducible(sys)

    def test_left_lift_is_inconclusive(self):
        """
        A (x) I is reducible (R^2 (x) e1 is invariant) but every eigenspace of
        its words has the form E (x) R^2, so the candidate search comes back empty.
        """
        lifted = SwitchingSystem(tuple(kron(G, np.eye(2)) for G in system_A().generators))
        assert algebra_closure_rank(lifted) == 4
        assert common_invariant_subspace(lifted) is None
        with pytest.raises(InconclusiveError):
            is_irreducible(lifted)
