"""
Structural certificates: Hurwitz tests, spectral abscissa, irreducibility.

Irreducibility is decided by the dimension of the algebra the generators span
(full matrix algebra means irreducible). When the algebra is smaller we go
looking for a common invariant subspace among eigenspaces of short generator
words, and admit defeat with InconclusiveError if none turns up.
"""

import itertools
import logging
from typing import Iterator, List, Optional, Tuple

import numpy as np
import scipy.linalg

from .errors import InconclusiveError, InvalidInputError
from .matexp import as_mat, eigenvalues
from .models import SwitchingSystem
from .system import sample_hull

logger = logging.getLogger(__name__)

HURWITZ_TOL = 1e-10
RANK_RCOND = 1e-9
INVARIANCE_TOL = 1e-9


def spectral_abscissa(A) -> float:
    """Largest real part among the eigenvalues of A."""
    return float(np.max(eigenvalues(A).real))


def is_hurwitz(A, tol: float = HURWITZ_TOL) -> bool:
    """True iff every eigenvalue has real part below -tol."""
    return spectral_abscissa(A) < -tol


def hull_is_hurwitz(sys: SwitchingSystem, samples: int = 50, seed: int = 0) -> Tuple[bool, float]:
    """
    Hurwitz test on every vertex plus `samples` random hull points.

    Returns:
        (all Hurwitz, worst spectral abscissa seen)
    """
    mats = list(sys.generators) + sample_hull(sys, samples, seed)
    worst = max(spectral_abscissa(M) for M in mats)
    return worst < -HURWITZ_TOL, worst


def _span_rank(vectors: np.ndarray) -> np.ndarray:
    """Orthonormal basis (as columns) of the span of the given columns."""
    norms = np.linalg.norm(vectors, axis=0)
    keep = norms > 0
    if not np.any(keep):
        return np.zeros((vectors.shape[0], 0))
    return scipy.linalg.orth(vectors[:, keep] / norms[keep], rcond=RANK_RCOND)


def algebra_closure_rank(sys: SwitchingSystem) -> int:
    """
    Dimension of the span of all finite products of generators.

    Starts from the span of the generators and keeps multiplying the current
    basis on the right by every generator until the rank stops growing.
    """
    d = sys.dim
    basis = _span_rank(np.stack([G.reshape(-1) for G in sys.generators], axis=1))
    for iteration in range(d * d):
        mats = basis.T.reshape(-1, d, d)
        products = np.einsum('bij,gjk->bgik', mats, sys.stack).reshape(-1, d * d).T
        grown = _span_rank(np.hstack([basis, products]))
        if grown.shape[1] == basis.shape[1]:
            break
        basis = grown
        logger.debug(f"{sys.label}: algebra rank {basis.shape[1]} after {iteration + 1} extensions")
    return int(basis.shape[1])


def _is_scalar(A: np.ndarray) -> bool:
    scale = max(1.0, np.abs(A).max())
    return np.abs(A - np.trace(A) / A.shape[0] * np.eye(A.shape[0])).max() <= INVARIANCE_TOL * scale


def _real_eigenspaces(W: np.ndarray) -> Iterator[np.ndarray]:
    """Real invariant subspaces from the eigen-structure of W (orthonormal columns)."""
    d = W.shape[0]
    seen = []
    for lam in eigenvalues(W):
        if any(abs(lam - s) <= INVARIANCE_TOL * max(1.0, abs(s)) for s in seen):
            continue
        seen.append(lam)
        if abs(lam.imag) <= INVARIANCE_TOL * max(1.0, abs(lam)):
            V = scipy.linalg.null_space(W - lam.real * np.eye(d), rcond=RANK_RCOND)
            if V.shape[1]:
                yield V
        elif lam.imag > 0:
            V = scipy.linalg.null_space(W.astype(complex) - lam * np.eye(d), rcond=RANK_RCOND)
            if V.shape[1]:
                yield _span_rank(np.hstack([V.real, V.imag]))


def _is_invariant(Q: np.ndarray, gens) -> bool:
    P = np.eye(Q.shape[0]) - Q @ Q.T
    return all(np.abs(P @ G @ Q).max() <= INVARIANCE_TOL * max(1.0, np.abs(G).max()) for G in gens)


def candidate_subspaces(sys: SwitchingSystem) -> Iterator[np.ndarray]:
    """Eigenspaces of generator words of length 1 and 2, then pairwise sums."""
    d = sys.dim
    words = list(sys.generators) + [A @ B for A, B in itertools.product(sys.generators, repeat=2)]
    spaces: List[np.ndarray] = []
    for W in words:
        for Q in _real_eigenspaces(W):
            if 0 < Q.shape[1] < d:
                spaces.append(Q)
                yield Q
    for Q1, Q2 in itertools.combinations(spaces, 2):
        Q = _span_rank(np.hstack([Q1, Q2]))
        if 0 < Q.shape[1] < d:
            yield Q


def common_invariant_subspace(sys: SwitchingSystem) -> Optional[np.ndarray]:
    """An orthonormal basis of a common invariant proper subspace, or None if the search finds none."""
    for Q in candidate_subspaces(sys):
        if _is_invariant(Q, sys.generators):
            return Q
    return None


def _is_irreducible_planar(sys: SwitchingSystem) -> bool:
    movers = [G for G in sys.generators if not _is_scalar(G)]
    if not movers:
        return False
    for Q in _real_eigenspaces(movers[0]):
        if Q.shape[1] == 1 and _is_invariant(Q, movers):
            logger.debug(f"{sys.label}: common eigenvector {Q[:, 0]}")
            return False
    return True


def is_irreducible(sys: SwitchingSystem) -> bool:
    """
    Decide whether the generators share a nontrivial proper invariant subspace.

    Planar systems are settled by real eigenvectors. Higher dimensions are
    certified irreducible when the generated algebra is all of M_d; otherwise
    a structured candidate search either exhibits an invariant subspace or
    gives up.

    Raises:
        InconclusiveError: Algebra rank below d^2 and no invariant subspace found
    """
    d = sys.dim
    if d == 1:
        return True
    if d == 2:
        return _is_irreducible_planar(sys)
    rank = algebra_closure_rank(sys)
    if rank == d * d:
        return True
    Q = common_invariant_subspace(sys)
    if Q is not None:
        logger.info(f"🔍 {sys.label}: common invariant subspace of dimension {Q.shape[1]}")
        return False
    raise InconclusiveError(f"{sys.label}: algebra rank {rank} < {d * d} but no invariant subspace among candidates")


def similarity(sys: SwitchingSystem, S) -> SwitchingSystem:
    """The system S^-1 A S, for basis-invariance checks."""
    S = as_mat(S, 'similarity')
    if abs(np.linalg.det(S)) < 1e-12:
        raise InvalidInputError("similarity transform must be invertible")
    Sinv = np.linalg.inv(S)
    return SwitchingSystem(tuple(Sinv @ G @ S for G in sys.generators), f"{sys.label}~")
