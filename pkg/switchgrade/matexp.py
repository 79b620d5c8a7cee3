"""
Fixed-dimension dense linear algebra.

Matrix exponentials, Kronecker products, operator 2-norms and eigenvalues for
the small (d <= 8) matrices switching systems are made of. Planar matrices get
the analytic treatment because rotation-type generators deserve exact answers;
everything bigger goes through scipy.

All functions are pure and take/return plain float64 numpy arrays, so they can
be hammered from as many threads as you like.
"""

import logging

import numpy as np
import scipy.linalg

from .errors import DimensionError, InvalidInputError, MatrixOverflowError

logger = logging.getLogger(__name__)

MAX_DIM = 8
DISCRIMINANT_TOL = 1e-12


def as_mat(A, name: str = 'matrix') -> np.ndarray:
    """
    Validate and return a square, finite float64 matrix.

    Args:
        A: Anything numpy can turn into a 2D array
        name: Used in error messages

    Returns:
        A float64 copy of A

    Raises:
        InvalidInputError: Not square, empty or non-finite
        DimensionError: Dimension above MAX_DIM
    """
    arr = np.array(A, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise InvalidInputError(f"{name} must be a non-empty square matrix, got shape {arr.shape}")
    if arr.shape[0] > MAX_DIM:
        raise DimensionError(f"{name} has dimension {arr.shape[0]} > {MAX_DIM}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} has non-finite entries")
    return arr


def as_vec(x, dim: int = None, name: str = 'vector') -> np.ndarray:
    """Validate a finite 1D vector, optionally of a given length."""
    arr = np.array(x, dtype=float).reshape(-1)
    if arr.size == 0 or not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} must be a non-empty finite vector")
    if dim is not None and arr.size != dim:
        raise DimensionError(f"{name} has length {arr.size}, expected {dim}")
    return arr


def _check_times(ts) -> np.ndarray:
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    if not np.all(np.isfinite(ts)) or np.any(ts < 0):
        raise InvalidInputError("exponential times must be finite and nonnegative")
    return ts


def _check_finite(E: np.ndarray, A: np.ndarray) -> np.ndarray:
    if not np.all(np.isfinite(E)):
        raise MatrixOverflowError(f"e^(tA) left double range (largest |entry| of A is {np.abs(A).max():.3g})")
    return E


def _expm_2x2_stack(As: np.ndarray, ts: np.ndarray) -> np.ndarray:
    """Closed-form e^{t_n A_n} for stacks of 2x2 matrices, keyed on each discriminant."""
    m = 0.5 * (As[:, 0, 0] + As[:, 1, 1])
    N = As - m[:, None, None] * np.eye(2)
    disc = 0.25 * (As[:, 0, 0] - As[:, 1, 1]) ** 2 + As[:, 0, 1] * As[:, 1, 0]
    real = disc >= DISCRIMINANT_TOL
    cplx = disc <= -DISCRIMINANT_TOL

    with np.errstate(over='ignore', invalid='ignore', divide='ignore'):
        r = np.sqrt(np.where(real, disc, 1.0))
        nu = np.sqrt(np.where(cplx, -disc, 1.0))
        # real distinct: e^{(m+r)t} and e^{(m-r)t} separately so cosh/sinh never overflow alone
        hi = np.exp((m + r) * ts)
        lo = np.exp((m - r) * ts)
        c_real = 0.5 * (hi + lo)
        s_real = np.where(2 * r * ts < 1.0, lo * np.expm1(2 * r * ts), hi - lo) / (2 * r)
        scale = np.exp(m * ts)
        c_cplx = scale * np.cos(nu * ts)
        s_cplx = scale * np.sin(nu * ts) / nu
        c = np.where(real, c_real, np.where(cplx, c_cplx, scale))
        s = np.where(real, s_real, np.where(cplx, s_cplx, scale * ts))
        E = c[:, None, None] * np.eye(2) + s[:, None, None] * N
    return E


def expm_stack(As, ts) -> np.ndarray:
    """
    e^{t_n A_n} for a stack of matrices, each with its own time.

    No per-matrix validation beyond shape and finiteness; callers hand in
    hull elements of an already validated system.

    Args:
        As: Array of shape (n, d, d)
        ts: Array of n nonnegative times

    Returns:
        Array of shape (n, d, d)
    """
    As = np.asarray(As, dtype=float)
    ts = _check_times(ts)
    if As.ndim != 3 or As.shape[1] != As.shape[2] or As.shape[0] != ts.size:
        raise DimensionError(f"expm_stack got matrices {As.shape} and {ts.size} times")
    if not np.all(np.isfinite(As)):
        raise InvalidInputError("matrix stack has non-finite entries")
    d = As.shape[1]
    if d == 1:
        with np.errstate(over='ignore'):
            E = np.exp(ts * As[:, 0, 0]).reshape(-1, 1, 1)
    elif d == 2:
        E = _expm_2x2_stack(As, ts)
    else:
        # degree-13 Pade with scaling and squaring
        with np.errstate(over='ignore', invalid='ignore'):
            E = scipy.linalg.expm(ts[:, None, None] * As)
    return _check_finite(np.asarray(E, dtype=float), As)


def expm_batch(A, ts) -> np.ndarray:
    """
    e^{tA} for every t in ts.

    Args:
        A: Square matrix
        ts: Nonnegative times

    Returns:
        Array of shape (len(ts), d, d)

    Raises:
        InvalidInputError: Bad matrix or negative/non-finite time
        MatrixOverflowError: Result not representable
    """
    A = as_mat(A)
    ts = _check_times(ts)
    return expm_stack(np.broadcast_to(A, (ts.size,) + A.shape), ts)


def expm(A, t: float = 1.0) -> np.ndarray:
    """
    Matrix exponential e^{tA}.

    Planar matrices use the three-case trace/determinant formula, which is
    exact for the rotation-type generators we care about. Larger matrices go
    through scipy's scaling-and-squaring Pade approximant.

    Args:
        A: Square matrix, dim <= 8
        t: Nonnegative time

    Returns:
        e^{tA} as a (d, d) array
    """
    return expm_batch(A, [t])[0]


def kron(A, B) -> np.ndarray:
    """
    Kronecker product with the usual block layout (A[i,j] * B blocks).

    Raises:
        DimensionError: Output dimension above MAX_DIM
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.ndim == 2 and B.ndim == 2:
        if A.shape[0] != A.shape[1] or B.shape[0] != B.shape[1]:
            raise InvalidInputError("kron expects square matrices")
        if A.shape[0] * B.shape[0] > MAX_DIM:
            raise DimensionError(f"kron output dimension {A.shape[0] * B.shape[0]} > {MAX_DIM}")
        return np.kron(as_mat(A), as_mat(B))
    # column vectors treated as d x 1
    return np.kron(as_vec(A), as_vec(B))


def opnorm(A) -> float:
    """Largest singular value, via the symmetric eigenproblem of A^T A."""
    A = as_mat(A)
    return float(np.sqrt(max(np.linalg.eigvalsh(A.T @ A)[-1], 0.0)))


def opnorm_batch(Ms: np.ndarray) -> np.ndarray:
    """opnorm of a stack of matrices with shape (n, d, d); no validation."""
    gram = np.einsum('nki,nkj->nij', Ms, Ms)
    return np.sqrt(np.clip(np.linalg.eigvalsh(gram)[:, -1], 0.0, None))


def _block_eigenvalues(A: np.ndarray):
    """Eigenvalues of a 4x4 matrix that is block triangular in 2x2 blocks, else None."""
    if np.all(A[2:, :2] == 0) or np.all(A[:2, 2:] == 0):
        return np.concatenate([eigenvalues(A[:2, :2]), eigenvalues(A[2:, 2:])])
    return None


def eigenvalues(A) -> np.ndarray:
    """
    All eigenvalues with multiplicity, as a complex array.

    Closed form for 2x2; block reduction for block-triangular 4x4; LAPACK for
    the rest. Ordered by decreasing real part, then decreasing imaginary part.
    """
    A = as_mat(A)
    d = A.shape[0]
    if d == 1:
        vals = np.array([complex(A[0, 0])])
    elif d == 2:
        m = 0.5 * (A[0, 0] + A[1, 1])
        disc = 0.25 * (A[0, 0] - A[1, 1]) ** 2 + A[0, 1] * A[1, 0]
        root = np.sqrt(complex(disc)) if abs(disc) >= DISCRIMINANT_TOL else 0j
        vals = np.array([m + root, m - root])
    else:
        vals = _block_eigenvalues(A) if d == 4 else None
        if vals is None:
            vals = np.linalg.eigvals(A).astype(complex)
    order = np.lexsort((-vals.imag, -vals.real))
    return vals[order]


def spectral_radius_batch(Ms: np.ndarray) -> np.ndarray:
    """Spectral radius of a stack of matrices with shape (n, d, d)."""
    return np.abs(np.linalg.eigvals(Ms)).max(axis=-1)


def max_abs_diff(A, B) -> float:
    """Max-entrywise absolute difference, the comparison used throughout."""
    return float(np.max(np.abs(np.asarray(A, dtype=float) - np.asarray(B, dtype=float))))
