"""Dense complex linear-algebra primitives shared by the estimators."""

import numpy as np
import scipy.linalg

HERMITIAN_RTOL = 1e-12


class ContractError(ValueError):
    """An input violates the documented preconditions of an operation."""


class LinAlgFailure(ArithmeticError):
    """A numerical routine could not produce a trustworthy result."""


def _check_square(M):
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ContractError(f"expected a square matrix, got shape {M.shape}")
    return M


def is_hermitian(M, rtol=HERMITIAN_RTOL):
    M = np.asarray(M)
    scale = max(np.max(np.abs(M)), 1.0) if M.size else 1.0
    return bool(np.max(np.abs(M - M.conj().T), initial=0.0) <= rtol * scale)


def _check_hermitian(M):
    M = _check_square(M)
    if not np.all(np.isfinite(M)):
        raise ContractError("matrix has non-finite entries")
    if not is_hermitian(M):
        raise ContractError("matrix is not Hermitian")
    return M


def hermitian_inverse_loaded(M, delta=0.0):
    """Returns ``(M + delta*I)^{-1}`` for a Hermitian ``M``.

    The inverse is computed from an eigendecomposition of the loaded matrix,
    which keeps the result exactly Hermitian and gives a condition estimate
    for free.

    Raises:
        ContractError: ``M`` is not Hermitian or ``delta`` is negative.
        LinAlgFailure: the loaded matrix is numerically singular.
    """
    M = _check_hermitian(M)
    if delta < 0:
        raise ContractError(f"loading must be nonnegative, got {delta}")
    p = M.shape[0]
    loaded = M + delta * np.eye(p)
    w, V = scipy.linalg.eigh(loaded)
    wmax = np.max(np.abs(w))
    wmin = np.min(np.abs(w))
    cond = np.inf if wmin == 0 else wmax / wmin
    if not np.isfinite(cond) or cond * np.finfo(float).eps > 1e-2:
        raise LinAlgFailure(
            f"matrix is singular after loading delta={delta} "
            f"(condition estimate {cond:.3e})")
    inv = (V / w) @ V.conj().T
    return 0.5 * (inv + inv.conj().T)


def hermitian_eig(M):
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending.

    Returns:
        ``(eigenvalues, eigenvectors)`` with ``eigenvectors[:, k]`` paired with
        ``eigenvalues[k]``.
    """
    M = _check_hermitian(M)
    try:
        w, V = scipy.linalg.eigh(M)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise LinAlgFailure(f"eigendecomposition did not converge: {exc}") from exc
    return w[::-1].copy(), V[:, ::-1].copy()


def least_squares_solve(A, B):
    """Solves ``min_X ||A X - B||_F`` for full-column-rank ``A``."""
    A = np.asarray(A)
    B = np.asarray(B)
    if A.ndim != 2 or B.ndim != 2 or A.shape[0] != B.shape[0]:
        raise ContractError(
            f"incompatible shapes for least squares: {A.shape} and {B.shape}")
    p, k = A.shape
    if k > p:
        raise ContractError(f"A has more columns ({k}) than rows ({p})")
    X, _, rank, sv = scipy.linalg.lstsq(A, B)
    if rank < k or sv[-1] <= sv[0] * max(p, k) * np.finfo(float).eps:
        raise LinAlgFailure(f"A is rank deficient (rank {rank} < {k})")
    return X


def hermitian_solve_loaded(M, delta, B):
    """Solves ``(M + delta*I) X = B`` by Cholesky; ``M`` must be Hermitian PSD.

    Cheaper than forming the inverse when only ``(M + delta I)^{-1} B`` is
    needed. Hermitian symmetry is not re-checked here.
    """
    M = _check_square(M)
    loaded = M + delta * np.eye(M.shape[0])
    try:
        c = scipy.linalg.cho_factor(loaded, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise LinAlgFailure(
            f"loaded matrix is not positive definite (delta={delta}): {exc}") from exc
    return scipy.linalg.cho_solve(c, B, check_finite=False)
