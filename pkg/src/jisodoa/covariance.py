"""Sample, recursive and spatially smoothed covariance estimates."""

from dataclasses import dataclass, replace

import numpy as np

from .linalg_kernel import ContractError

KINDS = ("full", "reduced", "smoothed")


@dataclass(frozen=True)
class CovarianceEstimate:
    """A Hermitian covariance estimate plus the loading to use when inverting it."""

    matrix: np.ndarray
    kind: str = "full"
    snapshots_absorbed: int = 0
    alpha: float = 1.0
    delta: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ContractError(f"kind must be one of {KINDS}, got {self.kind!r}")

    @property
    def size(self):
        return self.matrix.shape[0]

    @classmethod
    def loaded_identity(cls, p, delta, kind="full", alpha=1.0):
        """Recursion start state ``delta * I``."""
        return cls(delta * np.eye(p, dtype=complex), kind, 0, alpha, delta)

    @classmethod
    def zeros(cls, p, kind="full", alpha=1.0, delta=0.0):
        return cls(np.zeros((p, p), dtype=complex), kind, 0, alpha, delta)


def sample_covariance(X, delta=0.0):
    """``(1/N) sum_i x(i) x(i)^H`` over the columns of ``X``."""
    X = np.asarray(X)
    if X.ndim != 2 or X.shape[1] < 1:
        raise ContractError(f"need an m x N snapshot matrix with N >= 1, got {X.shape}")
    N = X.shape[1]
    R = (X @ X.conj().T) / N
    R = 0.5 * (R + R.conj().T)
    return CovarianceEstimate(R, "full", N, 1.0, delta)


def recursive_update(est, x, alpha):
    """Exponentially weighted update ``alpha * R + x x^H``."""
    x = np.asarray(x).reshape(-1)
    if x.shape[0] != est.size:
        raise ContractError(
            f"snapshot length {x.shape[0]} does not match covariance size {est.size}")
    if not 0.0 < alpha <= 1.0:
        raise ContractError(f"alpha must lie in (0, 1], got {alpha}")
    R = alpha * est.matrix + np.outer(x, x.conj())
    return replace(est, matrix=R, snapshots_absorbed=est.snapshots_absorbed + 1, alpha=alpha)


def subarray_snapshots(x, n):
    """The ``J = m - n + 1`` overlapping length-``n`` slices of ``x`` as columns.

    Works on a single snapshot (1-D) or on a snapshot matrix, in which case the
    result has shape ``(J, n, N)``.
    """
    x = np.asarray(x)
    m = x.shape[0]
    if not 1 <= n <= m:
        raise ContractError(f"subarray size must lie in [1, {m}], got {n}")
    J = m - n + 1
    if x.ndim == 1:
        return np.stack([x[j:j + n] for j in range(J)], axis=1)
    return np.stack([x[j:j + n] for j in range(J)], axis=0)


def spatial_smooth_accumulate(est_pair, x, T_ss, n, alpha):
    """One time instant of the smoothed full/reduced recursion.

    Each of the ``J`` subarray vectors ``x_j`` contributes ``x_j x_j^H / J`` to
    the full ``n x n`` estimate and ``(T^H x_j)(T^H x_j)^H / J`` to the reduced
    ``r x r`` estimate, after both are scaled by ``alpha``.
    """
    full, reduced = est_pair
    x = np.asarray(x).reshape(-1)
    m = x.shape[0]
    if not 1 <= n <= m:
        raise ContractError(f"subarray size must lie in [1, {m}], got {n}")
    if full.size != n or T_ss.shape[0] != n or reduced.size != T_ss.shape[1]:
        raise ContractError("estimate and projection dimensions are inconsistent")
    if not 0.0 < alpha <= 1.0:
        raise ContractError(f"alpha must lie in (0, 1], got {alpha}")
    Xs = subarray_snapshots(x, n)
    J = Xs.shape[1]
    Xbar = T_ss.conj().T @ Xs
    P = (Xs @ Xs.conj().T) / J
    Pbar = (Xbar @ Xbar.conj().T) / J
    full = replace(full, matrix=alpha * full.matrix + P,
                   snapshots_absorbed=full.snapshots_absorbed + 1, alpha=alpha)
    reduced = replace(reduced, matrix=alpha * reduced.matrix + Pbar,
                      snapshots_absorbed=reduced.snapshots_absorbed + 1, alpha=alpha)
    return full, reduced


def spatial_smooth(R, n):
    """Averages the ``J = m - n + 1`` diagonal ``n x n`` blocks of ``R``."""
    R = np.asarray(R)
    m = R.shape[0]
    if not 1 <= n <= m:
        raise ContractError(f"subarray size must lie in [1, {m}], got {n}")
    J = m - n + 1
    out = np.zeros((n, n), dtype=R.dtype)
    for j in range(J):
        out += R[j:j + n, j:j + n]
    return out / J


def smoothed_sample_covariance(X, n, delta=0.0):
    """Plain (non-recursive) spatially smoothed sample covariance."""
    base = sample_covariance(X, delta)
    return CovarianceEstimate(spatial_smooth(base.matrix, n), "smoothed",
                              base.snapshots_absorbed, 1.0, delta)
