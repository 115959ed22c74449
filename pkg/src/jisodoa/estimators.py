"""Spectrum and DOA estimators: Capon, MUSIC, ESPRIT and reduced-rank JISO.

JISO alternates two closed-form updates for every scanning direction: a
rank-one projection matrix ``T`` built from the loaded Capon weight of the
running covariance, and a reduced weight ``f`` that solves the distortionless
MV problem in the projected ``r``-dimensional space. The output power is the
MV power of the recursively accumulated reduced covariance.
"""

from dataclasses import dataclass

import numpy as np

from .array_model import steering_matrix, steering_vector
from .covariance import (
    CovarianceEstimate,
    recursive_update,
    subarray_snapshots,
)
from .linalg_kernel import (
    ContractError,
    LinAlgFailure,
    hermitian_eig,
    hermitian_inverse_loaded,
    hermitian_solve_loaded,
    least_squares_solve,
)

# Denominator floor so that exact-covariance MUSIC nulls stay finite.
_DEN_FLOOR = 1e-300


@dataclass(frozen=True)
class Spectrum:
    grid: np.ndarray
    power: np.ndarray
    label: str = ""

    def __post_init__(self):
        if self.grid.shape != self.power.shape:
            raise ContractError("grid and power must have the same shape")

    def power_db(self):
        """Power in dB relative to the spectrum maximum."""
        return 10.0 * np.log10(self.power / np.max(self.power))


@dataclass
class JisoDirectionState:
    """Per-direction JISO state: projection ``T`` (p x r), reduced weight, reduced covariance."""

    theta_deg: float
    T: np.ndarray
    f_bar: np.ndarray
    reduced_cov: CovarianceEstimate
    a_bar: np.ndarray | None = None


def scan_grid(step_deg=1.0):
    """Scanning directions ``step, 2*step, ..., 180 - step`` degrees."""
    count = 180.0 / step_deg
    if step_deg <= 0 or abs(count - round(count)) > 1e-9 or round(count) < 2:
        raise ContractError(f"180 / step must be an integer >= 2, got step {step_deg}")
    return step_deg * np.arange(1, int(round(count)))


def capon_weight(R_inv, a):
    """Distortionless MV weight ``R^{-1} a / (a^H R^{-1} a)``."""
    Ria = R_inv @ a
    return Ria / np.real(np.vdot(a, Ria))


def capon_spectrum(R_hat, grid, d_over_lambda=0.5):
    """Capon power ``1 / (a^H (R + delta I)^{-1} a)`` over ``grid``.

    The loading is taken from ``R_hat.delta``.
    """
    grid = np.asarray(grid, dtype=float)
    R_inv = hermitian_inverse_loaded(R_hat.matrix, R_hat.delta)
    A = steering_matrix(grid, R_hat.size, d_over_lambda)
    den = np.real(np.einsum("pg,pg->g", A.conj(), R_inv @ A))
    return Spectrum(grid, 1.0 / np.maximum(den, _DEN_FLOOR), "capon")


def music_spectrum(R_hat, q_w, grid, d_over_lambda=0.5):
    """MUSIC pseudo-spectrum from the ``m - q_w`` weakest eigenvectors."""
    m = R_hat.size
    if not 1 <= q_w < m:
        raise ContractError(f"MUSIC needs 1 <= q_w < m, got q_w={q_w}, m={m}")
    grid = np.asarray(grid, dtype=float)
    _, V = hermitian_eig(R_hat.matrix)
    En = V[:, q_w:]
    A = steering_matrix(grid, m, d_over_lambda)
    den = np.sum(np.abs(En.conj().T @ A) ** 2, axis=0)
    return Spectrum(grid, 1.0 / np.maximum(den, _DEN_FLOOR), "music")


def esprit_doas(R_hat, q_w, d_over_lambda=0.5):
    """Least-squares ESPRIT with a one-element displacement.

    Returns ``q_w`` angle estimates in degrees, ascending.
    """
    m = R_hat.size
    if not 1 <= q_w < m:
        raise ContractError(f"ESPRIT needs 1 <= q_w < m, got q_w={q_w}, m={m}")
    _, V = hermitian_eig(R_hat.matrix)
    Us = V[:, :q_w]
    psi = least_squares_solve(Us[:-1], Us[1:])
    mu = np.linalg.eigvals(psi)
    cos_theta = -np.angle(mu) / (2.0 * np.pi * d_over_lambda)
    return np.sort(np.rad2deg(np.arccos(np.clip(cos_theta, -1.0, 1.0))))


# ---------------------------------------------------------------------------
# JISO, one direction at a time


def jiso_init(m, r, a_theta, delta=0.0, theta_deg=float("nan"), alpha=1.0):
    """Initial state: ``T = [I_r; 0]``, ``f = T^H a / ||T^H a||^2``, ``R_bar = delta I``."""
    if not 1 <= r <= m:
        raise ContractError(f"need 1 <= r <= m, got r={r}, m={m}")
    a_theta = np.asarray(a_theta)
    T = np.zeros((m, r), dtype=complex)
    T[:r, :r] = np.eye(r)
    a_bar = T.conj().T @ a_theta
    norm2 = np.real(np.vdot(a_bar, a_bar))
    if norm2 == 0:
        raise ContractError("projected steering vector is zero at initialization")
    f_bar = a_bar / norm2
    reduced = CovarianceEstimate.loaded_identity(r, delta, "reduced", alpha)
    return JisoDirectionState(theta_deg, T, f_bar, reduced, a_bar)


def _reduced_and_projection_update(state, x_bar_update, R_hat_inv_a, a_theta, delta):
    T_prev = state.T
    a_bar = T_prev.conj().T @ a_theta
    if not np.any(a_bar):
        raise LinAlgFailure(
            f"projected steering vector vanished at theta={state.theta_deg}")
    reduced = x_bar_update(state.reduced_cov, T_prev)
    Rbar_inv = hermitian_inverse_loaded(reduced.matrix, delta)
    Rbar_inv_abar = Rbar_inv @ a_bar
    f_bar = Rbar_inv_abar / np.real(np.vdot(a_bar, Rbar_inv_abar))
    w = R_hat_inv_a / np.real(np.vdot(a_theta, R_hat_inv_a))
    T = np.outer(w, f_bar.conj()) / np.real(np.vdot(f_bar, f_bar))
    return JisoDirectionState(state.theta_deg, T, f_bar, reduced, a_bar)


def jiso_step(state, x, R_hat_inv_a, a_theta, alpha, delta):
    """Advances one direction's state by one snapshot.

    ``R_hat_inv_a`` must be ``(R_hat(i) + delta I)^{-1} a`` for the covariance
    that already includes ``x``; it is shared by every scanning direction.
    """
    x = np.asarray(x)

    def update(reduced, T_prev):
        return recursive_update(reduced, T_prev.conj().T @ x, alpha)

    return _reduced_and_projection_update(state, update, R_hat_inv_a, a_theta, delta)


def jiso_ss_step(state, x, R_ss_inv_a, a_ss, n, alpha, delta):
    """Spatially smoothed variant of :func:`jiso_step` on length-``n`` subarrays."""
    Xs = subarray_snapshots(np.asarray(x), n)
    J = Xs.shape[1]

    def update(reduced, T_prev):
        Xbar = T_prev.conj().T @ Xs
        R = alpha * reduced.matrix + (Xbar @ Xbar.conj().T) / J
        return CovarianceEstimate(R, "reduced", reduced.snapshots_absorbed + 1, alpha, delta)

    return _reduced_and_projection_update(state, update, R_ss_inv_a, a_ss, delta)


def jiso_power(state, delta):
    """Output power ``1 / (a_bar^H (R_bar + delta I)^{-1} a_bar)`` of a state."""
    Rbar_inv = hermitian_inverse_loaded(state.reduced_cov.matrix, delta)
    return 1.0 / np.real(np.vdot(state.a_bar, Rbar_inv @ state.a_bar))


# ---------------------------------------------------------------------------
# JISO over the whole grid, vectorized across directions


def _jiso_grid(X, n, r, alpha, delta, grid, d_over_lambda):
    """Snapshot-major JISO over all directions with length-``n`` subarrays.

    The loaded inverse of the (smoothed) full covariance is applied once per
    instant and shared by every direction. With ``n = m`` there is a single
    subarray and this is plain JISO.

    After the first instant every projection is rank one, ``T = w g^H`` with
    ``w`` the Capon weight and ``g = f / ||f||^2``, so ``T^H v = g (w^H v)``
    and ``T`` is never formed.
    """
    X = np.asarray(X)
    m, N = X.shape
    if N < 1:
        raise ContractError("need at least one snapshot")
    if not 1 <= r <= n <= m:
        raise ContractError(f"need 1 <= r <= n <= m, got r={r}, n={n}, m={m}")
    grid = np.asarray(grid, dtype=float)
    G = grid.size
    A = steering_matrix(grid, n, d_over_lambda)            # n x G
    Xs = subarray_snapshots(X, n)                          # J x n x N
    J = Xs.shape[0]
    eye_r = np.eye(r)

    R = delta * np.eye(n, dtype=complex)
    Rbar = np.broadcast_to(delta * eye_r, (G, r, r)).astype(complex)
    g = W = None

    for i in range(N):
        xs = Xs[:, :, i].T                                 # n x J
        if g is None:
            # T(0) = [I_r; 0]
            x_bar = np.broadcast_to(xs[:r], (G, r, J))
            a_bar = A[:r].T                                # G x r
        else:
            y = W.conj().T @ xs                            # G x J
            x_bar = g[:, :, None] * y[:, None, :]
            a_bar = g                                      # w^H a = 1
        R = alpha * R + (xs @ xs.conj().T) / J
        Rbar = alpha * Rbar + (x_bar @ x_bar.conj().transpose(0, 2, 1)) / J
        sol = np.linalg.solve(Rbar + delta * eye_r, a_bar[..., None])[..., 0]
        den_bar = np.real(np.sum(a_bar.conj() * sol, axis=1))
        if np.any(~(den_bar > 0)):
            bad = grid[~(den_bar > 0)]
            raise LinAlgFailure(f"projected steering vector vanished at theta={bad[0]}")
        f_bar = sol / den_bar[:, None]
        R_inv_A = hermitian_solve_loaded(R, delta, A)
        W = R_inv_A / np.real(np.sum(A.conj() * R_inv_A, axis=0))
        g = f_bar / np.real(np.sum(f_bar.conj() * f_bar, axis=1))[:, None]

    power = 1.0 / den_bar
    return power, a_bar, Rbar


def jiso_spectrum(X, config, grid=None):
    """JISO output power over the scanning grid."""
    if grid is None:
        grid = scan_grid(config.grid_step_deg)
    m = np.asarray(X).shape[0]
    power, _, _ = _jiso_grid(X, m, config.rank, config.alpha, config.delta,
                             grid, config.d_over_lambda)
    return Spectrum(np.asarray(grid, dtype=float), power, "jiso")


def jiso_ss_spectrum(X, config, grid=None):
    """JISO on spatially smoothed length-``subarray_n`` subarrays."""
    n = config.subarray_n
    if n is None:
        raise ContractError("jiso_ss needs subarray_n in the scenario config")
    m = np.asarray(X).shape[0]
    J = m - n + 1
    if n < config.q or J < config.q:
        raise ContractError(f"subarray_n={n} violates n >= q and J >= q for q={config.q}")
    if grid is None:
        grid = scan_grid(config.grid_step_deg)
    power, _, _ = _jiso_grid(X, n, config.rank, config.alpha, config.delta,
                             grid, config.d_over_lambda)
    return Spectrum(np.asarray(grid, dtype=float), power, "jiso_ss")


def jiso_spectrum_reference(X, config, grid=None, subarray_n=None):
    """Unvectorized JISO: one :class:`JisoDirectionState` per direction.

    Slow; kept as an independent path for cross-checking the grid routine.
    """
    X = np.asarray(X)
    m, N = X.shape
    n = m if subarray_n is None else subarray_n
    if grid is None:
        grid = scan_grid(config.grid_step_deg)
    grid = np.asarray(grid, dtype=float)
    alpha, delta, r = config.alpha, config.delta, config.rank
    steer = [steering_vector(t, n, config.d_over_lambda) for t in grid]
    states = [jiso_init(n, r, a, delta, t, alpha) for t, a in zip(grid, steer)]
    full = CovarianceEstimate.loaded_identity(n, delta, "full", alpha)
    for i in range(N):
        x = X[:, i]
        if subarray_n is None:
            full = recursive_update(full, x, alpha)
        else:
            Xs = subarray_snapshots(x, n)
            full = CovarianceEstimate(
                alpha * full.matrix + Xs @ Xs.conj().T / Xs.shape[1],
                "smoothed", full.snapshots_absorbed + 1, alpha, delta)
        R_inv = hermitian_inverse_loaded(full.matrix, delta)
        for k, a in enumerate(steer):
            if subarray_n is None:
                states[k] = jiso_step(states[k], x, R_inv @ a, a, alpha, delta)
            else:
                states[k] = jiso_ss_step(states[k], x, R_inv @ a, a, n, alpha, delta)
    power = np.array([jiso_power(s, delta) for s in states])
    return Spectrum(grid, power, "jiso" if subarray_n is None else "jiso_ss")
