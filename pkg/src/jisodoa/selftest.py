"""Fast built-in invariant checks, run by ``jisodoa selftest``."""

import numpy as np

from .array_model import ScenarioConfig, exact_covariance, generate_snapshots, steering_vector
from .bench import run_trial
from .covariance import CovarianceEstimate, recursive_update, sample_covariance
from .estimators import (
    capon_spectrum,
    capon_weight,
    esprit_doas,
    jiso_init,
    jiso_spectrum,
    jiso_ss_spectrum,
    jiso_step,
    music_spectrum,
    scan_grid,
)
from .linalg_kernel import hermitian_eig, hermitian_inverse_loaded
from .spectrum_search import find_peaks


def _random_pd(rng, m):
    B = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    return B @ B.conj().T / m + 0.1 * np.eye(m)


def check_linalg(rng):
    M = _random_pd(rng, 6)
    inv = hermitian_inverse_loaded(M, 5e-4)
    w, V = hermitian_eig(M)
    ok = np.allclose((M + 5e-4 * np.eye(6)) @ inv, np.eye(6), atol=1e-9)
    ok &= np.allclose((V * w) @ V.conj().T, M, atol=1e-9)
    return ok, "loaded inverse and eigendecomposition reconstruct"


def check_jiso_identities(rng, steps=200):
    worst_c = worst_w = 0.0
    for _ in range(steps):
        m = int(rng.integers(4, 31))
        r = int(rng.integers(1, m + 1))
        theta = float(rng.uniform(1, 179))
        a = steering_vector(theta, m)
        state = jiso_init(m, r, a, 5e-4, theta)
        for _ in range(int(rng.integers(1, 4))):
            R_inv = hermitian_inverse_loaded(_random_pd(rng, m), 5e-4)
            x = rng.standard_normal(m) + 1j * rng.standard_normal(m)
            state = jiso_step(state, x, R_inv @ a, a, 0.998, 5e-4)
        c = np.vdot(state.f_bar, state.T.conj().T @ a)
        worst_c = max(worst_c, abs(c - 1))
        w = capon_weight(R_inv, a)
        worst_w = max(worst_w, np.linalg.norm(state.T @ state.f_bar - w) / np.linalg.norm(w))
    return worst_c < 1e-8 and worst_w < 1e-10, (
        f"constraint err {worst_c:.1e}, composite weight err {worst_w:.1e}")


def check_degeneracies(rng):
    cfg = ScenarioConfig(m=8, q=1, doas_deg=(70.0,), snr_db=10, num_snapshots=40,
                         rank=3, subarray_n=8)
    X = generate_snapshots(cfg, rng)
    grid = scan_grid(2.0)
    a = jiso_spectrum(X, cfg, grid).power
    b = jiso_ss_spectrum(X, cfg, grid).power
    est = CovarianceEstimate.zeros(8)
    for i in range(X.shape[1]):
        est = recursive_update(est, X[:, i], 1.0)
    S = sample_covariance(X).matrix * X.shape[1]
    err_ss = np.max(np.abs(a - b) / np.abs(a))
    err_rec = np.linalg.norm(est.matrix - S) / np.linalg.norm(S)
    return err_ss < 1e-10 and err_rec < 1e-10, (
        f"SS n=m err {err_ss:.1e}, recursion err {err_rec:.1e}")


def check_exact_oracles(rng):
    cfg = ScenarioConfig(m=30, q=2, doas_deg=(50.0, 53.0), snr_db=10)
    R = CovarianceEstimate(exact_covariance(cfg), delta=cfg.delta)
    grid = scan_grid(1.0)
    ok = True
    for s in (capon_spectrum(R, grid), music_spectrum(R, 2, grid)):
        ok &= sorted(find_peaks(s).angles[:2]) == [50.0, 53.0]
    ok &= np.allclose(esprit_doas(R, 2), [50.0, 53.0], atol=1e-6)
    return bool(ok), "Capon/MUSIC peaks and ESPRIT roots at 50, 53 deg"


def check_determinism(rng):
    cfg = ScenarioConfig(m=10, q=1, doas_deg=(90.0,), snr_db=20, num_snapshots=50,
                         rank=3, subarray_n=8)
    names = ("capon", "music", "esprit", "jiso", "jiso_ss")
    a = run_trial(cfg, names, 1234)
    b = run_trial(cfg, names, 1234)
    return a == b and all(v.resolved for v in a.values()), "repeatable high-SNR trial"


CHECKS = (check_linalg, check_jiso_identities, check_degeneracies,
          check_exact_oracles, check_determinism)


def run_selftest(seed=0, out=print):
    rng = np.random.default_rng(seed)
    all_ok = True
    for check in CHECKS:
        try:
            ok, detail = check(rng)
        except Exception as exc:  # report, keep going
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        all_ok &= bool(ok)
        out(f"{'PASS' if ok else 'FAIL'} {check.__name__[6:]}: {detail}")
    return all_ok
