import cmath
import json
import math

import numpy as np
import pytest

from jisodoa.array_model import (
    ScenarioConfig,
    exact_covariance,
    generate_snapshots,
    generate_sources,
    load_config,
    steering_matrix,
    steering_vector,
)
from jisodoa.linalg_kernel import ContractError


def test_steering_broadside():
    assert np.allclose(steering_vector(90, 4), np.ones(4))


def test_steering_sixty_degrees():
    assert np.allclose(steering_vector(60, 4), [1, -1j, -1, 1j])


def test_steering_against_scalar_formula():
    a = steering_vector(45, 8, 0.5)
    for k in range(8):
        expected = cmath.exp(-2j * math.pi * k * 0.5 * math.cos(math.radians(45)))
        assert abs(a[k] - expected) < 1e-14
    assert a[0] == 1
    assert np.allclose(np.abs(a), 1)


@pytest.mark.parametrize("theta", [0.0, 180.0, -5.0, 200.0])
def test_steering_rejects_out_of_range(theta):
    with pytest.raises(ContractError):
        steering_vector(theta, 4)


def test_grid_steering_vectors_independent():
    A = steering_matrix([10, 40, 70, 100, 130], 6)
    assert np.linalg.matrix_rank(A) == 5


def test_steering_matrix_columns():
    A = steering_matrix([30, 120], 5, 0.5)
    assert np.allclose(A[:, 1], steering_vector(120, 5))


def _gauss(c, N=1000, q=2):
    return ScenarioConfig(m=4, q=q, doas_deg=(50, 80, 110)[:q], num_snapshots=N,
                          source_model="gaussian", correlation=c)


def test_fully_correlated_rows_identical():
    S = generate_sources(_gauss(1.0), np.random.default_rng(0))
    assert np.array_equal(S[0], S[1])


def test_uncorrelated_rows_independent():
    S = generate_sources(_gauss(0.0, N=100_000), np.random.default_rng(1))
    assert abs(np.corrcoef(S[0], S[1])[0, 1]) < 0.01


def test_partial_correlation_moment():
    S = generate_sources(_gauss(0.9, N=100_000), np.random.default_rng(2))
    assert abs(np.corrcoef(S[0], S[1])[0, 1] - 0.9) < 0.01


def test_bpsk_symbols():
    cfg = ScenarioConfig(m=4, q=3, doas_deg=(50, 80, 110), num_snapshots=500)
    S = generate_sources(cfg, np.random.default_rng(3))
    assert set(np.unique(S)) == {-1.0, 1.0}


def test_correlation_out_of_range():
    with pytest.raises(ContractError):
        _gauss(1.5)


def test_noiseless_broadside_columns():
    cfg = ScenarioConfig(m=5, q=1, doas_deg=(90,), snr_db=math.inf, num_snapshots=20)
    rng = np.random.default_rng(4)
    X = generate_snapshots(cfg, rng)
    S = generate_sources(cfg, np.random.default_rng(4))
    assert np.allclose(X, np.ones((5, 1)) * S[0])


def test_noise_only_covariance_moment():
    cfg = ScenarioConfig(m=4, q=0, snr_db=3.0, num_snapshots=100_000)
    X = generate_snapshots(cfg, np.random.default_rng(5))
    R = X @ X.conj().T / X.shape[1]
    target = cfg.noise_var * np.eye(4)
    assert np.linalg.norm(R - target) / np.linalg.norm(target) < 0.02


def test_covariance_moment_matches_model():
    cfg = ScenarioConfig(m=3, q=2, doas_deg=(60, 100), snr_db=0, num_snapshots=200_000,
                         source_model="gaussian", correlation=0.5)
    X = generate_snapshots(cfg, np.random.default_rng(6))
    R = X @ X.conj().T / X.shape[1]
    R_true = exact_covariance(cfg)
    assert np.linalg.norm(R - R_true) / np.linalg.norm(R_true) < 0.02


def test_snapshots_deterministic():
    cfg = ScenarioConfig(m=6, q=2, doas_deg=(50, 53), snr_db=-2, num_snapshots=30)
    a = generate_snapshots(cfg, np.random.default_rng(7))
    b = generate_snapshots(cfg, np.random.default_rng(7))
    assert np.array_equal(a, b)


@pytest.mark.parametrize("kwargs", [
    dict(m=4, q=5, doas_deg=(10, 20, 30, 40, 50)),
    dict(m=4, q=2, doas_deg=(10,)),
    dict(m=4, q=2, doas_deg=(10, 10)),
    dict(m=4, q=1, doas_deg=(180,)),
    dict(m=4, q=1, doas_deg=(30,), grid_step_deg=0.7),
    dict(m=4, q=1, doas_deg=(30,), rank=5),
    dict(m=4, q=1, doas_deg=(30,), alpha=0.0),
    dict(m=6, q=2, doas_deg=(30, 60), subarray_n=6),
    dict(m=6, q=2, doas_deg=(30, 60), subarray_n=1),
])
def test_config_invariants(kwargs):
    with pytest.raises(ContractError):
        ScenarioConfig(**kwargs)


def test_load_config_json_and_yaml(tmp_path):
    data = {"m": 8, "q": 2, "doas_deg": [50, 53], "snr_db": -2, "subarray_n": 6}
    p = tmp_path / "s.json"
    p.write_text(json.dumps(data))
    cfg = load_config(p)
    assert cfg.doas_deg == (50.0, 53.0) and cfg.subarray_n == 6
    y = tmp_path / "s.yaml"
    y.write_text("m: 8\nq: 1\ndoas_deg: [40]\n")
    assert load_config(y).m == 8


def test_load_config_rejects_unknown_keys(tmp_path):
    p = tmp_path / "s.json"
    p.write_text(json.dumps({"m": 8, "q": 0, "colour": "red"}))
    with pytest.raises(ContractError, match="colour"):
        load_config(p)
