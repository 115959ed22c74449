"""Uniform linear array model: steering vectors, sources, snapshots, scenarios."""

import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .linalg_kernel import ContractError

SOURCE_MODELS = ("bpsk", "gaussian")


@dataclass(frozen=True)
class ScenarioConfig:
    """All parameters of one simulated DOA experiment.

    Angles are in degrees measured from the array axis, so broadside is 90°.
    ``snr_db`` is the per-source SNR with unit source power. ``correlation``
    only affects the first source pair under the ``gaussian`` model.
    ``subarray_n`` is required by the spatially smoothed estimators and
    ``assumed_q`` by the eigendecomposition baselines (defaults to ``q``).
    ``rank`` defaults to ``min(6, m)``.
    """

    m: int
    q: int
    doas_deg: tuple = ()
    snr_db: float = 0.0
    num_snapshots: int = 100
    source_model: str = "bpsk"
    correlation: float = 0.0
    rank: int | None = None
    alpha: float = 0.998
    delta: float = 5e-4
    grid_step_deg: float = 1.0
    subarray_n: int | None = None
    assumed_q: int | None = None
    rng_seed: int = 0
    d_over_lambda: float = 0.5
    top_k_peaks: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "doas_deg", tuple(float(t) for t in self.doas_deg))
        if self.rank is None:
            object.__setattr__(self, "rank", min(6, self.m))
        if self.m < 1:
            raise ContractError(f"m must be >= 1, got {self.m}")
        if not 0 <= self.q <= self.m:
            raise ContractError(f"need 0 <= q <= m, got q={self.q}, m={self.m}")
        if len(self.doas_deg) != self.q:
            raise ContractError(
                f"expected {self.q} DOAs, got {len(self.doas_deg)}")
        for t in self.doas_deg:
            if not 0.0 < t < 180.0:
                raise ContractError(f"DOA {t} outside the open interval (0, 180)")
        if len(set(self.doas_deg)) != len(self.doas_deg):
            raise ContractError("DOAs must be pairwise distinct")
        if self.num_snapshots < 1:
            raise ContractError("num_snapshots must be >= 1")
        if self.source_model not in SOURCE_MODELS:
            raise ContractError(
                f"source_model must be one of {SOURCE_MODELS}, got {self.source_model!r}")
        if not 0.0 <= self.correlation <= 1.0:
            raise ContractError(f"correlation must lie in [0, 1], got {self.correlation}")
        if not 1 <= self.rank <= self.m:
            raise ContractError(f"need 1 <= rank <= m, got rank={self.rank}")
        if not 0.0 < self.alpha <= 1.0:
            raise ContractError(f"alpha must lie in (0, 1], got {self.alpha}")
        if self.delta < 0:
            raise ContractError(f"delta must be nonnegative, got {self.delta}")
        steps = 180.0 / self.grid_step_deg if self.grid_step_deg > 0 else math.nan
        if not (steps >= 2 and abs(steps - round(steps)) < 1e-9):
            raise ContractError(
                f"180 / grid_step_deg must be an integer >= 2, got step {self.grid_step_deg}")
        if self.subarray_n is not None:
            n = self.subarray_n
            if not 1 <= n <= self.m:
                raise ContractError(f"need 1 <= subarray_n <= m, got {n}")
            if n < self.q or self.m - n + 1 < self.q:
                raise ContractError(
                    f"subarray_n={n} violates n >= q and m - n + 1 >= q for q={self.q}")
            if self.rank > n:
                raise ContractError(f"rank {self.rank} exceeds subarray size {n}")
        if self.assumed_q is not None and self.assumed_q < 1:
            raise ContractError("assumed_q must be >= 1")
        if self.d_over_lambda <= 0:
            raise ContractError("d_over_lambda must be positive")
        if self.top_k_peaks is not None and self.top_k_peaks < 1:
            raise ContractError("top_k_peaks must be >= 1")

    @property
    def q_w(self):
        return self.q if self.assumed_q is None else self.assumed_q

    @property
    def noise_var(self):
        return 10.0 ** (-self.snr_db / 10.0)

    @property
    def num_subarrays(self):
        if self.subarray_n is None:
            return None
        return self.m - self.subarray_n + 1

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def to_dict(self):
        d = dataclasses.asdict(self)
        d["doas_deg"] = list(self.doas_deg)
        return d


CONFIG_FIELDS = frozenset(f.name for f in dataclasses.fields(ScenarioConfig))


def read_mapping(path):
    """Reads a JSON or YAML mapping from ``path``."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".json":
        data = json.loads(text)
    else:
        data = yaml.safe_load(text)
    if not isinstance(data, dict):
        raise ContractError(f"{path}: top level must be a mapping")
    return data


def config_from_mapping(data, extra_keys=()):
    """Builds a ScenarioConfig; keys outside the field set (and ``extra_keys``) are rejected."""
    unknown = set(data) - CONFIG_FIELDS - set(extra_keys)
    if unknown:
        raise ContractError(f"unknown configuration keys: {sorted(unknown)}")
    return ScenarioConfig(**{k: v for k, v in data.items() if k in CONFIG_FIELDS})


def load_config(path):
    return config_from_mapping(read_mapping(path))


def steering_vector(theta_deg, m, d_over_lambda=0.5):
    """ULA response ``exp(-2j*pi*k*(d/lambda)*cos(theta))`` for k = 0..m-1."""
    if not 0.0 < theta_deg < 180.0:
        raise ContractError(f"angle {theta_deg} outside the open interval (0, 180)")
    if m < 1:
        raise ContractError(f"m must be >= 1, got {m}")
    k = np.arange(m)
    return np.exp(-2j * np.pi * k * d_over_lambda * np.cos(np.deg2rad(theta_deg)))


def steering_matrix(thetas_deg, m, d_over_lambda=0.5):
    """Stacks steering vectors column-wise, shape ``(m, len(thetas_deg))``."""
    thetas = np.atleast_1d(np.asarray(thetas_deg, dtype=float))
    if thetas.size and not np.all((thetas > 0.0) & (thetas < 180.0)):
        raise ContractError("all angles must lie in the open interval (0, 180)")
    k = np.arange(m)[:, None]
    return np.exp(-2j * np.pi * k * d_over_lambda * np.cos(np.deg2rad(thetas))[None, :])


def generate_sources(config, rng):
    """Draws the ``q x N`` real source matrix (unit power).

    Under the ``gaussian`` model the second source is
    ``c*s1 + sqrt(1 - c^2)*s3`` with ``s3`` an independent draw.
    """
    q, N = config.q, config.num_snapshots
    c = config.correlation
    if not 0.0 <= c <= 1.0:
        raise ContractError(f"correlation must lie in [0, 1], got {c}")
    if config.source_model == "bpsk":
        return rng.choice(np.array([-1.0, 1.0]), size=(q, N))
    S = rng.standard_normal((q, N))
    if q >= 2:
        s3 = rng.standard_normal(N)
        S[1] = c * S[0] + np.sqrt(1.0 - c * c) * s3
    return S


def generate_snapshots(config, rng):
    """Simulates ``X = A(theta) S + noise``, shape ``(m, N)``."""
    m, N = config.m, config.num_snapshots
    S = generate_sources(config, rng)
    if config.q:
        X = steering_matrix(config.doas_deg, m, config.d_over_lambda) @ S
    else:
        X = np.zeros((m, N), dtype=complex)
    sigma2 = config.noise_var
    noise = rng.standard_normal((m, N)) + 1j * rng.standard_normal((m, N))
    X = X + np.sqrt(sigma2 / 2.0) * noise
    return X


def exact_covariance(config, source_cov=None):
    """Analytic ``A R_s A^H + sigma_n^2 I`` for the configured sources.

    ``source_cov`` defaults to the model's own source covariance: identity,
    with off-diagonal ``c`` for the first pair under the gaussian model.
    """
    q, m = config.q, config.m
    if source_cov is None:
        source_cov = np.eye(q)
        if config.source_model == "gaussian" and q >= 2:
            source_cov[0, 1] = source_cov[1, 0] = config.correlation
    A = steering_matrix(config.doas_deg, m, config.d_over_lambda)
    return A @ np.asarray(source_cov) @ A.conj().T + config.noise_var * np.eye(m)
