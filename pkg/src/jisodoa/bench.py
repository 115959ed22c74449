"""Monte Carlo probability-of-resolution sweeps and their CSV outputs.

Every trial draws its data from a seed derived only from
``(master_seed, snapshot-index, trial-index)`` via
:class:`numpy.random.SeedSequence` spawn keys, so results do not depend on
how trials are distributed over workers. All estimators in a trial see the
same snapshot matrix.
"""

import csv
import logging
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .array_model import ScenarioConfig, generate_snapshots
from .covariance import sample_covariance, smoothed_sample_covariance
from .estimators import (
    capon_spectrum,
    esprit_doas,
    jiso_spectrum,
    jiso_ss_spectrum,
    music_spectrum,
    scan_grid,
)
from .linalg_kernel import ContractError, LinAlgFailure
from .spectrum_search import (
    ResolutionResult,
    esprit_resolution_check,
    find_peaks,
    resolution_check,
)

log = logging.getLogger(__name__)

ESTIMATORS = ("capon", "music", "esprit", "jiso",
              "capon_ss", "music_ss", "esprit_ss", "jiso_ss")
DEFAULT_SWEEP = (10, 20, 30, 50, 70, 100, 150, 200, 300)
RESOLUTION_TOL_DEG = 1.0


def parse_estimators(names):
    if isinstance(names, str):
        names = [s.strip() for s in names.split(",") if s.strip()]
    names = tuple(names)
    unknown = [n for n in names if n not in ESTIMATORS]
    if unknown:
        raise ContractError(f"unknown estimators {unknown}; choose from {ESTIMATORS}")
    if len(set(names)) != len(names):
        raise ContractError(f"duplicate estimators in {names}")
    return names


def check_scenario_for(scenario, estimators):
    """Raises ContractError if ``scenario`` cannot run ``estimators``."""
    if any(e.endswith("_ss") for e in estimators) and scenario.subarray_n is None:
        raise ContractError("spatially smoothed estimators need subarray_n")
    q_w = scenario.q_w
    for e in estimators:
        if e in ("music", "esprit", "music_ss", "esprit_ss"):
            size = scenario.subarray_n if e.endswith("_ss") else scenario.m
            if not 1 <= q_w < size:
                raise ContractError(f"{e} needs 1 <= q_w < {size}, got q_w={q_w}")
    if scenario.q < 1 and estimators:
        raise ContractError("resolution needs at least one true source")


def estimator_outputs(X, scenario, estimators, grid=None):
    """Runs each estimator on ``X``.

    Returns a mapping from name to a :class:`Spectrum` (scanning estimators)
    or an array of angle estimates (ESPRIT variants).
    """
    if grid is None:
        grid = scan_grid(scenario.grid_step_deg)
    d = scenario.d_over_lambda
    out = {}
    R = Rs = None
    for name in estimators:
        if name in ("capon", "music", "esprit") and R is None:
            R = sample_covariance(X, scenario.delta)
        if name.endswith("_ss") and name != "jiso_ss" and Rs is None:
            Rs = smoothed_sample_covariance(X, scenario.subarray_n, scenario.delta)
        if name == "capon":
            out[name] = capon_spectrum(R, grid, d)
        elif name == "capon_ss":
            out[name] = capon_spectrum(Rs, grid, d)
        elif name == "music":
            out[name] = music_spectrum(R, scenario.q_w, grid, d)
        elif name == "music_ss":
            out[name] = music_spectrum(Rs, scenario.q_w, grid, d)
        elif name == "esprit":
            out[name] = esprit_doas(R, scenario.q_w, d)
        elif name == "esprit_ss":
            out[name] = esprit_doas(Rs, scenario.q_w, d)
        elif name == "jiso":
            out[name] = jiso_spectrum(X, scenario, grid)
        elif name == "jiso_ss":
            out[name] = jiso_ss_spectrum(X, scenario, grid)
        else:
            raise ContractError(f"unknown estimator {name!r}")
    return out


def judge(output, scenario):
    if isinstance(output, np.ndarray):
        return esprit_resolution_check(output, scenario.doas_deg, RESOLUTION_TOL_DEG)
    peaks = find_peaks(output, scenario.top_k_peaks)
    return resolution_check(peaks, scenario.doas_deg, RESOLUTION_TOL_DEG)


def run_trial(scenario, estimators, trial_seed):
    """One Monte Carlo trial: shared data, one verdict per estimator.

    ``trial_seed`` is anything :func:`numpy.random.default_rng` accepts.
    Numerical failures of an estimator count as unresolved.
    """
    estimators = parse_estimators(estimators)
    check_scenario_for(scenario, estimators)
    rng = np.random.default_rng(trial_seed)
    X = generate_snapshots(scenario, rng)
    grid = scan_grid(scenario.grid_step_deg)
    verdicts = {}
    for name in estimators:
        try:
            output = estimator_outputs(X, scenario, (name,), grid)[name]
            verdicts[name] = judge(output, scenario)
        except (LinAlgFailure, np.linalg.LinAlgError, ArithmeticError) as exc:
            log.warning("estimator %s failed: %s", name, exc)
            verdicts[name] = ResolutionResult(
                False, (None,) * scenario.q, f"{type(exc).__name__}: {exc}")
    return verdicts


def trial_seed(master_seed, n_index, trial_index):
    return np.random.SeedSequence(master_seed, spawn_key=(n_index, trial_index))


@dataclass(frozen=True)
class ExperimentPlan:
    scenario: ScenarioConfig
    estimators: tuple = ESTIMATORS
    snapshot_sweep: tuple = DEFAULT_SWEEP
    trials: int = 100
    master_seed: int = 0
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "estimators", parse_estimators(self.estimators))
        sweep = tuple(int(n) for n in self.snapshot_sweep)
        object.__setattr__(self, "snapshot_sweep", sweep)
        if self.trials < 1:
            raise ContractError(f"trials must be >= 1, got {self.trials}")
        if not sweep or sweep[0] < 1 or any(b <= a for a, b in zip(sweep, sweep[1:])):
            raise ContractError(f"snapshot_sweep must be positive and ascending, got {sweep}")
        if self.workers < 1:
            raise ContractError("workers must be >= 1")
        check_scenario_for(self.scenario, self.estimators)


@dataclass
class CurveTable:
    """Resolved counts per (estimator, snapshot count)."""

    estimators: tuple
    snapshot_sweep: tuple
    trials: int
    resolved: dict = field(default_factory=dict)

    def count(self, estimator, n):
        return self.resolved.get((estimator, n), 0)

    def p_res(self, estimator, n):
        return self.count(estimator, n) / self.trials

    def curve(self, estimator):
        return [self.p_res(estimator, n) for n in self.snapshot_sweep]

    def rows(self):
        for est in self.estimators:
            for n in self.snapshot_sweep:
                yield est, n, self.count(est, n), self.trials, self.p_res(est, n)


def _run_block(args):
    scenario, estimators, master_seed, n_index, trial_indices = args
    counts = defaultdict(int)
    for t in trial_indices:
        verdicts = run_trial(scenario, estimators, trial_seed(master_seed, n_index, t))
        for name, v in verdicts.items():
            counts[name] += int(v.resolved)
    return n_index, dict(counts)


def run_sweep(plan, progress=None):
    """Probability of resolution for every estimator and snapshot count."""
    blocks = []
    chunk = max(1, plan.trials // (4 * plan.workers)) if plan.workers > 1 else plan.trials
    for n_index, n in enumerate(plan.snapshot_sweep):
        scenario = plan.scenario.replace(num_snapshots=n)
        for start in range(0, plan.trials, chunk):
            idx = range(start, min(start + chunk, plan.trials))
            blocks.append((scenario, plan.estimators, plan.master_seed, n_index, idx))

    totals = defaultdict(int)

    def absorb(result):
        n_index, counts = result
        n = plan.snapshot_sweep[n_index]
        for name, c in counts.items():
            totals[(name, n)] += c
        if progress is not None:
            progress(n)

    if plan.workers == 1:
        for b in blocks:
            absorb(_run_block(b))
    else:
        with ProcessPoolExecutor(max_workers=plan.workers) as pool:
            for result in pool.map(_run_block, blocks):
                absorb(result)
    return CurveTable(plan.estimators, plan.snapshot_sweep, plan.trials, dict(totals))


def first_reaching(table, estimator, level):
    """Smallest swept N with ``p_res >= level``, or None."""
    for n in table.snapshot_sweep:
        if table.p_res(estimator, n) >= level:
            return n
    return None


PLOT_SCRIPT = '''\
"""Plots the curves written next to this script (needs matplotlib)."""
import csv
import glob
import os
from collections import defaultdict

import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
curves = defaultdict(list)
with open(os.path.join(here, "curves.csv"), newline="") as fh:
    for row in csv.DictReader(fh):
        curves[row["estimator"]].append((int(row["n_snapshots"]), float(row["p_res"])))
if curves:
    plt.figure()
    for name, pts in curves.items():
        pts.sort()
        plt.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", label=name)
    plt.xlabel("number of snapshots")
    plt.ylabel("probability of resolution")
    plt.ylim(-0.02, 1.02)
    plt.grid(True)
    plt.legend()
    plt.savefig(os.path.join(here, "curves.png"), dpi=120)
spectra = sorted(glob.glob(os.path.join(here, "spectrum_*.csv")))
if spectra:
    plt.figure()
    for path in spectra:
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        label = os.path.basename(path)[len("spectrum_"):-len(".csv")]
        plt.plot([float(r["theta_deg"]) for r in rows],
                 [float(r["power_db"]) for r in rows], label=label)
    plt.xlabel("theta (deg)")
    plt.ylabel("normalized power (dB)")
    plt.grid(True)
    plt.legend()
    plt.savefig(os.path.join(here, "spectra.png"), dpi=120)
'''


def _write_csv(path, header, rows):
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def emit_outputs(table, spectra=None, out_dir="."):
    """Writes ``curves.csv``, optional per-estimator spectra, and ``plot_curves.py``.

    ``spectra`` maps estimator names to a Spectrum or, for ESPRIT variants,
    an array of angle estimates (written as ``estimates_<name>.csv``).
    Returns the list of written paths.
    """
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc}") from exc
    written = []
    if table is not None:
        path = out / "curves.csv"
        _write_csv(path, ("estimator", "n_snapshots", "resolved", "trials", "p_res"),
                   ((e, n, c, k, repr(float(p))) for e, n, c, k, p in table.rows()))
        written.append(path)
    for name, s in (spectra or {}).items():
        if isinstance(s, np.ndarray):
            path = out / f"estimates_{name}.csv"
            _write_csv(path, ("theta_deg",), ((repr(float(t)),) for t in s))
        else:
            path = out / f"spectrum_{name}.csv"
            _write_csv(path, ("theta_deg", "power_db"),
                       ((repr(float(t)), repr(float(p)))
                        for t, p in zip(s.grid, s.power_db())))
        written.append(path)
    path = out / "plot_curves.py"
    try:
        path.write_text(PLOT_SCRIPT, encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    written.append(path)
    return written
