"""Grid peak picking and the per-trial resolution verdict."""

from dataclasses import dataclass

import numpy as np

UNMATCHED = None


@dataclass(frozen=True)
class PeakSet:
    """Strict interior local maxima as ``(theta_deg, power)``, strongest first."""

    peaks: tuple

    @property
    def angles(self):
        return [t for t, _ in self.peaks]

    def __len__(self):
        return len(self.peaks)


@dataclass(frozen=True)
class ResolutionResult:
    resolved: bool
    per_source_error_deg: tuple
    diagnostic: str = ""


def find_peaks(spectrum, top_k=None):
    """All grid points whose power strictly exceeds both neighbours.

    Endpoints never qualify. ``top_k`` keeps only the strongest peaks.
    """
    p = np.asarray(spectrum.power, dtype=float)
    grid = np.asarray(spectrum.grid, dtype=float)
    if p.size < 3:
        return PeakSet(())
    inner = np.flatnonzero((p[1:-1] > p[:-2]) & (p[1:-1] > p[2:])) + 1
    # stable sort keeps ascending-angle order among equal powers
    order = inner[np.argsort(-p[inner], kind="stable")]
    if top_k is not None:
        order = order[:top_k]
    return PeakSet(tuple((float(grid[k]), float(p[k])) for k in order))


def _greedy_match(candidates, true_doas, tol_deg):
    true_doas = [float(t) for t in true_doas]
    errors = [UNMATCHED] * len(true_doas)
    for theta in candidates:
        best, best_err = None, None
        for k, t in enumerate(true_doas):
            if errors[k] is not UNMATCHED:
                continue
            err = abs(theta - t)
            if err < tol_deg and (best_err is None or err < best_err):
                best, best_err = k, err
        if best is not None:
            errors[best] = best_err
    resolved = all(e is not UNMATCHED for e in errors)
    return ResolutionResult(resolved, tuple(errors))


def resolution_check(peaks, true_doas, tol_deg=1.0):
    """Greedy matching from the strongest peak down.

    Each peak claims at most one still-unmatched source strictly within
    ``tol_deg``; the trial is resolved when every source has been claimed.
    """
    if len(true_doas) == 0:
        raise ValueError("need at least one true DOA")
    return _greedy_match(peaks.angles, true_doas, tol_deg)


def esprit_resolution_check(estimates, true_doas, tol_deg=1.0):
    """Same greedy matching for point estimates, taken in the given order."""
    return _greedy_match([float(e) for e in estimates], true_doas, tol_deg)
