import numpy as np
from hypothesis import assume, given, strategies as st

from jisodoa.array_model import ScenarioConfig, exact_covariance
from jisodoa.covariance import CovarianceEstimate
from jisodoa.estimators import Spectrum, capon_spectrum, scan_grid
from jisodoa.spectrum_search import (
    PeakSet,
    esprit_resolution_check,
    find_peaks,
    resolution_check,
)

GRID = scan_grid(1.0)


def _spec(power):
    power = np.asarray(power, dtype=float)
    return Spectrum(np.arange(1.0, power.size + 1), power)


def test_monotone_has_no_peaks():
    assert len(find_peaks(_spec(np.arange(1, 20)))) == 0


def test_single_bump():
    pk = find_peaks(_spec([1, 2, 5, 2, 1]))
    assert pk.peaks == ((3.0, 5.0),)


def test_endpoints_never_peak():
    assert len(find_peaks(_spec([9, 1, 1, 1, 9]))) == 0


def test_plateau_is_not_strict_peak():
    assert len(find_peaks(_spec([1, 3, 3, 1]))) == 0


def test_peaks_sorted_by_power():
    pk = find_peaks(_spec([0, 2, 0, 5, 0, 3, 0]))
    assert pk.angles == [4.0, 6.0, 2.0]


def test_top_k():
    pk = find_peaks(_spec([0, 2, 0, 5, 0, 3, 0]), top_k=2)
    assert pk.angles == [4.0, 6.0]


def test_exact_two_source_capon_peaks():
    cfg = ScenarioConfig(m=12, q=2, doas_deg=(60, 110), snr_db=0)
    s = capon_spectrum(CovarianceEstimate(exact_covariance(cfg)), GRID)
    assert sorted(find_peaks(s).angles[:2]) == [60.0, 110.0]


def test_resolution_within_tolerance():
    r = resolution_check(PeakSet(((50.4, 1.0),)), [50.0])
    assert r.resolved and abs(r.per_source_error_deg[0] - 0.4) < 1e-12


def test_resolution_boundary_is_strict():
    assert not resolution_check(PeakSet(((51.0, 1.0),)), [50.0]).resolved


def test_resolution_missing_peak():
    r = resolution_check(PeakSet(((50.0, 1.0),)), [50.0, 53.0])
    assert not r.resolved
    assert r.per_source_error_deg == (0.0, None)


def test_one_peak_cannot_claim_two_sources():
    assert not resolution_check(PeakSet(((50.5, 1.0),)), [50.0, 51.0]).resolved


def test_esprit_check_cases():
    assert esprit_resolution_check([50.0, 53.0], [50.0, 53.0]).resolved
    assert not esprit_resolution_check([], [50.0]).resolved
    assert esprit_resolution_check([53.2, 49.9], [50.0, 53.0]).resolved


power_lists = st.lists(st.floats(0.01, 100.0), min_size=3, max_size=40)


@given(power=power_lists, sources=st.lists(st.integers(1, 40), min_size=1, max_size=4, unique=True))
def test_resolution_invariant_under_monotone_rescaling(power, sources):
    s = _spec(power)
    t = Spectrum(s.grid, 10 * np.log10(s.power) + 50.0)
    u = Spectrum(s.grid, s.power ** 3)
    a = resolution_check(find_peaks(s), sources)
    assert a == resolution_check(find_peaks(t), sources)
    assert a == resolution_check(find_peaks(u), sources)


@given(peaks=st.lists(st.tuples(st.floats(1, 179), st.floats(0.1, 10)), max_size=6),
       sources=st.lists(st.floats(1, 179), min_size=1, max_size=3),
       extra=st.floats(1, 179), extra_power=st.floats(0.1, 20))
def test_far_peak_never_unresolves(peaks, sources, extra, extra_power):
    assume(all(abs(extra - s) >= 1.0 for s in sources))
    base = PeakSet(tuple(sorted(peaks, key=lambda p: -p[1])))
    more = PeakSet(tuple(sorted(peaks + [(extra, extra_power)], key=lambda p: -p[1])))
    if resolution_check(base, sources).resolved:
        assert resolution_check(more, sources).resolved


@given(est=st.lists(st.floats(1, 179), min_size=1, max_size=5), seed=st.integers(0, 1000))
def test_esprit_check_order_free_for_exact_estimates(est, seed):
    perm = np.random.default_rng(seed).permutation(len(est))
    assert esprit_resolution_check([est[i] for i in perm], est).resolved
