"""Reduced-rank joint iterative subspace optimization (JISO) for DOA estimation.

Capon, MUSIC and ESPRIT baselines, spatial smoothing, and a Monte Carlo
harness for probability-of-resolution curves on a uniform linear array.
"""

from .array_model import (
    ScenarioConfig,
    generate_snapshots,
    generate_sources,
    load_config,
    steering_matrix,
    steering_vector,
)
from .covariance import (
    CovarianceEstimate,
    recursive_update,
    sample_covariance,
    smoothed_sample_covariance,
    spatial_smooth_accumulate,
)
from .estimators import (
    JisoDirectionState,
    Spectrum,
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
from .linalg_kernel import (
    ContractError,
    LinAlgFailure,
    hermitian_eig,
    hermitian_inverse_loaded,
    least_squares_solve,
)
from .spectrum_search import (
    PeakSet,
    ResolutionResult,
    esprit_resolution_check,
    find_peaks,
    resolution_check,
)

__version__ = "0.1.0"
