"""Frequency-selective multi-dimensional spectral super-resolution."""

__version__ = "0.1.0"

from .admm import (
    AdmmParams,
    SolverOutput,
    default_lambda,
    solve_constrained,
    solve_regularized,
)
from .localization import (
    DualSurface,
    Estimate,
    dual_surface,
    estimate_gains,
    localize,
    locate_from_dual,
    locate_from_music,
    music_spectrum,
)
from .tensors import (
    Dims,
    Measurement,
    SpectralModel,
    atom,
    atom_vec,
    nmse,
    observe,
    snr_to_noise_var,
    steering_vector,
    synthesize,
)
from .toeplitz import (
    BandPolynomial,
    FrequencyBand,
    GeneratorTensor,
    PsdCertificate,
    band_polynomial,
    beta_weight,
    build_tg,
    build_toeplitz,
    check_fs_feasible,
    psd_project,
    toeplitz_average,
)
