"""Levy white noise on periodic grids: simulation from a characteristic
triplet, spectral solution of linear and semilinear equations driven by the
noise, and regularity/admissibility diagnostics via weighted Besov norms."""

from .besov import (
    BesovParams,
    BlockNorm,
    DyadicPartition,
    Embedding,
    besov_norm,
    besov_profile,
    embedding_check,
    lp_block,
    make_partition,
    sobolev_equivalence_bracket,
    sobolev_norm,
    spectral_sobolev_norm,
)
from .errors import (
    BlockTruncatedWarning,
    DimensionMismatch,
    DivergentIntegral,
    DomainTagMismatch,
    FitFailed,
    InvalidDelta,
    InvalidR,
    LspdeError,
    MalformedHeader,
    MaxIterExceeded,
    NotAContraction,
    PreconditionViolated,
    ShapeMismatch,
    Unbounded,
    ZeroOnAxis,
)
from .fields import (
    Field,
    Grid,
    dft,
    field_to_csv,
    from_function,
    gaussian_bump,
    idft,
    read_field,
    rolled,
    weighted_lr_norm,
    write_field,
    zeros,
)
from .linear import (
    StationarityReport,
    VarianceSpectrum,
    apply_multiplier,
    bump_battery,
    solve_linear,
    spectral_residual,
    stationarity_test,
    variance_spectrum,
)
from .measures import LevyMeasure, PowerDensity, TabulatedDensity
from .noise import (
    ExpDecayProfile,
    LevyNoiseSampler,
    LevyTriplet,
    NoiseRealization,
    WeightFunction,
    characteristic_functional,
    distribution_function,
    levy_symbol,
    sample_noise,
    ultra_admissibility,
)
from .polynomials import (
    DecayOrderFit,
    MultiPoly,
    RationalMultiplier,
    estimate_decay_order,
    eval_at_i_xi,
    min_modulus_on_grid,
)
from .semilinear import (
    ContractionCertificate,
    Nonlinearity,
    PicardResult,
    certify_contraction,
    continuum_condition,
    estimate_operator_norms,
    exact_operator_norms,
    picard_solve,
    solution_continuity_probe,
)

__version__ = "0.1.0"
