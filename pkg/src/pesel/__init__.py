"""Rank selection for PCA via penalized semi-integrated likelihood criteria.

Public surface: data ingestion and covariance spectra (:mod:`pesel.matrix`),
the four selection criteria (:mod:`pesel.criteria`), a brute-force reference
likelihood for validation (:mod:`pesel.reference`), synthetic data
generators (:mod:`pesel.simgen`) and a Monte Carlo benchmark harness
(:mod:`pesel.bench`). The ``pesel`` command line tool wraps the lot.
"""

from .criteria import (
    Asymptotic,
    CriterionTrace,
    EigenStructure,
    PeselVariant,
    ScoreParts,
    SelectionResult,
    auto_variant,
    effective_dimension,
    pesel_score,
    pesel_trace,
    select_k,
    sigma2_hat,
)
from .errors import (
    ConfigError,
    ConvergenceWarning,
    DegenerateDataError,
    DegenerateSignalError,
    DomainError,
    IngestError,
    ParseError,
    PeselError,
    SpikeBelowNoiseError,
)
from .matrix import (
    DataMatrix,
    EigenSpectrum,
    Orientation,
    center,
    covariance_spectrum,
    load_csv,
    transpose,
)
from .simgen import (
    NoiseFamily,
    Scenario,
    ScenarioSpec,
    SimulatedDataset,
    StudentScaling,
    add_noise,
    append_noise_vars,
    equalize_singular_values,
    exp_singular_values,
    gen_fixed_effect_signal,
    generate,
    standardize_columns,
)

__version__ = "0.1.0"

__all__ = [
    "Asymptotic",
    "ConfigError",
    "ConvergenceWarning",
    "CriterionTrace",
    "DataMatrix",
    "DegenerateDataError",
    "DegenerateSignalError",
    "DomainError",
    "EigenSpectrum",
    "EigenStructure",
    "IngestError",
    "NoiseFamily",
    "Orientation",
    "ParseError",
    "PeselError",
    "PeselVariant",
    "Scenario",
    "ScenarioSpec",
    "ScoreParts",
    "SelectionResult",
    "SimulatedDataset",
    "SpikeBelowNoiseError",
    "StudentScaling",
    "add_noise",
    "append_noise_vars",
    "auto_variant",
    "center",
    "covariance_spectrum",
    "effective_dimension",
    "equalize_singular_values",
    "exp_singular_values",
    "gen_fixed_effect_signal",
    "generate",
    "load_csv",
    "pesel_score",
    "pesel_trace",
    "select_k",
    "sigma2_hat",
    "standardize_columns",
    "transpose",
    "__version__",
]
