"""Beta-ensemble matrix models and their global spectral statistics."""
from .ensembles import (
    EnsembleSpec,
    GeneralModelSpec,
    LowerBidiagonal,
    TridiagonalSymmetric,
    hermite_beta_infinity,
    hermite_specialization,
    laguerre_beta_infinity,
    laguerre_specialization,
    sample_chi,
    sample_general,
    sample_hermite,
    sample_laguerre_factor,
)
from .errors import DomainError, EnumerationSizeError, SamplingError, UnsupportedOrderError
from .rng import RngStream

__version__ = "0.1.0"
