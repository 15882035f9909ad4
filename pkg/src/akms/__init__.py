"""alpha-kappa-mu shadowed (alpha-KMS) fading: distribution, metrics and sampling."""

from .core import AkmsParams, EnvelopeParams, cdf, envelope_pdf, moment, normalization_c, pdf
from .errors import AkmsError, ConsistencyError, ConvergenceError, DomainError

__all__ = [
    "AkmsParams",
    "EnvelopeParams",
    "cdf",
    "envelope_pdf",
    "moment",
    "normalization_c",
    "pdf",
    "AkmsError",
    "ConsistencyError",
    "ConvergenceError",
    "DomainError",
]
__version__ = "0.1.0"
