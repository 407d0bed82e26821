"""U_q(sl(3)) representations in the Gelfand-Zetlin basis, generic q and odd roots of unity."""

from .gzbasis import GZPattern, RepLabel, dimension, enumerate_basis
from .qarith import QParam
from .repgeneric import build_all, build_operator, verify_generic
from .rootlimit import limit_oracle, regularize, regularized_operator, verify_root
from .structure import analyze, classify

__version__ = "0.1.0"

__all__ = [
    "GZPattern",
    "RepLabel",
    "QParam",
    "dimension",
    "enumerate_basis",
    "build_all",
    "build_operator",
    "verify_generic",
    "regularize",
    "regularized_operator",
    "limit_oracle",
    "verify_root",
    "analyze",
    "classify",
]
