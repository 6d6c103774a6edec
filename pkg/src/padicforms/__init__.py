"""p-adic quadratic spaces and their embeddings into Euclidean and Lorentzian spaces."""

from .embed import (
    EmbedDecision,
    Family,
    Reason,
    TargetSpace,
    Witness,
    decide,
    embeds_by_invariants,
    hensel_constants,
    max_isotropic_dim,
    min_dimension,
    witness,
)
from .forms import DiagonalForm, GramForm, diag, diagonalize, equivalent, invariants, parse_form
from .padic import PAdicNumber, PrimeContext, from_rational, hensel_lift, sqrt
from .symbols import SquareClass, classify, hilbert

__all__ = [
    "DiagonalForm",
    "EmbedDecision",
    "Family",
    "GramForm",
    "PAdicNumber",
    "PrimeContext",
    "Reason",
    "SquareClass",
    "TargetSpace",
    "Witness",
    "classify",
    "decide",
    "diag",
    "diagonalize",
    "embeds_by_invariants",
    "equivalent",
    "from_rational",
    "hensel_constants",
    "hensel_lift",
    "hilbert",
    "invariants",
    "max_isotropic_dim",
    "min_dimension",
    "parse_form",
    "sqrt",
    "witness",
]
