"""Determinisation and completion of finite tree automata with product-form output."""

from .boolean import (
    InclusionVerdict,
    complement,
    difference,
    included,
    intersect_product,
    nonempty_intersection,
    universal,
)
from .core import (
    Diagnostic,
    Fta,
    Signature,
    Symbol,
    Term,
    Transition,
    accepts,
    enumerate_terms,
    eval_states,
    is_complete,
    is_deterministic,
    parse_term,
    validate,
)
from .determinize import DetOptions, add_any, compute_states, determinize, ensure_any, universal_state
from .errors import ContractError, DeterminizationTimeout, ParseError, ResourceLimitExceeded, TreeDetError
from .product import Dfta, ProductFta, ProductTransition, defactor, estimate_expanded_count, expand, explicit
from .synth import synth_family
from .textbook import determinize_textbook
from .timbuk import StatsRecord, parse_product, parse_timbuk, serialize_product, serialize_timbuk, stats_record

__version__ = "0.1.0"

__all__ = [
    "ContractError", "DetOptions", "DeterminizationTimeout", "Dfta", "Diagnostic", "Fta",
    "InclusionVerdict", "ParseError", "ProductFta", "ProductTransition", "ResourceLimitExceeded",
    "Signature", "StatsRecord", "Symbol", "Term", "Transition", "TreeDetError",
    "accepts", "add_any", "complement", "compute_states", "defactor", "determinize",
    "determinize_textbook", "difference", "ensure_any", "enumerate_terms", "estimate_expanded_count",
    "eval_states", "expand", "explicit", "included", "intersect_product", "is_complete",
    "is_deterministic", "nonempty_intersection", "parse_product", "parse_term", "parse_timbuk",
    "serialize_product", "serialize_timbuk", "stats_record", "synth_family", "universal",
    "universal_state", "validate",
]
