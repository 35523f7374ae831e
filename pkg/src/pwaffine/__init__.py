"""Exact-arithmetic dynamics of piecewise ±(1/beta)-affine contractions and the switched server."""
from .errors import (
    BreakpointAnomaly,
    ConstructionViolation,
    CorrespondenceMismatch,
    PrecisionExhausted,
    Undecidable,
)
from .exactnum import (
    DigitStream,
    champernowne_stream,
    compare,
    decimal_string,
    digits_of_rational,
    offset_add,
    parse_number,
)
from .contraction import (
    PiecewiseAffineContraction,
    build_map,
    detect_cycle,
    evaluate,
    forward_orbit,
    image_components,
    preimage,
)
from .quasipart import analyze

__version__ = "0.1.0"
