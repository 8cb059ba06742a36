"""Search for points of small canonical height on elliptic curves over
quadratic fields, driven by elliptic divisibility sequences."""

from .quadring import FieldElem, FieldSpec, NotDivisible, RingElem, field
from .eds import Block, EDSTuple, InvalidTuple, double, initial_block, term_naive, terms_at_power
from .heights import GcdEstimate, TorsionSuspected, gcd_estimate

__version__ = "0.1.0"

__all__ = [
    "Block",
    "EDSTuple",
    "FieldElem",
    "FieldSpec",
    "GcdEstimate",
    "InvalidTuple",
    "NotDivisible",
    "RingElem",
    "TorsionSuspected",
    "double",
    "field",
    "gcd_estimate",
    "initial_block",
    "term_naive",
    "terms_at_power",
]
