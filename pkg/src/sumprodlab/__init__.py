"""Exact sum-product, incidence and Z/p^3Z bisector experiments.

Every closed-form quantity in the toolkit has a brute-force twin; the test
suite and the ``sumprodlab`` CLI compare the two.
"""

__version__ = "0.1.0"

from .ring import Modulus, RingElem, inverse, is_unit, legendre, sqrt_count, sqrt_count_oracle  # noqa: E402
from .setalg import FiniteSet, Universe  # noqa: E402

__all__ = [
    "Modulus",
    "RingElem",
    "inverse",
    "is_unit",
    "legendre",
    "sqrt_count",
    "sqrt_count_oracle",
    "FiniteSet",
    "Universe",
]
