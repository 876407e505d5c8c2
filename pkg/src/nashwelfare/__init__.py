"""Nash social welfare maximization for indivisible goods."""

from .binary import BinaryResult, initial_allocation, solve_binary
from .identical import efx_ratio_bound, gen_tight_example, solve_identical
from .model import (
    Allocation,
    ConcaveProfile,
    Instance,
    classify,
    parse_instance,
    serialize_instance,
    validate_allocation,
)
from .oracle import brute_force
from .welfare import NswValue, check_ef, check_efx, compare, nsw, nsw_concave

__version__ = "0.1.0"
