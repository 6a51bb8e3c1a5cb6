"""Binary quadratic forms, class-group characters and second moments of r_{2,N}(n)."""

from .forms import QuadForm, enumerate_class_group, reduce
from .ideals import bulk_counts, enumerate_ideals, r_direct
from .lfunc import constants_bundle, leading_constant
from .moments import accumulate_r_squared

__all__ = [
    "QuadForm",
    "accumulate_r_squared",
    "bulk_counts",
    "constants_bundle",
    "enumerate_class_group",
    "enumerate_ideals",
    "leading_constant",
    "r_direct",
    "reduce",
]
__version__ = "0.1.0"
