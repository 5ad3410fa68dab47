"""Numerical laboratory for asymmetric cloning and broadcasting of two-qubit correlations."""

__version__ = "0.1.0"

from qbroadcast.qcore import (
    CanonicalTwoQubit,
    CapacityError,
    DensityOp,
    InvalidStateError,
    Isometry,
    WireMap,
    apply_isometry,
    from_canonical,
    partial_trace,
    permute_wires,
    tensor,
    to_canonical,
)
from qbroadcast.measures import (
    concurrence,
    geometric_discord,
    linear_entropy,
    ph_report,
)

__all__ = [
    "CanonicalTwoQubit",
    "CapacityError",
    "DensityOp",
    "InvalidStateError",
    "Isometry",
    "WireMap",
    "apply_isometry",
    "concurrence",
    "from_canonical",
    "geometric_discord",
    "linear_entropy",
    "partial_trace",
    "permute_wires",
    "ph_report",
    "tensor",
    "to_canonical",
]
