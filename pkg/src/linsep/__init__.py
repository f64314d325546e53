"""Straggler-tolerant coding schemes for distributed linear-combination recovery.

A master wants a fixed set of linear combinations of K messages held by N
workers, must decode from any N_r answers, and each worker may store only the
minimum number of datasets.  This package constructs the coding schemes,
verifies their decodability exactly over a prime field, evaluates the
closed-form communication-cost bounds, and simulates the whole pipeline.
"""

from . import assignment, bounds, builder, codec, field, harness, serialize
from .errors import LinsepError

__all__ = [
    "assignment",
    "bounds",
    "builder",
    "codec",
    "field",
    "harness",
    "serialize",
    "LinsepError",
]
__version__ = "0.1.0"
