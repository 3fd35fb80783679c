"""Averages of tensor networks over random phase and sign vectors.

Expansions into weighted pairing diagrams, exact and sampling oracles, and
applications to locally diagonal invariant matrices and twirled maps.
"""

from .combinatorics import (
    UBP,
    EvenPartition,
    PartitionType,
    SetPartition,
    UniformBlockPermutation,
    cf_pi,
    cf_u,
    count_even_partitions,
    count_ubps,
    enumerate_even_partitions,
    enumerate_set_partitions,
    enumerate_ubps,
    moebius_partition,
    moebius_ubp,
)
from .errors import InvalidArgumentError, InvalidNetworkError, RandomBoxesPresentError, ResourceLimitError
from .expectation import PairingExpansion, build_paired, eval_injective, expand, expand_s, expand_u, expect
from .oracle import SampleConfig, exact, exact_s, exact_u, monte_carlo
from .tensor import Network, RandomBox, contract, delta_tensor

__version__ = "0.1.0"
