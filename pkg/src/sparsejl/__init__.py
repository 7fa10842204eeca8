"""Sparse Johnson-Lindenstrauss transforms built from a hash function.

Typical use::

    from sparsejl import derive_params, SparseJL
    p = derive_params(epsilon=0.5, delta=0.05, d=10_000, seed=1)
    y = SparseJL.from_params(p).apply(x)   # x: dense array or SparseVector
"""
from sparsejl.hashing import HashProjection, ProjectionMismatch, Sketch
from sparsejl.params import (DEFAULT_SEED, AssumptionWarning, JLParams, ParameterError, derive_params,
                             validate_assumptions)
from sparsejl.preconditioners import (BlockHadamard, BucketStats, ReplicationPlan, block_apply, bucket_stats,
                                      fwht_in_place, replicate)
from sparsejl.randomness import SeededSource, Tag
from sparsejl.transforms import (HadamardJL, HadamardPreconditionError, L1Embed, SparseJL, auto_apply, hg_apply,
                                 l1_estimate, phi_apply)
from sparsejl.vectors import SparseVector

__all__ = [
    "DEFAULT_SEED", "AssumptionWarning", "BlockHadamard", "BucketStats", "HadamardJL",
    "HadamardPreconditionError", "HashProjection", "JLParams", "L1Embed", "ParameterError",
    "ProjectionMismatch", "ReplicationPlan", "SeededSource", "Sketch", "SparseJL", "SparseVector", "Tag",
    "auto_apply", "block_apply", "bucket_stats", "derive_params", "fwht_in_place", "hg_apply",
    "l1_estimate", "phi_apply", "replicate", "validate_assumptions",
]
