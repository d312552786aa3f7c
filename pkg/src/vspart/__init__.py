"""Vector space partitions of V(n, q): conditions, bounds, constructions and derivation."""
from .partition import ExplicitPartition, PartitionType, verify_partition
from .derive import FeasibilityChecker, FeasibilityVerdict, derived_type, feasible

__all__ = ["ExplicitPartition", "PartitionType", "verify_partition", "FeasibilityChecker",
           "FeasibilityVerdict", "derived_type", "feasible"]
