"""Exact lattice computations for automorphism groups of nodal quartic K3 surfaces."""

__version__ = "0.1.0"
