"""walklab: effective resistance and random-walk indices on Erdos-Renyi graphs.

The clash-removing two-root search, the strong k-path witness and its explicit
flow, exact walk indices, disjoint-path brackets and a deterministic Monte
Carlo harness.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .errors import (IdentityViolation, OracleRefused, ParameterError, PreconditionError,
                     SamplingExhausted, SolverError, VertexError, WalklabError)
from .graph import (Graph, GnpSample, NeighborhoodView, connected_components, derive_seed,
                    distance, edge_index, is_connected, neighborhood, sample_connected_gnp,
                    sample_gnp)
from .kernels import BACKEND

__all__ = [
    "BACKEND",
    "GnpSample",
    "Graph",
    "IdentityViolation",
    "NeighborhoodView",
    "OracleRefused",
    "ParameterError",
    "PreconditionError",
    "SamplingExhausted",
    "SolverError",
    "VertexError",
    "WalklabError",
    "connected_components",
    "derive_seed",
    "distance",
    "edge_index",
    "is_connected",
    "neighborhood",
    "sample_connected_gnp",
    "sample_gnp",
]
