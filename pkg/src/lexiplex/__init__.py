"""Multilayer lexical-network toolkit.

A multilingual mental lexicon is modeled as one node set spread over
relation layers (free association, feature sharing, co-occurrence,
phonological similarity) plus a visual grounding layer. On top of that
network this package computes largest viable clusters, simulates
vocabulary growth and attribute-reshuffling null models, runs spreading
activation with cross-language and cross-modal routes, scores translation
responses against reference embeddings, and drives the VT/OT experiment
protocol end to end.
"""

from .errors import LexiplexError, error_code
from .multiplex import (
    Edge,
    Layer,
    LexicalAttributes,
    MultiplexNetwork,
    WordNode,
    load_network,
    save_network,
)
from .viability import (
    ViabilitySpec,
    ViableClusterResult,
    brute_force_lvc,
    default_spec,
    is_viable,
    largest_viable_cluster,
)

__version__ = "0.1.0"

__all__ = [
    "Edge",
    "Layer",
    "LexicalAttributes",
    "LexiplexError",
    "MultiplexNetwork",
    "ViabilitySpec",
    "ViableClusterResult",
    "WordNode",
    "brute_force_lvc",
    "default_spec",
    "error_code",
    "is_viable",
    "largest_viable_cluster",
    "load_network",
    "save_network",
    "__version__",
]
