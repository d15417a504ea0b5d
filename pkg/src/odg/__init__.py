"""Disease-centric biomedical knowledge graph toolkit.

Harvests disease-relevant literature and structured resources, extracts
concept-level knowledge, normalizes everything to UMLS concept identifiers,
and materializes a provenance-aware property graph with a set of analytical
queries on top. The ``odg`` command line exposes each stage independently as
well as an end-to-end pipeline.
"""

__version__ = "0.1.0"

__all__ = ["__version__"]
