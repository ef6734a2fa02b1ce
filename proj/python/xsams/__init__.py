"""Provenance-aware XSAMS toolkit (Python bindings)."""

from ._core import (
    QueryStore,
    XsamsError,
    bibtex,
    canonical_digest,
    canonical_form,
    evaluate_query,
    merge,
    node_query,
    parse_query,
    render_query,
    roundtrip,
    validate,
)

__all__ = [
    "QueryStore",
    "XsamsError",
    "bibtex",
    "canonical_digest",
    "canonical_form",
    "evaluate_query",
    "merge",
    "node_query",
    "parse_query",
    "render_query",
    "roundtrip",
    "validate",
]
