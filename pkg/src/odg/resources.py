"""Loaders for the data files shipped inside the package."""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources


def _read_text(name: str) -> str:
    return resources.files("odg.data").joinpath(name).read_text(encoding="utf-8")


def _read_lines(name: str) -> list[str]:
    return [ln.strip() for ln in _read_text(name).splitlines() if ln.strip()]


@lru_cache(maxsize=None)
def semantic_type_names() -> frozenset[str]:
    """The closed set of semantic-type names a concept may carry."""
    return frozenset(_read_lines("semantic_types.txt"))


@lru_cache(maxsize=None)
def semantic_relation_labels() -> frozenset[str]:
    """Canonical relation labels accepted for extracted predications."""
    return frozenset(_read_lines("semantic_relations.txt"))


@lru_cache(maxsize=None)
def abbreviation_stoplist() -> tuple[str, ...]:
    """Tokens that suppress a sentence split when they precede the period."""
    return tuple(_read_lines("abbreviations.txt"))


@lru_cache(maxsize=None)
def default_semrep_columns() -> dict:
    """Field-index map for fielded extraction output (see data file)."""
    return json.loads(_read_text("semrep_columns.json"))


@lru_cache(maxsize=None)
def predicate_label_map() -> dict[str, str]:
    """Source-specific predicate spellings mapped to canonical edge labels."""
    raw = json.loads(_read_text("predicate_labels.json"))
    return {k: v for k, v in raw.items() if not k.startswith("_")}
