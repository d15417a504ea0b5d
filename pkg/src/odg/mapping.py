"""Local concept mapping tables.

Two tab-separated files stand in for a live terminology service:

* ``conso.tsv``: CUI, vocabulary, code, term string, preferred flag
  (``Y`` marks the preferred name row). No header.
* ``sty.tsv``: CUI, semantic-type name. No header.

The loader is the integration contract: every lookup the pipeline performs
resolves through the structures built here.
"""

from __future__ import annotations

import logging
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from pathlib import Path

from .relations import CUI_RE
from .resources import semantic_type_names

logger = logging.getLogger(__name__)

_PREFERRED_FLAGS = {"y", "1", "true"}


class MappingTableError(Exception):
    pass


@dataclass
class MappingTable:
    vocab_to_cui: dict[tuple[str, str], str] = field(default_factory=dict)
    cui_preferred_name: dict[str, str] = field(default_factory=dict)
    cui_semantic_types: dict[str, set[str]] = field(default_factory=dict)
    term_to_cui: dict[str, str] = field(default_factory=dict)
    skipped_rows: int = 0

    def lookup(self, vocab: str, code: str) -> str | None:
        return self.vocab_to_cui.get((vocab, code))

    def preferred_name(self, cui: str) -> str | None:
        return self.cui_preferred_name.get(cui)

    def semantic_types(self, cui: str) -> set[str]:
        return self.cui_semantic_types.get(cui, set())


def _winner(candidates: set[str], rows_per_cui: Counter) -> str:
    # collision rule: the CUI backed by more source rows wins, ties go to
    # the lexicographically smaller CUI; total and deterministic
    return min(candidates, key=lambda c: (-rows_per_cui[c], c))


def load_mapping_table(conso_file: str | Path, sty_file: str | Path) -> MappingTable:
    """Build a :class:`MappingTable` from the two TSV files.

    Rows with the wrong column count are skipped and counted. An empty
    concept file is an error; the pipeline cannot run without mappings.
    """
    table = MappingTable()
    rows_per_cui: Counter = Counter()
    vocab_candidates: dict[tuple[str, str], set[str]] = defaultdict(set)
    term_candidates: dict[str, set[str]] = defaultdict(set)
    first_preferred: dict[str, str] = {}
    all_terms: dict[str, set[str]] = defaultdict(set)

    with open(conso_file, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 5:
                table.skipped_rows += 1
                continue
            cui, sab, code, term, ispref = (p.strip() for p in parts)
            if not CUI_RE.match(cui) or not sab or not code or not term:
                table.skipped_rows += 1
                continue
            rows_per_cui[cui] += 1
            vocab_candidates[(sab, code)].add(cui)
            term_candidates[term.lower()].add(cui)
            all_terms[cui].add(term)
            if ispref.lower() in _PREFERRED_FLAGS and cui not in first_preferred:
                first_preferred[cui] = term

    if not rows_per_cui:
        raise MappingTableError(f"no usable rows in {conso_file}")

    for cui, terms in all_terms.items():
        table.cui_preferred_name[cui] = first_preferred.get(cui) or min(terms)
    for key, candidates in vocab_candidates.items():
        table.vocab_to_cui[key] = _winner(candidates, rows_per_cui)
    for term, candidates in term_candidates.items():
        table.term_to_cui[term] = _winner(candidates, rows_per_cui)

    known_types = semantic_type_names()
    with open(sty_file, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                table.skipped_rows += 1
                continue
            cui, sty = (p.strip() for p in parts)
            if cui not in table.cui_preferred_name:
                table.skipped_rows += 1
                logger.debug("semantic type for unknown concept %s skipped", cui)
                continue
            if sty not in known_types:
                table.skipped_rows += 1
                logger.warning("unknown semantic type %r skipped", sty)
                continue
            table.cui_semantic_types.setdefault(cui, set()).add(sty)

    if table.skipped_rows:
        logger.warning("mapping table loader skipped %d rows", table.skipped_rows)
    return table


def load_lexicon_table(conso_file: str | Path) -> MappingTable:
    """Concept-file-only variant used where only term lookups are needed."""
    table = MappingTable()
    rows_per_cui: Counter = Counter()
    term_candidates: dict[str, set[str]] = defaultdict(set)
    first_preferred: dict[str, str] = {}
    all_terms: dict[str, set[str]] = defaultdict(set)

    with open(conso_file, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 5:
                table.skipped_rows += 1
                continue
            cui, _sab, _code, term, ispref = (p.strip() for p in parts)
            if not CUI_RE.match(cui) or not term:
                table.skipped_rows += 1
                continue
            rows_per_cui[cui] += 1
            term_candidates[term.lower()].add(cui)
            all_terms[cui].add(term)
            if ispref.lower() in _PREFERRED_FLAGS and cui not in first_preferred:
                first_preferred[cui] = term

    if not rows_per_cui:
        raise MappingTableError(f"no usable rows in {conso_file}")
    for cui, terms in all_terms.items():
        table.cui_preferred_name[cui] = first_preferred.get(cui) or min(terms)
    for term, candidates in term_candidates.items():
        table.term_to_cui[term] = _winner(candidates, rows_per_cui)
    return table
