"""Dictionary concept tagger: longest-match scan against a term lexicon.

This is the built-in extraction path. It is deliberately dumb and fully
deterministic: case-insensitive, word-boundary aligned, longest match wins,
and a match consumes its span so shorter overlapping terms are suppressed.
"""

from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass
from typing import Mapping

from .text import CleanText

_WORD_RE = re.compile(r"\w+")


@dataclass(frozen=True)
class ConceptMention:
    cui: str
    matched_text: str
    pmid: str
    sentence_index: int
    start: int
    end: int


class Lexicon:
    """Lowercased term string -> CUI, indexed by first word for scanning."""

    def __init__(self, term_to_cui: Mapping[str, str]):
        self.term_to_cui = {t.lower(): c for t, c in term_to_cui.items() if t.strip()}
        self._by_first_word: dict[str, list[str]] = defaultdict(list)
        for term in self.term_to_cui:
            m = _WORD_RE.search(term)
            if not m or m.start() != 0:
                continue  # terms not starting with a word character are unscannable
            self._by_first_word[m.group(0)].append(term)
        for terms in self._by_first_word.values():
            terms.sort(key=len, reverse=True)

    def candidates(self, first_word: str) -> list[str]:
        return self._by_first_word.get(first_word, [])

    def __len__(self):
        return len(self.term_to_cui)


def _is_word_char(ch: str) -> bool:
    return ch.isalnum() or ch == "_"


def extract_mentions(clean: CleanText, lexicon) -> list[ConceptMention]:
    """Scan each sentence left to right, longest lexicon match first.

    ``lexicon`` may be a prebuilt :class:`Lexicon`, a mapping table exposing
    ``term_to_cui``, or a plain term-to-CUI mapping (callers in a loop should
    prebuild the :class:`Lexicon` once). Mention spans are absolute positions
    in :attr:`CleanText.full_text`, so they always fall inside their
    sentence's span.
    """
    if not isinstance(lexicon, Lexicon):
        lexicon = Lexicon(getattr(lexicon, "term_to_cui", lexicon))
    mentions = []
    for sent in clean.sentences:
        low = sent.text.lower()
        for m in _WORD_RE.finditer(low):
            pos = m.start()
            if mentions and mentions[-1].sentence_index == sent.index:
                if sent.start + pos < mentions[-1].end:
                    continue  # inside a span already consumed by a longer match
            for term in lexicon.candidates(m.group(0)):
                end = pos + len(term)
                if not low.startswith(term, pos):
                    continue
                if end < len(low) and _is_word_char(low[end]):
                    continue  # not aligned to a word boundary
                mentions.append(
                    ConceptMention(
                        cui=lexicon.term_to_cui[term],
                        matched_text=sent.text[pos:end],
                        pmid=clean.pmid,
                        sentence_index=sent.index,
                        start=sent.start + pos,
                        end=sent.start + end,
                    )
                )
                break
    return mentions
