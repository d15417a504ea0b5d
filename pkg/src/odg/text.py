"""Text cleanup and sentence segmentation for harvested articles."""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .records import ArticleRecord
from .resources import abbreviation_stoplist

# LaTeX leftovers: inline math spans, \command{...} (applied repeatedly so
# simple nesting unwinds), then bare \command tokens.
_MATH_RE = re.compile(r"\$[^$]*\$")
_CMD_BRACE_RE = re.compile(r"\\[A-Za-z]+\s*\{[^{}]*\}")
_BARE_CMD_RE = re.compile(r"\\[A-Za-z]+")

_TABLEISH_CHARS = set("0123456789")
_SEPARATOR_CHARS = set(" \t|+-.,;:%()[]/\\<>=_*#~·±")

_SENTENCE_PUNCT_RE = re.compile(r"[.?!]")
_WS_RE = re.compile(r"\s+")


@dataclass
class Sentence:
    index: int
    start: int
    end: int
    text: str


@dataclass
class CleanText:
    pmid: str
    segments: list[tuple[str, str]] = field(default_factory=list)
    sentences: list[Sentence] = field(default_factory=list)

    @property
    def full_text(self) -> str:
        return " ".join(text for _, text in self.segments)


def strip_latex(text: str) -> str:
    text = _MATH_RE.sub(" ", text)
    prev = None
    while prev != text:
        prev = text
        text = _CMD_BRACE_RE.sub(" ", text)
    return _BARE_CMD_RE.sub(" ", text)


def drop_table_lines(text: str) -> str:
    """Remove lines where digits and separator characters dominate.

    A line must contain at least one digit to be dropped; prose is never a
    table row, however short.
    """
    kept = []
    for line in text.splitlines():
        if not line.strip():
            continue
        if any(ch.isdigit() for ch in line):
            fillers = sum(1 for ch in line if ch in _TABLEISH_CHARS or ch in _SEPARATOR_CHARS)
            if fillers / len(line) > 0.5:
                continue
        kept.append(line)
    return "\n".join(kept)


def normalize_whitespace(text: str) -> str:
    return _WS_RE.sub(" ", text).strip()


def clean_segment(text: str) -> str:
    return normalize_whitespace(drop_table_lines(strip_latex(text)))


def _suppressed_by_stoplist(prefix: str, stoplist) -> bool:
    low = prefix.lower()
    for stop in stoplist:
        s = stop.lower()
        if not low.endswith(s):
            continue
        boundary = len(low) - len(s) - 1
        if boundary < 0 or not low[boundary].isalnum():
            return True
    return False


def split_sentences(text: str, stoplist=None) -> list[tuple[int, int]]:
    """Return (start, end) spans of sentences within ``text``.

    A boundary is a ``.``/``?``/``!`` followed by whitespace and an uppercase
    letter, unless the text up to the punctuation ends in a stop-list token.
    """
    if stoplist is None:
        stoplist = abbreviation_stoplist()
    if not text:
        return []
    spans = []
    start = 0
    for m in _SENTENCE_PUNCT_RE.finditer(text):
        end = m.end()
        j = end
        while j < len(text) and text[j].isspace():
            j += 1
        if j == end or j >= len(text):
            continue
        if not text[j].isupper():
            continue
        if _suppressed_by_stoplist(text[:end], stoplist):
            continue
        spans.append((start, end))
        start = j
    if start < len(text):
        spans.append((start, len(text)))
    return spans


def preprocess_text(record: ArticleRecord, stoplist=None) -> CleanText:
    """Clean an article's text and segment it into indexed sentences.

    Sentence spans index into :attr:`CleanText.full_text`, the cleaned
    segments joined with single spaces; indices run continuously from the
    abstract into the full text. A record with neither abstract nor full
    text yields an empty (still valid) result.
    """
    segments = []
    if record.abstract_text:
        cleaned = clean_segment(record.abstract_text)
        if cleaned:
            segments.append(("abstract", cleaned))
    if record.fulltext_body:
        cleaned = clean_segment(record.fulltext_body)
        if cleaned:
            segments.append(("fulltext", cleaned))

    sentences = []
    offset = 0
    index = 0
    for _, seg_text in segments:
        for s, e in split_sentences(seg_text, stoplist):
            sentences.append(
                Sentence(index=index, start=offset + s, end=offset + e, text=seg_text[s:e])
            )
            index += 1
        offset += len(seg_text) + 1  # the joining space
    return CleanText(pmid=record.pmid, segments=segments, sentences=sentences)
