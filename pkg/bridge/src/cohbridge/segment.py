"""Regex sentence segmentation and word tokenization.

The splitter is deliberately simple: it breaks after '.', '!' or '?'
(optionally followed by closing quotes or brackets) when whitespace comes
next, and keeps any unterminated tail as a final sentence. Abbreviations
are not special-cased; inputs that need linguistically accurate boundaries
should go through the stanza tagger instead.
"""

from __future__ import annotations

import re

_BOUNDARY = re.compile(r"(?<=[.!?])[\"')\]]*\s+")
_WORD = re.compile(r"[A-Za-z][A-Za-z'-]*")


def split_sentences(text: str) -> list[str]:
    collapsed = " ".join(text.split())
    if not collapsed:
        return []
    return [part.strip() for part in _BOUNDARY.split(collapsed) if part.strip()]


def tokenize(sentence: str) -> list[str]:
    """Alphabetic word tokens, keeping internal apostrophes and hyphens."""
    return _WORD.findall(sentence)
