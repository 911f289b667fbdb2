"""Shared text utilities: one tokenizer for every module, plus the sentence
splitter and syllable counter used by the readability score.

Tokenizer contract: split on whitespace, strip leading/trailing punctuation,
keep internal apostrophes and hyphens. Case is preserved; callers that need
case-insensitive terms (BM25, TF-IDF) fold the result themselves.
"""

import re

_EDGE_PUNCT = re.compile(r"^[^\w]+|[^\w]+$", re.UNICODE)
_SENTENCE_END = re.compile(r"[.!?](?:\s+|$)")
_VOWEL_GROUP = re.compile(r"[aeiouy]+")
_NUMBER = re.compile(r"\d+(?:[.,]\d+)*")


def tokenize(text: str) -> list[str]:
    """Whitespace-split tokens with edge punctuation stripped."""
    out = []
    for raw in text.split():
        tok = _EDGE_PUNCT.sub("", raw)
        if tok:
            out.append(tok)
    return out


def fold_tokens(text: str) -> list[str]:
    """Case-folded tokens, for index/vocabulary terms."""
    return [t.casefold() for t in tokenize(text)]


def word_count(text: str) -> int:
    return len(tokenize(text))


def sentences(text: str) -> list[str]:
    """Split on '.', '!' or '?' followed by whitespace or end of text."""
    parts = [p.strip() for p in _SENTENCE_END.split(text)]
    return [p for p in parts if p]


def count_syllables(word: str) -> int:
    """Maximal vowel groups (aeiouy), minus a trailing silent 'e' unless it
    is the only group; never less than 1."""
    groups = _VOWEL_GROUP.findall(word.casefold())
    n = len(groups)
    if n > 1 and word.casefold().endswith("e") and groups[-1] == "e":
        n -= 1
    return max(n, 1)


def number_spans(text: str) -> list[tuple[int, int]]:
    """Character spans of digit runs (with internal separators), for masking."""
    return [m.span() for m in _NUMBER.finditer(text)]


def normalize_phrase(text: str) -> str:
    """Case-fold and collapse whitespace; identity on already-normal input."""
    return " ".join(text.casefold().split())


def phrase_token_set(text: str) -> frozenset[str]:
    """Case-folded token set with punctuation stripped, for Jaccard overlap."""
    return frozenset(fold_tokens(text))
