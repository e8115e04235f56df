"""Deterministic text preprocessing shared by the classifier, the keyword
extractor, and the similarity computation.

Everything in here is pure and rule-based: no ML models, no external NLP
dependencies, identical results across runs and platforms.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources

# Bump when tokenizer/stemmer rules change; persisted in model files so a
# trained model can be tied to the preprocessing that produced its features.
STEMMER_VERSION = 1

DEFAULT_MAX_N = 3

# Sentence boundaries: ".", "!", "?", ";" and newlines. A "." flanked by
# digits is part of a version token ("python 2.7") and never splits.
_BOUNDARY = re.compile(r"[!?;\n]|(?<!\d)\.|\.(?!\d)")

# Tokens keep letters, digits, "+" and "#" (so "c++" and "c#" survive) plus
# "." between digits ("3.10"). Everything else is an unimportant character.
_TOKEN = re.compile(r"[a-z0-9+#]+(?:\.[0-9]+)*")

_HAS_ALNUM = re.compile(r"[a-z0-9]")

# Suffix rules tried in order; a suffix is stripped only if at least
# _MIN_STEM characters remain.
_SUFFIXES = ("ing", "ed", "es", "s")
_MIN_STEM = 3


@dataclass
class Sentence:
    """One preprocessed sentence: normalized tokens plus provenance."""

    source_id: str
    section_label: str
    raw: str
    tokens: list[str] = field(default_factory=list)


@dataclass(frozen=True)
class NGram:
    """A contiguous run of 1..n tokens."""

    terms: tuple[str, ...]

    @property
    def n(self) -> int:
        return len(self.terms)

    @property
    def text(self) -> str:
        return " ".join(self.terms)


def load_stopwords(path: str) -> set[str]:
    """Read a stop-word file: one token per line, UTF-8, blank lines ignored."""
    with open(path, encoding="utf-8") as fh:
        return {line.strip().lower() for line in fh if line.strip()}


def default_stopwords() -> set[str]:
    """The packaged ~150-word English list."""
    text = resources.files("skillrec.data").joinpath("stopwords.txt").read_text("utf-8")
    return {line.strip().lower() for line in text.splitlines() if line.strip()}


def split_sentences(raw_text: str) -> list[str]:
    """Split on terminal punctuation and newlines; drops empty segments."""
    return [seg.strip() for seg in _BOUNDARY.split(raw_text) if seg.strip()]


def tokenize(text: str) -> list[str]:
    """Lowercase and extract tokens; punctuation-only matches are dropped."""
    return [t for t in _TOKEN.findall(text.lower()) if _HAS_ALNUM.search(t)]


def stem(token: str) -> str:
    """Rule-based suffix stemmer, iterated to a fixed point.

    Iterating makes stemming idempotent (stem(stem(t)) == stem(t)), which the
    preprocessing pipeline relies on: re-tokenizing already-processed text
    must be a no-op.
    """
    while True:
        for suffix in _SUFFIXES:
            if token.endswith(suffix) and len(token) - len(suffix) >= _MIN_STEM:
                token = token[: -len(suffix)]
                break
        else:
            return token


def preprocess(
    raw_text: str,
    stopwords: set[str],
    source_id: str = "",
    section_label: str = "",
) -> list[Sentence]:
    """Split text into sentences of normalized tokens.

    Per sentence: lowercase, tokenize, drop stop words, stem, and drop stop
    words again (a stem can itself be a stop word; filtering both forms keeps
    the token stream idempotent). Sentences left with no tokens are dropped.
    """
    sentences = []
    for raw in split_sentences(raw_text):
        tokens = [stem(t) for t in tokenize(raw) if t not in stopwords]
        tokens = [t for t in tokens if t not in stopwords]
        if tokens:
            sentences.append(
                Sentence(source_id=source_id, section_label=section_label, raw=raw, tokens=tokens)
            )
    return sentences


def ngrams(sentence: Sentence, max_n: int = DEFAULT_MAX_N) -> list[NGram]:
    """All contiguous n-grams for n = 1..max_n, unigrams first, left to right."""
    if max_n < 1:
        raise ValueError(f"max_n must be >= 1, got {max_n}")
    tokens = sentence.tokens
    out = []
    for n in range(1, max_n + 1):
        for i in range(len(tokens) - n + 1):
            out.append(NGram(terms=tuple(tokens[i : i + n])))
    return out
