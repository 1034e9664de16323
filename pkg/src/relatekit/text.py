"""Text-complexity features used as analysis factors.

The syllable counter is a fixed heuristic: count maximal vowel groups
(a, e, i, o, u, y), subtract one for a trailing silent 'e' unless the word
would drop to zero, and floor at one syllable per word. No two published
heuristics agree, so golden tests pin this one; the readability scores it
produces are internally consistent rather than bit-identical to any other
tool.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import DataError

_VOWEL_GROUP = re.compile(r"[aeiouy]+")
_SENTENCE_END = re.compile(r"[.!?]+")
_WORD = re.compile(r"[a-z]+")

TEMPORAL_MARKERS = ("before", "after", "then")
TEMPORAL_PHRASE = re.compile(r"\bfollowed\s+by\b")
_MARKER_RES = [re.compile(rf"\b{m}\b") for m in TEMPORAL_MARKERS]


@dataclass(frozen=True)
class TextFeatures:
    word_count: int
    has_temporal_preposition: bool
    flesch_reading_ease: float
    sentence_count: int
    syllable_count: int


def word_count(text: str) -> int:
    """Number of whitespace-delimited tokens; attached punctuation does not split."""
    tokens = text.split()
    if not tokens:
        raise DataError("cannot count words of empty or whitespace-only text")
    return len(tokens)


def has_temporal_preposition(text: str) -> bool:
    """True when the text names an order of events via before/after/then/followed by."""
    lowered = text.lower()
    if TEMPORAL_PHRASE.search(lowered):
        return True
    return any(rx.search(lowered) for rx in _MARKER_RES)


def syllables_in_word(word: str) -> int:
    """Heuristic syllable count of a single lowercase word."""
    groups = len(_VOWEL_GROUP.findall(word))
    if groups == 0:
        return 1
    if word.endswith("e") and groups > 1:
        groups -= 1
    return max(groups, 1)


def sentence_count(text: str) -> int:
    """Number of '.', '!' or '?' boundaries, counting runs once; at least 1."""
    return max(1, len(_SENTENCE_END.findall(text)))


def syllable_count(text: str) -> int:
    """Total heuristic syllables over the alphabetic words of the text."""
    return sum(syllables_in_word(w) for w in _WORD.findall(text.lower()))


def flesch_reading_ease(text: str) -> float:
    """Readability on the 206.835 - 1.015 w/s - 84.6 sy/w scale (higher = easier)."""
    words = word_count(text)
    sentences = sentence_count(text)
    syllables = syllable_count(text)
    return 206.835 - 1.015 * (words / sentences) - 84.6 * (syllables / words)


def text_features(text: str) -> TextFeatures:
    """All features for one caption; pure function of the string."""
    return TextFeatures(
        word_count=word_count(text),
        has_temporal_preposition=has_temporal_preposition(text),
        flesch_reading_ease=flesch_reading_ease(text),
        sentence_count=sentence_count(text),
        syllable_count=syllable_count(text),
    )
