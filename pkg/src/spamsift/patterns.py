"""Keyword pattern matching built on Knuth-Morris-Pratt search.

Matching is ASCII-case-insensitive: patterns are folded once at
construction, text is folded per call. Tag extraction is a tolerant
linear scan, not a DOM parser.
"""

from __future__ import annotations

import string
from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigError, InvalidPatternError
from .htmlscan import scan_elements

_ASCII_FOLD = str.maketrans(string.ascii_uppercase, string.ascii_lowercase)


def fold_case(text: str) -> str:
    """Lower-case ASCII letters only; other characters pass through."""
    return text.translate(_ASCII_FOLD)


def build_failure_table(pattern: str) -> list[int]:
    """Prefix function: failure[i] is the length of the longest proper
    prefix of pattern[:i+1] that is also its suffix.
    """
    if not pattern:
        raise InvalidPatternError("pattern must be non-empty")
    failure = [0] * len(pattern)
    k = 0
    for i in range(1, len(pattern)):
        while k > 0 and pattern[i] != pattern[k]:
            k = failure[k - 1]
        if pattern[i] == pattern[k]:
            k += 1
        failure[i] = k
    return failure


@dataclass(frozen=True)
class KmpPattern:
    """A case-folded search pattern with its precomputed failure table."""

    text: str
    failure: tuple[int, ...]

    @classmethod
    def compile(cls, raw: str) -> "KmpPattern":
        folded = fold_case(raw)
        return cls(text=folded, failure=tuple(build_failure_table(folded)))

    def __len__(self) -> int:
        return len(self.text)


def kmp_search_with_comparisons(text: str, pattern: KmpPattern) -> tuple[list[int], int]:
    """Like :func:`kmp_search` but also returns the number of character
    comparisons performed (at most 2 * len(text))."""
    pat = pattern.text
    m = len(pat)
    if m == 0:
        raise InvalidPatternError("pattern must be non-empty")
    folded = fold_case(text)
    matches: list[int] = []
    failure = pattern.failure
    comparisons = 0
    j = 0
    i = 0
    n = len(folded)
    while i < n:
        comparisons += 1
        if folded[i] == pat[j]:
            i += 1
            j += 1
            if j == m:
                matches.append(i - m)
                j = failure[m - 1]
        elif j > 0:
            j = failure[j - 1]
        else:
            i += 1
    return matches, comparisons


def kmp_search(text: str, pattern: KmpPattern) -> list[int]:
    """All start offsets of pattern in text, case-insensitively, in
    increasing order. Overlapping occurrences are all reported."""
    matches, _ = kmp_search_with_comparisons(text, pattern)
    return matches


def contains_any(text: str, patterns: list[KmpPattern]) -> tuple[bool, int]:
    """Whether any pattern occurs in text, and how many distinct patterns do."""
    if not patterns:
        raise InvalidPatternError("pattern list must be non-empty")
    folded = fold_case(text)
    count = 0
    for pattern in patterns:
        occurrences, _ = kmp_search_with_comparisons(folded, pattern)
        if occurrences:
            count += 1
    return count > 0, count


@dataclass(frozen=True)
class KeywordSet:
    """Two keyword tiers with per-tier point values.

    Each distinct matched keyword contributes its tier score once,
    regardless of how often it occurs.
    """

    special: tuple[KmpPattern, ...]
    public: tuple[KmpPattern, ...]
    special_score: int = 10
    public_score: int = 5

    def __post_init__(self):
        if self.special_score <= 0 or self.public_score <= 0:
            raise ConfigError("keyword scores must be positive")
        if not self.special or not self.public:
            raise ConfigError("keyword lists must be non-empty")
        for patterns in (self.special, self.public):
            texts = [p.text for p in patterns]
            if len(set(texts)) != len(texts):
                raise ConfigError("duplicate keyword after case folding")

    @classmethod
    def from_words(cls, special: list[str], public: list[str],
                   special_score: int = 10, public_score: int = 5) -> "KeywordSet":
        return cls(
            special=tuple(KmpPattern.compile(w) for w in special),
            public=tuple(KmpPattern.compile(w) for w in public),
            special_score=special_score,
            public_score=public_score,
        )


def score_keywords(text: str, keywords: KeywordSet) -> int:
    """Total points for the distinct special and public keywords found in text."""
    _, n_special = contains_any(text, list(keywords.special))
    _, n_public = contains_any(text, list(keywords.public))
    return keywords.special_score * n_special + keywords.public_score * n_public


def load_keyword_file(path: str | Path) -> list[str]:
    """Read one keyword per line; blank lines and '#' comments are ignored."""
    words = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.append(line)
    if not words:
        raise ConfigError(f"keyword file {path} contains no keywords")
    return words


@dataclass(frozen=True)
class TagPattern:
    """Selects HTML elements by tag name, optionally filtered on one attribute.

    With ``substring=True`` the attribute value only needs to contain the
    filter value; otherwise it must match exactly. Comparisons are
    case-insensitive. ``tag_name`` may be ``"*"`` to match any element when
    an attribute filter is present.
    """

    tag_name: str
    attribute_filter: tuple[str, str] | None = None
    substring: bool = False

    def __post_init__(self):
        name = self.tag_name
        ok = name == "*" and self.attribute_filter is not None
        ok = ok or (name != "" and all(c in string.ascii_letters for c in name))
        if not ok:
            raise ConfigError(f"invalid tag name {name!r}")

    def matches(self, tag: str, attrs: dict[str, str]) -> bool:
        if self.tag_name != "*" and tag != fold_case(self.tag_name):
            return False
        if self.attribute_filter is None:
            return True
        name, wanted = self.attribute_filter
        actual = attrs.get(fold_case(name))
        if actual is None:
            return False
        actual = fold_case(actual)
        wanted = fold_case(wanted)
        return wanted in actual if self.substring else actual == wanted


def extract_tag_content(html: str, pattern: TagPattern) -> list[str]:
    """Payloads of every element matching the pattern, in document order.

    The payload is the element's ``content`` attribute if present, else its
    ``value`` attribute, else the raw text up to the matching close tag.
    Malformed or unclosed markup degrades to best effort, never an error.
    """
    payloads = []
    for element in scan_elements(html):
        if pattern.matches(element.tag, element.attrs):
            if "content" in element.attrs:
                payloads.append(element.attrs["content"])
            elif "value" in element.attrs:
                payloads.append(element.attrs["value"])
            else:
                payloads.append(element.inner_text)
    return payloads
