"""Per-page feature extraction: from raw HTML plus URL to one categorical record.

Eight attributes are produced per site: a blacklist flag, keyword scores
for the URL, meta tags and page body (special and public tiers), link
counts split into internal/external, and a post-element count. Numeric
scores are discretized onto a five-level ordinal scale.
"""

from __future__ import annotations

import csv
import enum
import functools
from dataclasses import dataclass
from pathlib import Path
from urllib.parse import urljoin, urlsplit

from . import htmlscan
from .errors import ConfigError, DatasetParseError, InvalidUrlError
from .patterns import (
    KeywordSet,
    TagPattern,
    contains_any,
    extract_tag_content,
    fold_case,
    score_keywords,
)


@functools.total_ordering
class OrdinalLevel(enum.Enum):
    """Five-point ordered scale used by every discretized attribute."""

    VERY_MIN = "very-min"
    MIN = "min"
    MID = "mid"
    MAX = "max"
    VERY_MAX = "very-max"

    @property
    def rank(self) -> int:
        return _LEVEL_RANKS[self]

    def __lt__(self, other):
        if not isinstance(other, OrdinalLevel):
            return NotImplemented
        return self.rank < other.rank

    @classmethod
    def parse(cls, text: str) -> "OrdinalLevel":
        try:
            return cls(text)
        except ValueError:
            raise DatasetParseError(f"unknown level {text!r}") from None


_LEVEL_RANKS = {level: i for i, level in enumerate(OrdinalLevel)}

LEVEL_NAMES = tuple(level.value for level in OrdinalLevel)


class Label(enum.Enum):
    SPAM = "spam"
    NON_SPAM = "non-spam"
    UNLABELED = "unlabeled"

    @classmethod
    def parse(cls, text: str) -> "Label":
        try:
            return cls(text)
        except ValueError:
            raise DatasetParseError(f"unknown label {text!r}") from None


ATTRIBUTE_NAMES = (
    "black_list",
    "feature_of_url",
    "meta_tag",
    "key_word_special",
    "key_word_public",
    "count_of_internal_link",
    "count_external_link",
    "count_of_post",
)

ORDINAL_ATTRIBUTES = ATTRIBUTE_NAMES[1:]

CSV_HEADER = ("url",) + ATTRIBUTE_NAMES + ("label",)


@dataclass(frozen=True)
class SiteRecord:
    """One website's categorical attribute values plus its label."""

    url: str
    black_list: str  # "yes" | "no"
    feature_of_url: OrdinalLevel
    meta_tag: OrdinalLevel
    key_word_special: OrdinalLevel
    key_word_public: OrdinalLevel
    count_of_internal_link: OrdinalLevel
    count_external_link: OrdinalLevel
    count_of_post: OrdinalLevel
    label: Label = Label.UNLABELED

    def level(self, attribute: str) -> str:
        value = getattr(self, attribute)
        return value.value if isinstance(value, OrdinalLevel) else value

    def as_row(self) -> dict[str, str]:
        row = {name: self.level(name) for name in ATTRIBUTE_NAMES}
        row["url"] = self.url
        row["label"] = self.label.value
        return row


@dataclass(frozen=True)
class PageDocument:
    """A fetched page: absolute URL, raw markup, and its corpus file."""

    url: str
    html: str
    fetched_from: str = ""


@dataclass(frozen=True)
class Blacklist:
    hosts: frozenset[str]

    def __contains__(self, host: str) -> bool:
        return host in self.hosts


def load_blacklist(path: str | Path) -> Blacklist:
    """One domain per line; '#' comments and blank lines are ignored."""
    hosts = set()
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        entry = raw.strip().lower()
        if not entry or entry.startswith("#"):
            continue
        if "/" in entry or ":" in entry or " " in entry:
            raise ConfigError(f"blacklist entry {entry!r} must be a bare domain")
        hosts.add(entry)
    return Blacklist(hosts=frozenset(hosts))


def _split_url(url: str):
    parts = urlsplit(url)
    if not parts.scheme or not parts.hostname:
        raise InvalidUrlError(f"URL {url!r} lacks a scheme or host")
    return parts


def registrable_domain(host: str) -> str:
    """Approximate registrable domain: the last two labels of the host.

    Good enough for same-site link classification; multi-part public
    suffixes (co.uk etc.) are not special-cased.
    """
    labels = host.lower().strip(".").split(".")
    return ".".join(labels[-2:]) if len(labels) >= 2 else labels[0]


def check_blacklist(url: str, blacklist: Blacklist) -> bool:
    """True when the URL's host, or any parent domain of it, is blacklisted."""
    host = _split_url(url).hostname.lower()
    labels = host.split(".")
    return any(".".join(labels[i:]) in blacklist.hosts for i in range(len(labels)))


def score_url(url: str, keywords: KeywordSet) -> int:
    """Keyword score of the folded host+path portion of the URL."""
    parts = _split_url(url)
    return score_keywords(fold_case(parts.hostname + parts.path), keywords)


DEFAULT_META_TAGS = ("keywords", "description")


def score_meta(html: str, keywords: KeywordSet,
               meta_tags: tuple[str, ...] = DEFAULT_META_TAGS) -> int:
    """Keyword score over the configured meta tags' content, concatenated."""
    chunks = []
    for name in meta_tags:
        chunks.extend(extract_meta_content(html, name))
    return score_keywords(fold_case(" ".join(chunks)), keywords) if chunks else 0


def extract_meta_content(html: str, name: str) -> list[str]:
    pattern = TagPattern(tag_name="meta", attribute_filter=("name", name))
    return extract_tag_content(html, pattern)


def extract_body_text(html: str) -> str:
    """Visible text of the body (whole document when no body tag), with
    script/style content dropped, whitespace collapsed, and case folded."""
    body, whole, saw_body = htmlscan.document_text(html)
    text = body if saw_body else whole
    return fold_case(" ".join(text.split()))


def count_links(html: str, base_url: str) -> tuple[int, int]:
    """(internal, external) anchor counts.

    Internal: href resolves to the base URL's registrable domain (relative
    links included). External: any other http(s) target. Other schemes
    (mailto, javascript, ...) count in neither bucket.
    """
    base_domain = registrable_domain(_split_url(base_url).hostname)
    internal = external = 0
    for href in htmlscan.anchor_hrefs(html):
        resolved = urlsplit(urljoin(base_url, href.strip()))
        if resolved.scheme not in ("http", "https") or not resolved.hostname:
            continue
        if registrable_domain(resolved.hostname) == base_domain:
            internal += 1
        else:
            external += 1
    return internal, external


DEFAULT_POST_MARKERS = ("article", "class*=post", "id*=post")


def parse_post_marker(spec: str) -> TagPattern:
    """Marker syntax: a bare tag name, or ``attr*=substring``."""
    if "*=" in spec:
        attr, _, needle = spec.partition("*=")
        if not attr or not needle:
            raise ConfigError(f"bad post marker {spec!r}")
        return TagPattern(tag_name="*", attribute_filter=(attr, needle), substring=True)
    return TagPattern(tag_name=spec)


def count_posts(html: str, markers: tuple[TagPattern, ...]) -> int:
    """Number of elements matching any post marker (each element counted once)."""
    count = 0
    for element in htmlscan.scan_elements(html):
        if any(marker.matches(element.tag, element.attrs) for marker in markers):
            count += 1
    return count


DEFAULT_THRESHOLDS: dict[str, tuple[int, int, int, int]] = {
    "feature_of_url": (1, 10, 20, 40),
    "meta_tag": (1, 10, 20, 40),
    "key_word_special": (1, 10, 20, 40),
    "key_word_public": (1, 10, 20, 40),
    "count_of_internal_link": (5, 15, 40, 100),
    "count_external_link": (5, 15, 40, 100),
    "count_of_post": (1, 5, 15, 40),
}


def discretize(value: int, thresholds: tuple[int, int, int, int]) -> OrdinalLevel:
    """Bucket a non-negative score/count onto the five-level scale."""
    t1, t2, t3, t4 = thresholds
    if not (t1 < t2 < t3 < t4):
        raise ConfigError(f"thresholds {thresholds} must be strictly ascending")
    if value < t1:
        return OrdinalLevel.VERY_MIN
    if value < t2:
        return OrdinalLevel.MIN
    if value < t3:
        return OrdinalLevel.MID
    if value < t4:
        return OrdinalLevel.MAX
    return OrdinalLevel.VERY_MAX


@dataclass(frozen=True)
class ExtractionConfig:
    """Knobs for the page-to-record mapping; defaults follow the package docs."""

    thresholds: dict[str, tuple[int, int, int, int]] | None = None
    post_markers: tuple[str, ...] = DEFAULT_POST_MARKERS
    meta_tags: tuple[str, ...] = DEFAULT_META_TAGS

    def __post_init__(self):
        merged = dict(DEFAULT_THRESHOLDS)
        if self.thresholds:
            for name, quad in self.thresholds.items():
                if name not in DEFAULT_THRESHOLDS:
                    raise ConfigError(f"no thresholds apply to attribute {name!r}")
                quad = tuple(int(v) for v in quad)
                if len(quad) != 4:
                    raise ConfigError(f"thresholds for {name} must have 4 entries")
                merged[name] = quad
        object.__setattr__(self, "thresholds", merged)
        for marker in self.post_markers:
            parse_post_marker(marker)  # validate early

    def marker_patterns(self) -> tuple[TagPattern, ...]:
        return tuple(parse_post_marker(m) for m in self.post_markers)


@dataclass(frozen=True)
class RawFeatures:
    """Undigested per-page measurements, one field per dataset attribute."""

    blacklisted: bool
    url_score: int
    meta_score: int
    key_special_score: int
    key_public_score: int
    internal_links: int
    external_links: int
    post_count: int


def extract_raw(page: PageDocument, blacklist: Blacklist, keywords: KeywordSet,
                config: ExtractionConfig) -> RawFeatures:
    body = extract_body_text(page.html)
    _, n_special = contains_any(body, list(keywords.special))
    _, n_public = contains_any(body, list(keywords.public))
    internal, external = count_links(page.html, page.url)
    return RawFeatures(
        blacklisted=check_blacklist(page.url, blacklist),
        url_score=score_url(page.url, keywords),
        meta_score=score_meta(page.html, keywords, config.meta_tags),
        key_special_score=keywords.special_score * n_special,
        key_public_score=keywords.public_score * n_public,
        internal_links=internal,
        external_links=external,
        post_count=count_posts(page.html, config.marker_patterns()),
    )


def extract_record(page: PageDocument, blacklist: Blacklist, keywords: KeywordSet,
                   config: ExtractionConfig) -> SiteRecord:
    """Full page-to-record mapping; the label is left unset."""
    raw = extract_raw(page, blacklist, keywords, config)
    t = config.thresholds
    return SiteRecord(
        url=page.url,
        black_list="yes" if raw.blacklisted else "no",
        feature_of_url=discretize(raw.url_score, t["feature_of_url"]),
        meta_tag=discretize(raw.meta_score, t["meta_tag"]),
        key_word_special=discretize(raw.key_special_score, t["key_word_special"]),
        key_word_public=discretize(raw.key_public_score, t["key_word_public"]),
        count_of_internal_link=discretize(raw.internal_links, t["count_of_internal_link"]),
        count_external_link=discretize(raw.external_links, t["count_external_link"]),
        count_of_post=discretize(raw.post_count, t["count_of_post"]),
    )


MANIFEST_LABELS = {
    "spam": Label.SPAM,
    "nonspam": Label.NON_SPAM,
    "non-spam": Label.NON_SPAM,
    "unknown": Label.UNLABELED,
    "unlabeled": Label.UNLABELED,
}


@dataclass(frozen=True)
class ManifestEntry:
    file: str
    url: str
    label: Label


def read_manifest(corpus_dir: str | Path) -> list[ManifestEntry]:
    """Parse ``manifest.csv`` (columns file,url,label) in a corpus directory."""
    path = Path(corpus_dir) / "manifest.csv"
    if not path.is_file():
        raise DatasetParseError(f"no manifest.csv in {corpus_dir}")
    entries = []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"file", "url", "label"} <= set(reader.fieldnames):
            raise DatasetParseError("manifest.csv must have columns file,url,label")
        for i, row in enumerate(reader, start=2):
            label = MANIFEST_LABELS.get(row["label"].strip().lower())
            if label is None:
                raise DatasetParseError(f"unknown label {row['label']!r}", line=i)
            entries.append(ManifestEntry(file=row["file"].strip(), url=row["url"].strip(), label=label))
    return entries
