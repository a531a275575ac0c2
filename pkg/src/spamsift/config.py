"""Application configuration: one JSON file wiring paths and parameters.

Example:

    {
      "paths": {
        "blacklist": "blacklist.txt",
        "special_keywords": "special.txt",
        "public_keywords": "public.txt"
      },
      "scores": {"special": 10, "public": 5},
      "thresholds": {"key_word_special": [1, 10, 20, 40]},
      "post_markers": ["article", "class*=post", "id*=post"],
      "meta_tags": ["keywords", "description"],
      "chaid": {"alpha_merge": 0.05, "alpha_split": 0.05},
      "seed": 1
    }

Relative paths are resolved against the config file's directory. The
environment variable SPAMSIFT_CONFIG supplies a default config path when
the CLI flag is omitted.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path

from .chaid import ChaidConfig
from .errors import ConfigError
from .features import (
    DEFAULT_META_TAGS,
    DEFAULT_POST_MARKERS,
    Blacklist,
    ExtractionConfig,
    load_blacklist,
)
from .patterns import KeywordSet, load_keyword_file

ENV_CONFIG = "SPAMSIFT_CONFIG"


@dataclass(frozen=True)
class AppConfig:
    blacklist: Blacklist
    keywords: KeywordSet
    extraction: ExtractionConfig
    chaid: ChaidConfig
    seed: int


def resolve_config_path(explicit: str | None) -> Path:
    path = explicit or os.environ.get(ENV_CONFIG)
    if not path:
        raise ConfigError(
            f"no config file given (pass --config or set {ENV_CONFIG})")
    return Path(path)


def load_app_config(path: str | Path) -> AppConfig:
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from None

    base = path.parent

    def resolve(name: str) -> Path:
        paths = raw.get("paths", {})
        if name not in paths:
            raise ConfigError(f"config is missing paths.{name}")
        resolved = base / paths[name]
        if not resolved.is_file():
            raise ConfigError(f"paths.{name} -> {resolved} does not exist")
        return resolved

    scores = raw.get("scores", {})
    try:
        keywords = KeywordSet.from_words(
            special=load_keyword_file(resolve("special_keywords")),
            public=load_keyword_file(resolve("public_keywords")),
            special_score=int(scores.get("special", 10)),
            public_score=int(scores.get("public", 5)),
        )
        extraction = ExtractionConfig(
            thresholds={k: tuple(v) for k, v in raw.get("thresholds", {}).items()},
            post_markers=tuple(raw.get("post_markers", DEFAULT_POST_MARKERS)),
            meta_tags=tuple(raw.get("meta_tags", DEFAULT_META_TAGS)),
        )
        chaid = ChaidConfig(**raw.get("chaid", {}))
    except TypeError as exc:
        raise ConfigError(f"bad config value: {exc}") from None
    return AppConfig(
        blacklist=load_blacklist(resolve("blacklist")),
        keywords=keywords,
        extraction=extraction,
        chaid=chaid,
        seed=int(raw.get("seed", 0)),
    )
