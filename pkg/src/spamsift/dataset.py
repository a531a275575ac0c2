"""Dataset persistence, splitting, folding, and synthetic generation.

Datasets are immutable in spirit: every operation returns new values and
all randomness is seed-driven, so identical inputs reproduce identical
outputs byte for byte.
"""

from __future__ import annotations

import csv
import random
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError, DatasetParseError, ValidationError
from .features import (
    ATTRIBUTE_NAMES,
    CSV_HEADER,
    LEVEL_NAMES,
    Label,
    OrdinalLevel,
    SiteRecord,
)


@dataclass(frozen=True)
class Dataset:
    records: tuple[SiteRecord, ...]
    attribute_names: tuple[str, ...] = ATTRIBUTE_NAMES

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def labeled_only(self) -> "Dataset":
        """Records carrying a spam or non-spam label."""
        return Dataset(tuple(r for r in self.records if r.label is not Label.UNLABELED))

    def label_counts(self) -> dict[Label, int]:
        counts = {label: 0 for label in Label}
        for record in self.records:
            counts[record.label] += 1
        return counts

    def subset(self, indices) -> "Dataset":
        return Dataset(tuple(self.records[i] for i in indices))


def save_csv(dataset: Dataset, path: str | Path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for record in dataset.records:
            row = record.as_row()
            writer.writerow([row[column] for column in CSV_HEADER])


def load_csv(path: str | Path) -> Dataset:
    """Inverse of :func:`save_csv`; parse errors name the offending line."""
    records = []
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DatasetParseError("empty dataset file") from None
        if tuple(header) != CSV_HEADER:
            raise DatasetParseError(f"unexpected header {header}", line=1)
        for line, row in enumerate(reader, start=2):
            if len(row) != len(CSV_HEADER):
                raise DatasetParseError(
                    f"expected {len(CSV_HEADER)} columns, found {len(row)}", line=line)
            values = dict(zip(CSV_HEADER, row))
            if values["black_list"] not in ("yes", "no"):
                raise DatasetParseError(
                    f"black_list must be yes/no, found {values['black_list']!r}", line=line)
            try:
                records.append(SiteRecord(
                    url=values["url"],
                    black_list=values["black_list"],
                    feature_of_url=OrdinalLevel.parse(values["feature_of_url"]),
                    meta_tag=OrdinalLevel.parse(values["meta_tag"]),
                    key_word_special=OrdinalLevel.parse(values["key_word_special"]),
                    key_word_public=OrdinalLevel.parse(values["key_word_public"]),
                    count_of_internal_link=OrdinalLevel.parse(values["count_of_internal_link"]),
                    count_external_link=OrdinalLevel.parse(values["count_external_link"]),
                    count_of_post=OrdinalLevel.parse(values["count_of_post"]),
                    label=Label.parse(values["label"]),
                ))
            except DatasetParseError as exc:
                raise DatasetParseError(str(exc), line=line) from None
    return Dataset(tuple(records))


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float
    seed: int

    def __post_init__(self):
        if not 0 < self.train_fraction < 1:
            raise ConfigError("train_fraction must be in (0, 1)")


def split_train_test(dataset: Dataset, spec: SplitSpec,
                     stratify: bool = False) -> tuple[Dataset, Dataset]:
    """Seed-driven shuffle split. Train size is round(fraction * N); with
    ``stratify`` the rounding applies per label class instead."""
    if len(dataset) == 0:
        raise ValidationError("cannot split an empty dataset")
    rng = random.Random(spec.seed)
    train_idx: list[int] = []
    if stratify:
        by_label: dict[Label, list[int]] = {}
        for i, record in enumerate(dataset.records):
            by_label.setdefault(record.label, []).append(i)
        for label in sorted(by_label, key=lambda l: l.value):
            group = by_label[label]
            rng.shuffle(group)
            train_idx.extend(group[:round(spec.train_fraction * len(group))])
    else:
        indices = list(range(len(dataset)))
        rng.shuffle(indices)
        train_idx = indices[:round(spec.train_fraction * len(dataset))]
    chosen = set(train_idx)
    test_idx = [i for i in range(len(dataset)) if i not in chosen]
    return dataset.subset(sorted(train_idx)), dataset.subset(test_idx)


@dataclass(frozen=True)
class FoldPlan:
    k: int
    assignment: tuple[int, ...]  # record index -> fold index

    def __post_init__(self):
        sizes = self.fold_sizes()
        if max(sizes) - min(sizes) > 1:
            raise ValidationError("fold sizes may differ by at most one")

    def fold_sizes(self) -> list[int]:
        sizes = [0] * self.k
        for fold in self.assignment:
            sizes[fold] += 1
        return sizes

    def test_indices(self, fold: int) -> list[int]:
        return [i for i, f in enumerate(self.assignment) if f == fold]

    def train_indices(self, fold: int) -> list[int]:
        return [i for i, f in enumerate(self.assignment) if f != fold]


def k_fold(dataset: Dataset, k: int, seed: int) -> FoldPlan:
    """Partition record indices into k seed-shuffled folds of near-equal size."""
    n = len(dataset)
    if k < 2:
        raise ConfigError("k must be at least 2")
    if k > n:
        raise ConfigError(f"k={k} exceeds dataset size {n}")
    indices = list(range(n))
    random.Random(seed).shuffle(indices)
    assignment = [0] * n
    base, extra = divmod(n, k)
    cursor = 0
    for fold in range(k):
        size = base + (1 if fold < extra else 0)
        for i in indices[cursor:cursor + size]:
            assignment[i] = fold
        cursor += size
    return FoldPlan(k=k, assignment=tuple(assignment))


_BLACKLIST_LEVELS = ("no", "yes")


def _attribute_levels(name: str) -> tuple[str, ...]:
    return _BLACKLIST_LEVELS if name == "black_list" else LEVEL_NAMES


@dataclass(frozen=True)
class GeneratorRule:
    conditions: dict[str, str]
    p_spam: float
    weight: float


@dataclass(frozen=True)
class GeneratorSpec:
    """Plan for a synthetic dataset with planted attribute/label rules.

    Each rule pins its condition attributes and receives round(weight * n)
    records at spam rate p_spam (exact counts, not sampled). Unpinned
    attributes are drawn independently from the background distributions
    (uniform per attribute unless overridden). Leftover records form a
    background bucket whose spam count makes the n_spam total exact.
    """

    n: int
    n_spam: int
    rules: tuple[GeneratorRule, ...] = ()
    background: dict[str, dict[str, float]] = field(default_factory=dict)
    seed: int = 0

    @classmethod
    def from_dict(cls, raw: dict) -> "GeneratorSpec":
        try:
            rules = tuple(
                GeneratorRule(
                    conditions=dict(rule["conditions"]),
                    p_spam=float(rule["p_spam"]),
                    weight=float(rule["weight"]),
                )
                for rule in raw.get("rules", ())
            )
            return cls(
                n=int(raw["n"]),
                n_spam=int(raw["n_spam"]),
                rules=rules,
                background={k: dict(v) for k, v in raw.get("background", {}).items()},
                seed=int(raw.get("seed", 0)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad generator spec: {exc}") from None


def _validate_spec(spec: GeneratorSpec) -> None:
    if spec.n <= 0:
        raise ConfigError("n must be positive")
    if not 0 <= spec.n_spam <= spec.n:
        raise ConfigError("n_spam must lie in [0, n]")
    for rule in spec.rules:
        if not 0.0 <= rule.p_spam <= 1.0:
            raise ConfigError(f"p_spam {rule.p_spam} outside [0, 1]")
        if rule.weight <= 0:
            raise ConfigError("rule weight must be positive")
        if not rule.conditions:
            raise ConfigError("rule conditions must not be empty")
        for attr, level in rule.conditions.items():
            if attr not in ATTRIBUTE_NAMES:
                raise ConfigError(f"unknown attribute {attr!r} in rule conditions")
            if level not in _attribute_levels(attr):
                raise ConfigError(f"unknown level {level!r} for {attr}")
    for attr, dist in spec.background.items():
        if attr not in ATTRIBUTE_NAMES:
            raise ConfigError(f"unknown attribute {attr!r} in background")
        legal = _attribute_levels(attr)
        if not dist or any(level not in legal for level in dist):
            raise ConfigError(f"bad background levels for {attr}")
        if any(w < 0 for w in dist.values()) or sum(dist.values()) <= 0:
            raise ConfigError(f"bad background weights for {attr}")


def generate_synthetic(spec: GeneratorSpec, seed: int | None = None) -> Dataset:
    """Deterministically materialize the spec into a labeled dataset."""
    _validate_spec(spec)
    rng = random.Random(spec.seed if seed is None else seed)

    bucket_sizes = [round(rule.weight * spec.n) for rule in spec.rules]
    if sum(bucket_sizes) > spec.n:
        raise ConfigError("rule weights allocate more records than n")
    background_size = spec.n - sum(bucket_sizes)

    spam_per_bucket = [round(rule.p_spam * size)
                       for rule, size in zip(spec.rules, bucket_sizes)]
    background_spam = spec.n_spam - sum(spam_per_bucket)
    if not 0 <= background_spam <= background_size:
        raise ConfigError(
            f"infeasible spec: background would need {background_spam} spam "
            f"records out of {background_size}")

    draw_tables = {}
    for attr in ATTRIBUTE_NAMES:
        dist = spec.background.get(attr)
        if dist:
            levels, weights = zip(*sorted(dist.items()))
        else:
            levels, weights = _attribute_levels(attr), None
        draw_tables[attr] = (levels, weights)

    def make_records(size: int, spam_count: int, conditions: dict[str, str]):
        spam_slots = set(rng.sample(range(size), spam_count))
        bucket = []
        for i in range(size):
            values = {}
            for attr in ATTRIBUTE_NAMES:
                if attr in conditions:
                    values[attr] = conditions[attr]
                else:
                    levels, weights = draw_tables[attr]
                    values[attr] = rng.choices(levels, weights=weights)[0]
            bucket.append((values, Label.SPAM if i in spam_slots else Label.NON_SPAM))
        return bucket

    staged = []
    for rule, size, spam_count in zip(spec.rules, bucket_sizes, spam_per_bucket):
        staged.extend(make_records(size, spam_count, rule.conditions))
    staged.extend(make_records(background_size, background_spam, {}))
    rng.shuffle(staged)

    records = []
    for i, (values, label) in enumerate(staged):
        records.append(SiteRecord(
            url=f"synth://site-{i:06d}",
            black_list=values["black_list"],
            feature_of_url=OrdinalLevel(values["feature_of_url"]),
            meta_tag=OrdinalLevel(values["meta_tag"]),
            key_word_special=OrdinalLevel(values["key_word_special"]),
            key_word_public=OrdinalLevel(values["key_word_public"]),
            count_of_internal_link=OrdinalLevel(values["count_of_internal_link"]),
            count_external_link=OrdinalLevel(values["count_external_link"]),
            count_of_post=OrdinalLevel(values["count_of_post"]),
            label=label,
        ))
    return Dataset(tuple(records))
