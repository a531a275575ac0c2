"""CHAID tree growth over categorical records, and rule extraction.

The cycle at each node is: merge predictor categories pairwise while the
least-different pair is statistically indistinguishable, Bonferroni-adjust
the grouped table's p-value, split on the predictor with the smallest
adjusted p, and recurse until a stop rule fires. Merging for ordinal
predictors is restricted to adjacent levels.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np
from scipy.special import gammaincc

from .errors import ConfigError, ModelFormatError, SchemaError, ValidationError
from .features import ATTRIBUTE_NAMES, LEVEL_NAMES, SiteRecord

MODEL_VERSION = "1"


@dataclass(frozen=True)
class AttributeSpec:
    """A predictor's name, its level universe in canonical order, and
    whether that order is meaningful (ordinal) or not (nominal)."""

    name: str
    levels: tuple[str, ...]
    ordinal: bool = True


@dataclass(frozen=True)
class Schema:
    attributes: tuple[AttributeSpec, ...]
    target: str = "label"
    classes: tuple[str, ...] = ("spam", "non-spam")

    def attribute(self, name: str) -> AttributeSpec:
        for attribute in self.attributes:
            if attribute.name == name:
                return attribute
        raise SchemaError(f"unknown attribute {name!r}")

    @property
    def predictor_names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.attributes)


SITE_SCHEMA = Schema(attributes=tuple(
    AttributeSpec(name, ("no", "yes"), ordinal=False) if name == "black_list"
    else AttributeSpec(name, LEVEL_NAMES)
    for name in ATTRIBUTE_NAMES
))


@dataclass(frozen=True)
class ChaidConfig:
    alpha_merge: float = 0.05
    alpha_split: float = 0.05
    statistic: str = "pearson"  # "pearson" | "likelihood-ratio"
    max_depth: int = 3  # tree levels including the root
    min_parent_size: int = 30
    min_child_size: int = 10

    def __post_init__(self):
        if not (0 < self.alpha_merge < 1 and 0 < self.alpha_split < 1):
            raise ConfigError("alpha thresholds must lie strictly in (0, 1)")
        if self.statistic not in ("pearson", "likelihood-ratio"):
            raise ConfigError(f"unknown statistic {self.statistic!r}")
        if self.max_depth < 1:
            raise ConfigError("max_depth must be at least 1")
        if not 1 <= self.min_child_size <= self.min_parent_size:
            raise ConfigError("need 1 <= min_child_size <= min_parent_size")


@dataclass(frozen=True)
class ContingencyTable:
    """Cross-classification of predictor categories against target classes.

    Categories with no observations are dropped at construction; expected
    counts follow the independence model row_total * col_total / N.
    """

    row_labels: tuple[tuple[str, ...], ...]
    classes: tuple[str, ...]
    observed: np.ndarray

    @property
    def row_totals(self) -> np.ndarray:
        return self.observed.sum(axis=1)

    @property
    def col_totals(self) -> np.ndarray:
        return self.observed.sum(axis=0)

    @property
    def total(self) -> int:
        return int(self.observed.sum())

    @property
    def expected(self) -> np.ndarray:
        return np.outer(self.row_totals, self.col_totals) / self.total


def build_contingency(rows: Sequence[Mapping[str, str]], predictor: str,
                      schema: Schema = SITE_SCHEMA) -> ContingencyTable:
    """Tally predictor level against target class over the given rows."""
    if not rows:
        raise ValidationError("cannot build a contingency table from no rows")
    attribute = schema.attribute(predictor)
    level_index = {level: i for i, level in enumerate(attribute.levels)}
    class_index = {cls: j for j, cls in enumerate(schema.classes)}
    counts = np.zeros((len(attribute.levels), len(schema.classes)), dtype=np.int64)
    for row in rows:
        level = row[predictor]
        cls = row[schema.target]
        if level not in level_index:
            raise ValidationError(f"level {level!r} not in schema for {predictor}")
        if cls not in class_index:
            raise ValidationError(f"class {cls!r} not in schema target classes")
        counts[level_index[level], class_index[cls]] += 1
    keep = counts.sum(axis=1) > 0
    return ContingencyTable(
        row_labels=tuple((level,) for level, k in zip(attribute.levels, keep) if k),
        classes=schema.classes,
        observed=counts[keep],
    )


@dataclass(frozen=True)
class ChiSquareResult:
    statistic: float
    df: int
    degenerate: bool = False


def _effective(observed: np.ndarray) -> np.ndarray:
    """Drop all-zero columns; callers have already dropped empty rows."""
    return observed[:, observed.sum(axis=0) > 0]


def pearson_chi_square(table: ContingencyTable) -> ChiSquareResult:
    """Pearson statistic sum((n - m)^2 / m) with df = (I-1)(J-1).

    Tables that reduce to a single row or column carry no association
    signal and come back flagged degenerate (treat as p = 1).
    """
    return _pearson_from_observed(table.observed)


def _pearson_from_observed(observed: np.ndarray) -> ChiSquareResult:
    n = _effective(observed)
    if n.shape[0] < 2 or n.shape[1] < 2:
        return ChiSquareResult(0.0, 0, degenerate=True)
    m = np.outer(n.sum(axis=1), n.sum(axis=0)) / n.sum()
    stat = float(((n - m) ** 2 / m).sum())
    return ChiSquareResult(stat, (n.shape[0] - 1) * (n.shape[1] - 1))


def likelihood_ratio_stat(table: ContingencyTable) -> ChiSquareResult:
    """G-squared statistic 2 * sum(n * ln(n / m)); empty cells contribute 0."""
    return _likelihood_from_observed(table.observed)


def _likelihood_from_observed(observed: np.ndarray) -> ChiSquareResult:
    n = _effective(observed)
    if n.shape[0] < 2 or n.shape[1] < 2:
        return ChiSquareResult(0.0, 0, degenerate=True)
    m = np.outer(n.sum(axis=1), n.sum(axis=0)) / n.sum()
    mask = n > 0
    stat = float(2.0 * (n[mask] * np.log(n[mask] / m[mask])).sum())
    return ChiSquareResult(max(stat, 0.0), (n.shape[0] - 1) * (n.shape[1] - 1))


_STATISTICS = {
    "pearson": _pearson_from_observed,
    "likelihood-ratio": _likelihood_from_observed,
}


def chi_square_p_value(statistic: float, df: int) -> float:
    """Upper-tail chi-square probability via the regularized incomplete
    gamma function Q(df/2, statistic/2)."""
    if statistic < 0:
        raise ValueError(f"statistic must be non-negative, got {statistic}")
    if df < 1:
        raise ValueError(f"df must be at least 1, got {df}")
    return float(gammaincc(df / 2.0, statistic / 2.0))


def _observed_p_value(observed: np.ndarray, statistic: str) -> float:
    result = _STATISTICS[statistic](observed)
    if result.degenerate:
        return 1.0
    return chi_square_p_value(result.statistic, result.df)


@dataclass(frozen=True)
class CategoryGrouping:
    """Partition of a predictor's observed levels; groups of an ordinal
    predictor are contiguous runs in level order."""

    groups: tuple[tuple[str, ...], ...]

    def group_of(self, level: str) -> tuple[str, ...] | None:
        for group in self.groups:
            if level in group:
                return group
        return None


def _group_counts(rows, predictor, schema) -> tuple[list[str], dict[str, np.ndarray]]:
    """Observed levels in canonical order plus per-level class-count vectors."""
    attribute = schema.attribute(predictor)
    class_index = {cls: j for j, cls in enumerate(schema.classes)}
    counts: dict[str, np.ndarray] = {}
    for row in rows:
        level = row[predictor]
        if level not in attribute.levels:
            raise ValidationError(f"level {level!r} not in schema for {predictor}")
        vector = counts.setdefault(level, np.zeros(len(schema.classes), dtype=np.int64))
        vector[class_index[row[schema.target]]] += 1
    ordered = [level for level in attribute.levels if level in counts]
    return ordered, counts


def merge_categories(rows: Sequence[Mapping[str, str]], predictor: str,
                     config: ChaidConfig = ChaidConfig(),
                     schema: Schema = SITE_SCHEMA) -> CategoryGrouping:
    """Kass-style merging: repeatedly pool the pair of groups whose two-way
    sub-table is least significant, while that pair's p exceeds alpha_merge.

    Ordinal predictors only ever merge adjacent groups. The result is a
    fixed point: every remaining eligible pair differs at the alpha_merge
    level, or a single group is left.
    """
    attribute = schema.attribute(predictor)
    ordered, counts = _group_counts(rows, predictor, schema)
    if len(ordered) < 2:
        raise ValidationError(f"predictor {predictor} has fewer than 2 observed levels")
    groups: list[tuple[str, ...]] = [(level,) for level in ordered]
    vectors: list[np.ndarray] = [counts[level].copy() for level in ordered]

    while len(groups) > 1:
        if attribute.ordinal:
            pairs = [(i, i + 1) for i in range(len(groups) - 1)]
        else:
            pairs = [(i, j) for i in range(len(groups)) for j in range(i + 1, len(groups))]
        best_pair = None
        best_p = -1.0
        for i, j in pairs:
            p = _observed_p_value(np.vstack([vectors[i], vectors[j]]), config.statistic)
            if p > best_p:
                best_p = p
                best_pair = (i, j)
        if best_p <= config.alpha_merge:
            break
        i, j = best_pair
        groups[i] = groups[i] + groups[j]
        vectors[i] = vectors[i] + vectors[j]
        del groups[j], vectors[j]
    return CategoryGrouping(groups=tuple(groups))


def bonferroni_multiplier(c: int, g: int, ordinal: bool) -> int:
    """Number of ways c categories can be reduced to g groups: contiguous
    partitions for ordinal predictors, unordered set partitions (a Stirling
    number of the second kind) for nominal ones."""
    if not 1 <= g <= c:
        raise ValueError(f"need 1 <= g <= c, got c={c} g={g}")
    if ordinal:
        return math.comb(c - 1, g - 1)
    total = sum((-1) ** i * math.comb(g, i) * (g - i) ** c for i in range(g))
    return total // math.factorial(g)


def adjusted_p(rows: Sequence[Mapping[str, str]], predictor: str,
               grouping: CategoryGrouping, config: ChaidConfig = ChaidConfig(),
               schema: Schema = SITE_SCHEMA) -> float:
    """Bonferroni-adjusted p of the grouped table, clamped to 1."""
    attribute = schema.attribute(predictor)
    ordered, counts = _group_counts(rows, predictor, schema)
    observed = np.vstack([
        sum((counts[level] for level in group), np.zeros(len(schema.classes), dtype=np.int64))
        for group in grouping.groups
    ])
    multiplier = bonferroni_multiplier(len(ordered), len(grouping.groups), attribute.ordinal)
    return min(1.0, multiplier * _observed_p_value(observed, config.statistic))


@dataclass(frozen=True)
class SplitChoice:
    predictor: str
    grouping: CategoryGrouping
    adjusted_p: float


def select_split(rows: Sequence[Mapping[str, str]], predictors: Sequence[str],
                 config: ChaidConfig = ChaidConfig(),
                 schema: Schema = SITE_SCHEMA) -> SplitChoice | None:
    """Candidate with the smallest adjusted p, or None.

    The winner (ties broken by predictor order) must clear alpha_split,
    produce at least two groups, and give every child at least
    min_child_size records; otherwise the node stays terminal.
    """
    best: SplitChoice | None = None
    for predictor in predictors:
        ordered, _ = _group_counts(rows, predictor, schema)
        if len(ordered) < 2:
            continue
        grouping = merge_categories(rows, predictor, config, schema)
        p_adj = adjusted_p(rows, predictor, grouping, config, schema)
        if best is None or p_adj < best.adjusted_p:
            best = SplitChoice(predictor=predictor, grouping=grouping, adjusted_p=p_adj)
    if best is None or len(best.grouping.groups) < 2 or best.adjusted_p >= config.alpha_split:
        return None
    group_sizes = _child_sizes(rows, best.predictor, best.grouping)
    if any(size < config.min_child_size for size in group_sizes):
        return None
    return best


def _child_sizes(rows, predictor, grouping) -> list[int]:
    sizes = [0] * len(grouping.groups)
    membership = {level: k for k, group in enumerate(grouping.groups) for level in group}
    for row in rows:
        k = membership.get(row[predictor])
        if k is not None:
            sizes[k] += 1
    return sizes


STOP_REASONS = ("pure", "min_parent_size", "max_depth", "no_split")


@dataclass
class ChaidNode:
    id: int
    depth: int
    class_counts: dict[str, int]
    split: SplitChoice | None = None
    children: tuple[int, ...] | None = None
    stop_reason: str | None = None

    @property
    def total(self) -> int:
        return sum(self.class_counts.values())

    @property
    def is_leaf(self) -> bool:
        return self.split is None


@dataclass(frozen=True)
class ChaidTree:
    schema: Schema
    config: ChaidConfig
    nodes: tuple[ChaidNode, ...]

    @property
    def root(self) -> ChaidNode:
        return self.nodes[0]

    def node(self, node_id: int) -> ChaidNode:
        return self.nodes[node_id]

    def leaves(self) -> list[ChaidNode]:
        return [node for node in self.nodes if node.is_leaf]


def grow_tree_from_rows(rows: Sequence[Mapping[str, str]], schema: Schema,
                        config: ChaidConfig = ChaidConfig()) -> ChaidTree:
    """Grow a tree over plain attribute->level mappings."""
    if len(rows) < config.min_parent_size:
        raise ValidationError(
            f"need at least min_parent_size={config.min_parent_size} records, "
            f"got {len(rows)}")
    nodes: list[ChaidNode] = []

    def class_counts(subset) -> dict[str, int]:
        counts = {cls: 0 for cls in schema.classes}
        for row in subset:
            counts[row[schema.target]] += 1
        return counts

    def build(subset, depth: int) -> int:
        node = ChaidNode(id=len(nodes), depth=depth, class_counts=class_counts(subset))
        nodes.append(node)
        nonzero = [c for c in node.class_counts.values() if c > 0]
        if len(nonzero) == 1:
            node.stop_reason = "pure"
            return node.id
        if len(subset) < config.min_parent_size:
            node.stop_reason = "min_parent_size"
            return node.id
        if depth + 1 >= config.max_depth:
            node.stop_reason = "max_depth"
            return node.id
        choice = select_split(subset, schema.predictor_names, config, schema)
        if choice is None:
            node.stop_reason = "no_split"
            return node.id
        node.split = choice
        membership = {level: k for k, group in enumerate(choice.grouping.groups)
                      for level in group}
        buckets: list[list] = [[] for _ in choice.grouping.groups]
        for row in subset:
            buckets[membership[row[choice.predictor]]].append(row)
        node.children = tuple(build(bucket, depth + 1) for bucket in buckets)
        return node.id

    build(list(rows), 0)
    return ChaidTree(schema=schema, config=config, nodes=tuple(nodes))


def grow_tree(dataset, config: ChaidConfig = ChaidConfig(),
              schema: Schema = SITE_SCHEMA) -> ChaidTree:
    """Grow a tree from a Dataset of SiteRecords (all must be labeled)."""
    rows = []
    for record in dataset.records:
        row = record.as_row()
        if row[schema.target] not in schema.classes:
            raise ValidationError(
                "dataset contains unlabeled records; filter with labeled_only() first")
        rows.append(row)
    return grow_tree_from_rows(rows, schema, config)


@dataclass(frozen=True)
class Prediction:
    label: str
    probability: float  # probability of the positive (first) class
    fallbacks: tuple[str, ...] = ()


def predict(tree: ChaidTree, row: Mapping[str, str] | SiteRecord) -> Prediction:
    """Route a record to a leaf and report the leaf's majority class.

    Levels never seen at a split fall back to the largest child; each such
    event is reported in the prediction. Ties go to the negative class.
    """
    if isinstance(row, SiteRecord):
        row = row.as_row()
    node = tree.root
    fallbacks: list[str] = []
    while node.split is not None:
        level = row[node.split.predictor]
        groups = node.split.grouping.groups
        target_child = None
        for group, child_id in zip(groups, node.children):
            if level in group:
                target_child = child_id
                break
        if target_child is None:
            sizes = [tree.node(cid).total for cid in node.children]
            target_child = node.children[sizes.index(max(sizes))]
            fallbacks.append(f"node {node.id}: unseen {node.split.predictor}={level}")
        node = tree.node(target_child)
    positive, negative = tree.schema.classes[0], tree.schema.classes[-1]
    pos_count = node.class_counts.get(positive, 0)
    probability = pos_count / node.total if node.total else 0.0
    label = positive if pos_count > node.total - pos_count else negative
    return Prediction(label=label, probability=probability, fallbacks=tuple(fallbacks))


@dataclass(frozen=True)
class PatternRule:
    """A root-to-leaf condition chain with its class support."""

    conditions: tuple[tuple[str, tuple[str, ...]], ...]
    spam_count: int
    total_count: int
    leaf_id: int

    @property
    def spam_proportion(self) -> float:
        return self.spam_count / self.total_count if self.total_count else 0.0

    def describe(self) -> str:
        if not self.conditions:
            clause = "always"
        else:
            clause = " and ".join(
                f"{name} in {{{', '.join(levels)}}}" for name, levels in self.conditions)
        return (f"if {clause}: spam {self.spam_proportion:.1%} "
                f"({self.spam_count}/{self.total_count})")


def extract_rules(tree: ChaidTree) -> list[PatternRule]:
    """One rule per leaf, sorted by spam proportion descending."""
    positive = tree.schema.classes[0]
    rules: list[PatternRule] = []

    def walk(node: ChaidNode, conditions):
        if node.is_leaf:
            rules.append(PatternRule(
                conditions=tuple(conditions),
                spam_count=node.class_counts.get(positive, 0),
                total_count=node.total,
                leaf_id=node.id,
            ))
            return
        for group, child_id in zip(node.split.grouping.groups, node.children):
            walk(tree.node(child_id), conditions + [(node.split.predictor, group)])

    walk(tree.root, [])
    rules.sort(key=lambda rule: (-rule.spam_proportion, rule.leaf_id))
    return rules


def _tree_to_dict(tree: ChaidTree) -> dict:
    return {
        "version": MODEL_VERSION,
        "config": {
            "alpha_merge": tree.config.alpha_merge,
            "alpha_split": tree.config.alpha_split,
            "statistic": tree.config.statistic,
            "max_depth": tree.config.max_depth,
            "min_parent_size": tree.config.min_parent_size,
            "min_child_size": tree.config.min_child_size,
        },
        "attribute_schema": [
            {"name": a.name, "levels": list(a.levels), "ordinal": a.ordinal}
            for a in tree.schema.attributes
        ],
        "target": tree.schema.target,
        "classes": list(tree.schema.classes),
        "nodes": [
            {
                "id": node.id,
                "depth": node.depth,
                "class_counts": dict(node.class_counts),
                **({"split": {
                    "predictor": node.split.predictor,
                    "groups": [list(group) for group in node.split.grouping.groups],
                    "adjusted_p": node.split.adjusted_p,
                }, "children": list(node.children)} if node.split else {}),
                **({"stop_reason": node.stop_reason} if node.stop_reason else {}),
            }
            for node in tree.nodes
        ],
    }


def save_model(tree: ChaidTree, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(_tree_to_dict(tree), sort_keys=True, indent=2) + "\n",
        encoding="utf-8")


def dumps_model(tree: ChaidTree) -> str:
    return json.dumps(_tree_to_dict(tree), sort_keys=True, indent=2)


def load_model(path: str | Path) -> ChaidTree:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ModelFormatError(f"cannot read model file {path}: {exc}") from None
    return _tree_from_dict(raw)


def _tree_from_dict(raw: dict) -> ChaidTree:
    try:
        if raw["version"] != MODEL_VERSION:
            raise ModelFormatError(
                f"model version {raw['version']!r} not supported "
                f"(expected {MODEL_VERSION!r})")
        schema = Schema(
            attributes=tuple(
                AttributeSpec(a["name"], tuple(a["levels"]), a["ordinal"])
                for a in raw["attribute_schema"]),
            target=raw["target"],
            classes=tuple(raw["classes"]),
        )
        config = ChaidConfig(**raw["config"])
        nodes = []
        for entry in raw["nodes"]:
            split = None
            children = None
            if "split" in entry:
                split = SplitChoice(
                    predictor=entry["split"]["predictor"],
                    grouping=CategoryGrouping(groups=tuple(
                        tuple(group) for group in entry["split"]["groups"])),
                    adjusted_p=entry["split"]["adjusted_p"],
                )
                children = tuple(entry["children"])
            nodes.append(ChaidNode(
                id=entry["id"],
                depth=entry["depth"],
                class_counts=dict(entry["class_counts"]),
                split=split,
                children=children,
                stop_reason=entry.get("stop_reason"),
            ))
        return ChaidTree(schema=schema, config=config, nodes=tuple(nodes))
    except ModelFormatError:
        raise
    except (KeyError, TypeError, ValueError, ConfigError) as exc:
        raise ModelFormatError(f"malformed model document: {exc}") from None
