import itertools
import json
import math
import random
from collections import Counter

import numpy as np
import pytest

from conftest import make_record
from spamsift.chaid import (
    AttributeSpec,
    CategoryGrouping,
    ChaidConfig,
    ContingencyTable,
    Schema,
    adjusted_p,
    bonferroni_multiplier,
    build_contingency,
    chi_square_p_value,
    dumps_model,
    extract_rules,
    grow_tree,
    grow_tree_from_rows,
    likelihood_ratio_stat,
    load_model,
    merge_categories,
    pearson_chi_square,
    predict,
    save_model,
    select_split,
)
from spamsift.dataset import Dataset
from spamsift.errors import ModelFormatError, SchemaError, ValidationError
from spamsift.features import Label


def one_predictor_schema(levels, ordinal=True, name="x") -> Schema:
    return Schema(attributes=(AttributeSpec(name, tuple(levels), ordinal),))


def rows_from_counts(schema, counts) -> list[dict]:
    """counts: {level: (spam, non_spam)} -> row dicts for a 1-predictor schema."""
    name = schema.attributes[0].name
    rows = []
    for level, (spam, non_spam) in counts.items():
        rows += [{name: level, "label": "spam"}] * spam
        rows += [{name: level, "label": "non-spam"}] * non_spam
    return rows


class TestContingency:
    def test_uniform_two_by_two(self):
        records = [
            make_record(label=Label.SPAM, black_list="yes").as_row(),
            make_record(label=Label.NON_SPAM, black_list="yes").as_row(),
            make_record(label=Label.SPAM, black_list="no").as_row(),
            make_record(label=Label.NON_SPAM, black_list="no").as_row(),
        ]
        table = build_contingency(records, "black_list")
        assert table.observed.tolist() == [[1, 1], [1, 1]]
        assert table.expected.tolist() == [[1.0, 1.0], [1.0, 1.0]]
        assert table.total == 4

    def test_single_class_expected_equals_observed(self):
        records = [make_record(label=Label.SPAM, meta_tag=l).as_row()
                   for l in ("very-min", "min", "min")]
        table = build_contingency(records, "meta_tag")
        assert np.array_equal(table.expected, table.observed)

    def test_matches_tally_oracle_on_random_records(self):
        rng = random.Random(321)
        levels = ["very-min", "min", "mid", "max", "very-max"]
        records = [make_record(label=rng.choice([Label.SPAM, Label.NON_SPAM]),
                               count_of_post=rng.choice(levels)).as_row()
                   for _ in range(200)]
        table = build_contingency(records, "count_of_post")
        oracle = Counter((r["count_of_post"], r["label"]) for r in records)
        for row_label, row in zip(table.row_labels, table.observed):
            (level,) = row_label
            assert row.tolist() == [oracle.get((level, "spam"), 0),
                                    oracle.get((level, "non-spam"), 0)]

    def test_empty_levels_are_dropped(self):
        records = [make_record(label=Label.SPAM, meta_tag="very-max").as_row(),
                   make_record(label=Label.NON_SPAM, meta_tag="very-min").as_row()]
        table = build_contingency(records, "meta_tag")
        assert table.row_labels == (("very-min",), ("very-max",))

    def test_unknown_attribute(self):
        with pytest.raises(SchemaError):
            build_contingency([make_record().as_row()], "page_rank")

    def test_margin_consistency(self):
        records = [make_record(label=Label.SPAM, meta_tag="min").as_row()] * 3 + \
                  [make_record(label=Label.NON_SPAM, meta_tag="max").as_row()] * 5
        table = build_contingency(records, "meta_tag")
        assert abs(table.expected.sum() - table.observed.sum()) < 1e-9


def table_of(observed) -> ContingencyTable:
    observed = np.asarray(observed, dtype=np.int64)
    return ContingencyTable(
        row_labels=tuple((f"r{i}",) for i in range(observed.shape[0])),
        classes=("spam", "non-spam"),
        observed=observed,
    )


class TestPearson:
    def test_zero_when_observed_matches_expected(self):
        result = pearson_chi_square(table_of([[10, 10], [10, 10]]))
        assert result.statistic == 0.0
        assert result.df == 1

    def test_hand_evaluated_example(self):
        # all m_ij are 15, so the statistic is 4 * 25/15 = 20/3
        result = pearson_chi_square(table_of([[10, 20], [20, 10]]))
        assert result.statistic == pytest.approx(6.6667, abs=1e-4)
        assert result.df == 1

    def test_single_row_is_degenerate(self):
        assert pearson_chi_square(table_of([[7, 9]])).degenerate

    def test_single_column_is_degenerate(self):
        assert pearson_chi_square(table_of([[7, 0], [9, 0]])).degenerate

    def test_invariant_under_class_swap(self):
        rng = random.Random(17)
        for _ in range(25):
            observed = np.array([[rng.randint(0, 30) for _ in range(2)] for _ in range(3)])
            for statistic in (pearson_chi_square, likelihood_ratio_stat):
                direct = statistic(table_of(observed))
                swapped = statistic(table_of(observed[:, ::-1]))
                assert direct.statistic == pytest.approx(swapped.statistic, rel=1e-12)

    def test_scaling_counts_scales_statistic(self):
        base = np.array([[12, 5], [3, 14], [8, 8]])
        s1 = pearson_chi_square(table_of(base)).statistic
        for k in (2, 3, 7):
            sk = pearson_chi_square(table_of(base * k)).statistic
            assert sk == pytest.approx(k * s1, rel=1e-12)

    def test_agrees_with_likelihood_ratio_near_independence(self):
        rng = random.Random(99)
        for _ in range(20):
            rows = np.array([rng.randint(150, 250) for _ in range(3)])
            cols = np.array([rng.randint(300, 400), rng.randint(200, 300)])
            m = np.outer(rows, cols) / cols.sum()
            n = np.maximum(1, np.rint(m + rng.uniform(-5, 5))).astype(np.int64)
            x2 = pearson_chi_square(table_of(n)).statistic
            g2 = likelihood_ratio_stat(table_of(n)).statistic
            if max(x2, g2) > 0.05:
                assert abs(x2 - g2) <= 0.15 * max(x2, g2)


class TestLikelihoodRatio:
    def test_zero_when_observed_matches_expected(self):
        assert likelihood_ratio_stat(table_of([[10, 10], [10, 10]])).statistic == 0.0

    def test_direct_evaluation_example(self):
        # 2 * (2 * 10 * ln(2/3) + 2 * 20 * ln(4/3)) = 6.795961...
        expected = 2 * (20 * math.log(10 / 15) + 40 * math.log(20 / 15))
        result = likelihood_ratio_stat(table_of([[10, 20], [20, 10]]))
        assert result.statistic == pytest.approx(expected, abs=1e-9)
        assert result.statistic == pytest.approx(6.795961, abs=1e-4)
        assert result.df == 1

    def test_empty_cell_contributes_zero(self):
        result = likelihood_ratio_stat(table_of([[10, 0], [5, 5]]))
        assert math.isfinite(result.statistic)
        assert result.statistic > 0

    def test_degenerate(self):
        assert likelihood_ratio_stat(table_of([[4, 6]])).degenerate


def quad_oracle(statistic: float, df: int) -> float:
    """Adaptive quadrature of the hand-written chi-square density."""
    from scipy.integrate import quad

    def density(x):
        return math.exp((df / 2 - 1) * math.log(x) - x / 2
                        - math.lgamma(df / 2) - (df / 2) * math.log(2))

    value, _ = quad(density, statistic, np.inf, limit=200)
    return value


class TestChiSquarePValue:
    def test_zero_statistic(self):
        for df in (1, 2, 10, 50):
            assert chi_square_p_value(0.0, df) == 1.0

    def test_critical_value_at_five_percent(self):
        assert chi_square_p_value(3.841, 1) == pytest.approx(0.0500, abs=5e-4)

    def test_pairs_with_pearson_example(self):
        assert chi_square_p_value(20 / 3, 1) == pytest.approx(0.00982, abs=5e-4)

    def test_negative_statistic_rejected(self):
        with pytest.raises(ValueError):
            chi_square_p_value(-0.1, 1)

    def test_zero_df_rejected(self):
        with pytest.raises(ValueError):
            chi_square_p_value(1.0, 0)

    def test_quadrature_oracle_spot_checks(self):
        for statistic, df in ((0.5, 1), (3.841, 1), (12.0, 4), (30.0, 20), (90.0, 50)):
            assert chi_square_p_value(statistic, df) == pytest.approx(
                quad_oracle(statistic, df), abs=1e-8)


def count_partitions_by_enumeration(c: int, g: int, ordinal: bool) -> int:
    """Brute-force partition counting oracle."""
    if ordinal:
        return sum(1 for _ in itertools.combinations(range(1, c), g - 1))

    def set_partitions(items):
        if not items:
            yield ()
            return
        head, tail = items[0], items[1:]
        for part in set_partitions(tail):
            for i in range(len(part)):
                yield part[:i] + ((head,) + part[i],) + part[i + 1:]
            yield ((head,),) + part

    return sum(1 for part in set_partitions(list(range(c))) if len(part) == g)


class TestBonferroni:
    def test_no_merging_means_one(self):
        assert bonferroni_multiplier(5, 5, ordinal=True) == 1
        assert bonferroni_multiplier(4, 4, ordinal=False) == 1

    def test_ordinal_two_groups_of_five(self):
        assert bonferroni_multiplier(5, 2, ordinal=True) == 4

    def test_nominal_two_groups_of_four(self):
        assert bonferroni_multiplier(4, 2, ordinal=False) == 7

    def test_brute_force_all_small_cases(self):
        for c in range(1, 7):
            for g in range(1, c + 1):
                for ordinal in (True, False):
                    assert bonferroni_multiplier(c, g, ordinal) == \
                        count_partitions_by_enumeration(c, g, ordinal), (c, g, ordinal)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            bonferroni_multiplier(3, 4, ordinal=True)
        with pytest.raises(ValueError):
            bonferroni_multiplier(3, 0, ordinal=False)


LENIENT = ChaidConfig(min_parent_size=2, min_child_size=1)


class TestMergeCategories:
    def test_identical_distributions_merge(self):
        schema = one_predictor_schema(("a", "b"))
        rows = rows_from_counts(schema, {"a": (10, 30), "b": (10, 30)})
        grouping = merge_categories(rows, "x", LENIENT, schema)
        assert grouping.groups == (("a", "b"),)

    def test_wildly_different_distributions_stay_apart(self):
        schema = one_predictor_schema(("a", "b"))
        rows = rows_from_counts(schema, {"a": (40, 2), "b": (2, 40)})
        grouping = merge_categories(rows, "x", LENIENT, schema)
        assert grouping.groups == (("a",), ("b",))

    def test_ordinal_merges_only_adjacent(self):
        schema = one_predictor_schema(("a", "b", "c"))
        rows = rows_from_counts(schema, {"a": (20, 5), "b": (5, 20), "c": (19, 6)})
        grouping = merge_categories(rows, "x", LENIENT, schema)
        assert grouping.groups == (("a",), ("b",), ("c",))

    def test_nominal_merges_across_the_order(self):
        schema = one_predictor_schema(("a", "b", "c"), ordinal=False)
        rows = rows_from_counts(schema, {"a": (20, 5), "b": (5, 20), "c": (19, 6)})
        grouping = merge_categories(rows, "x", LENIENT, schema)
        assert set(map(frozenset, grouping.groups)) == {frozenset({"a", "c"}), frozenset({"b"})}

    def test_planted_blocks_match_exhaustive_partition_search(self):
        # 4 ordinal levels, two rate blocks; best over all contiguous partitions
        schema = one_predictor_schema(("a", "b", "c", "d"))
        rng = random.Random(0)
        rates = {"a": 0.15, "b": 0.15, "c": 0.7, "d": 0.7}
        rows = []
        for _ in range(500):
            level = rng.choice(schema.attributes[0].levels)
            label = "spam" if rng.random() < rates[level] else "non-spam"
            rows.append({"x": level, "label": label})
        grouping = merge_categories(rows, "x", LENIENT, schema)

        best_p, best_groups = None, None
        levels = [l for l in schema.attributes[0].levels]
        for cuts in range(1, len(levels)):
            for positions in itertools.combinations(range(1, len(levels)), cuts):
                bounds = [0, *positions, len(levels)]
                groups = tuple(tuple(levels[bounds[i]:bounds[i + 1]])
                               for i in range(len(bounds) - 1))
                p = adjusted_p(rows, "x", CategoryGrouping(groups), LENIENT, schema)
                if best_p is None or p < best_p:
                    best_p, best_groups = p, groups
        assert grouping.groups == best_groups

    def test_fixed_point(self):
        rng = random.Random(2023)
        for _ in range(10):
            schema = one_predictor_schema(("a", "b", "c", "d", "e"))
            counts = {level: (rng.randint(0, 25), rng.randint(0, 25))
                      for level in schema.attributes[0].levels}
            rows = rows_from_counts(schema, counts)
            if len({r["x"] for r in rows}) < 2:
                continue
            grouping = merge_categories(rows, "x", LENIENT, schema)
            # relabel levels by their group and merge again: nothing should move
            relabels = {level: f"g{k}" for k, group in enumerate(grouping.groups)
                        for level in group}
            regrouped_schema = one_predictor_schema(
                tuple(f"g{k}" for k in range(len(grouping.groups))))
            rerows = [{"x": relabels[r["x"]], "label": r["label"]} for r in rows]
            if len(grouping.groups) == 1:
                continue
            again = merge_categories(rerows, "x", LENIENT, regrouped_schema)
            assert again.groups == tuple((f"g{k}",) for k in range(len(grouping.groups)))

    def test_single_level_rejected(self):
        schema = one_predictor_schema(("a", "b"))
        rows = rows_from_counts(schema, {"a": (5, 5)})
        with pytest.raises(ValidationError):
            merge_categories(rows, "x", LENIENT, schema)


class TestAdjustedP:
    def test_no_merging_equals_raw_p(self):
        schema = one_predictor_schema(("a", "b", "c"))
        rows = rows_from_counts(schema, {"a": (12, 2), "b": (6, 8), "c": (1, 13)})
        grouping = CategoryGrouping((("a",), ("b",), ("c",)))
        table = build_contingency(rows, "x", schema)
        result = pearson_chi_square(table)
        raw = chi_square_p_value(result.statistic, result.df)
        assert adjusted_p(rows, "x", grouping, LENIENT, schema) == pytest.approx(raw, rel=1e-12)

    def test_multiplies_by_partition_count(self):
        schema = one_predictor_schema(("a", "b", "c", "d", "e"))
        rows = rows_from_counts(schema, {
            "a": (10, 20), "b": (11, 19), "c": (9, 21), "d": (25, 5), "e": (26, 4)})
        grouping = CategoryGrouping((("a", "b", "c"), ("d", "e")))
        pooled = table_of([[30, 60], [51, 9]])
        result = pearson_chi_square(pooled)
        raw = chi_square_p_value(result.statistic, result.df)
        # c=5 observed levels grouped to g=2: ordinal multiplier comb(4,1)=4
        assert adjusted_p(rows, "x", grouping, LENIENT, schema) == pytest.approx(
            min(1.0, 4 * raw), rel=1e-12)

    def test_clamped_at_one(self):
        schema = one_predictor_schema(("a", "b", "c", "d", "e"))
        rows = rows_from_counts(schema, {
            "a": (10, 10), "b": (11, 9), "c": (9, 11), "d": (10, 10), "e": (11, 9)})
        grouping = CategoryGrouping((("a", "b", "c"), ("d", "e")))
        assert adjusted_p(rows, "x", grouping, LENIENT, schema) == 1.0


def two_predictor_schema() -> Schema:
    return Schema(attributes=(
        AttributeSpec("first", ("a", "b", "c")),
        AttributeSpec("second", ("d", "e")),
    ))


class TestSelectSplit:
    def test_pure_node_has_no_split(self):
        schema = one_predictor_schema(("a", "b"))
        rows = rows_from_counts(schema, {"a": (20, 0), "b": (15, 0)})
        assert select_split(rows, ("x",), LENIENT, schema) is None

    def test_perfect_separator_is_selected(self):
        schema = two_predictor_schema()
        rng = random.Random(6)
        rows = []
        for _ in range(60):
            spam = rng.random() < 0.5
            rows.append({"first": "a" if spam else "c",
                         "second": rng.choice(("d", "e")),
                         "label": "spam" if spam else "non-spam"})
        choice = select_split(rows, schema.predictor_names, LENIENT, schema)
        assert choice is not None
        assert choice.predictor == "first"
        assert choice.adjusted_p < 1e-6

    def test_exact_independence_gives_none(self):
        schema = two_predictor_schema()
        rows = []
        for first in ("a", "b"):
            for second in ("d", "e"):
                rows += [{"first": first, "second": second, "label": "spam"}] * 5
                rows += [{"first": first, "second": second, "label": "non-spam"}] * 10
        assert select_split(rows, schema.predictor_names, LENIENT, schema) is None

    def test_small_child_vetoes_the_winning_predictor(self):
        # "first" has the smallest adjusted p but leaves a 4-record child;
        # per the documented semantics the node becomes terminal even though
        # "second" could have split.
        schema = two_predictor_schema()
        rows = []
        rows += [{"first": "a", "second": "d", "label": "non-spam"}] * 30
        rows += [{"first": "a", "second": "e", "label": "non-spam"}] * 10
        rows += [{"first": "b", "second": "d", "label": "spam"}] * 10
        rows += [{"first": "b", "second": "e", "label": "spam"}] * 30
        rows += [{"first": "c", "second": "d", "label": "non-spam"}] * 2
        rows += [{"first": "c", "second": "e", "label": "non-spam"}] * 2
        config = ChaidConfig(min_parent_size=10, min_child_size=5)
        strict_first = select_split(rows, ("first",), config, schema)
        assert strict_first is None
        alone_second = select_split(rows, ("second",), config, schema)
        assert alone_second is not None
        assert select_split(rows, schema.predictor_names, config, schema) is None

    def test_tie_broken_by_predictor_order(self):
        schema = Schema(attributes=(AttributeSpec("p", ("a", "b")),
                                    AttributeSpec("q", ("a", "b"))))
        rows = []
        for level, label, count in (("a", "spam", 25), ("a", "non-spam", 5),
                                    ("b", "spam", 5), ("b", "non-spam", 25)):
            rows += [{"p": level, "q": level, "label": label}] * count
        choice = select_split(rows, schema.predictor_names, LENIENT, schema)
        assert choice.predictor == "p"


def constant_dataset(n_spam: int, n_non_spam: int) -> Dataset:
    records = [make_record(label=Label.SPAM, url=f"http://s{i}.test/")
               for i in range(n_spam)]
    records += [make_record(label=Label.NON_SPAM, url=f"http://n{i}.test/")
                for i in range(n_non_spam)]
    return Dataset(tuple(records))


class TestGrowTree:
    def test_independent_target_grows_single_root(self):
        schema = one_predictor_schema(("a", "b"))
        rows = rows_from_counts(schema, {"a": (10, 30), "b": (10, 30)})
        tree = grow_tree_from_rows(rows, schema, ChaidConfig(min_parent_size=10))
        assert len(tree.nodes) == 1
        assert tree.root.stop_reason == "no_split"

    def test_unlabeled_records_rejected(self):
        dataset = Dataset((make_record(label=Label.UNLABELED),) * 40)
        with pytest.raises(ValidationError):
            grow_tree(dataset)

    def test_too_small_dataset_rejected(self):
        with pytest.raises(ValidationError):
            grow_tree(constant_dataset(3, 3))

    def test_max_depth_one_is_a_stump(self):
        schema = one_predictor_schema(("a", "b"))
        rows = rows_from_counts(schema, {"a": (30, 2), "b": (2, 30)})
        tree = grow_tree_from_rows(rows, schema,
                                   ChaidConfig(max_depth=1, min_parent_size=4, min_child_size=2))
        assert len(tree.nodes) == 1
        assert tree.root.stop_reason == "max_depth"

    def test_levels_counted_with_root(self):
        # max_depth = 2 allows exactly one split generation below the root
        schema = Schema(attributes=(AttributeSpec("u", ("a", "b")),
                                    AttributeSpec("v", ("c", "d"))))
        rng = random.Random(42)
        rows = []
        for _ in range(200):
            u = rng.choice(("a", "b"))
            v = rng.choice(("c", "d"))
            p = (0.9 if u == "a" else 0.1) * (0.9 if v == "c" else 0.5)
            rows.append({"u": u, "v": v, "label": "spam" if rng.random() < p else "non-spam"})
        tree = grow_tree_from_rows(rows, schema, ChaidConfig(max_depth=2, min_parent_size=10,
                                                             min_child_size=5))
        assert max(node.depth for node in tree.nodes) <= 1

    def test_class_count_conservation(self):
        schema = two_predictor_schema()
        rng = random.Random(81)
        rows = []
        for _ in range(300):
            first = rng.choice(("a", "b", "c"))
            p = {"a": 0.85, "b": 0.5, "c": 0.1}[first]
            rows.append({"first": first, "second": rng.choice(("d", "e")),
                         "label": "spam" if rng.random() < p else "non-spam"})
        tree = grow_tree_from_rows(rows, schema, ChaidConfig(min_parent_size=20, min_child_size=5))
        assert len(tree.nodes) > 1
        for node in tree.nodes:
            if node.is_leaf:
                assert node.stop_reason in ("pure", "min_parent_size", "max_depth", "no_split")
                continue
            summed = {cls: 0 for cls in schema.classes}
            for child_id in node.children:
                for cls, count in tree.node(child_id).class_counts.items():
                    summed[cls] += count
            assert summed == node.class_counts
            assert node.split.adjusted_p < tree.config.alpha_split

    def test_deterministic_serialization(self):
        dataset = constant_dataset(12, 30)
        first = dumps_model(grow_tree(dataset))
        second = dumps_model(grow_tree(dataset))
        assert first == second


class TestPredict:
    def test_majority_class_of_single_node(self):
        tree = grow_tree(constant_dataset(1073, 3199))
        result = predict(tree, constant_dataset(1, 0).records[0])
        assert result.label == "non-spam"
        assert result.probability == pytest.approx(1073 / 4272, abs=1e-12)
        assert round(result.probability, 4) == 0.2512

    def test_pure_leaf(self):
        tree = grow_tree(constant_dataset(40, 0))
        result = predict(tree, constant_dataset(1, 0).records[0])
        assert result.label == "spam"
        assert result.probability == 1.0

    def test_tie_goes_to_non_spam(self):
        tree = grow_tree(constant_dataset(5, 5), ChaidConfig(min_parent_size=10))
        result = predict(tree, constant_dataset(1, 0).records[0])
        assert result.label == "non-spam"
        assert result.probability == 0.5

    def test_unseen_level_falls_back_to_largest_child(self):
        records = [make_record(label=Label.NON_SPAM, meta_tag="very-min",
                               url=f"http://n{i}.test/") for i in range(60)]
        records += [make_record(label=Label.SPAM, meta_tag="max",
                                url=f"http://s{i}.test/") for i in range(40)]
        tree = grow_tree(Dataset(tuple(records)), ChaidConfig(min_parent_size=10))
        assert tree.root.split is not None
        probe = make_record(label=Label.UNLABELED, meta_tag="mid")
        result = predict(tree, probe)
        assert result.fallbacks
        assert result.label == "non-spam"  # larger child is the non-spam one


class TestExtractRules:
    def test_single_node_tree_gives_one_unconditional_rule(self):
        tree = grow_tree(constant_dataset(10, 30))
        rules = extract_rules(tree)
        assert len(rules) == 1
        assert rules[0].conditions == ()
        assert (rules[0].spam_count, rules[0].total_count) == (10, 40)

    def test_one_rule_per_leaf_replaying_to_it(self):
        schema = two_predictor_schema()
        rng = random.Random(5)
        rows = []
        for _ in range(400):
            first = rng.choice(("a", "b", "c"))
            second = rng.choice(("d", "e"))
            p = {"a": 0.9, "b": 0.4, "c": 0.1}[first] * (1.2 if second == "d" else 0.8)
            rows.append({"first": first, "second": second,
                         "label": "spam" if rng.random() < p else "non-spam"})
        tree = grow_tree_from_rows(rows, schema, ChaidConfig(min_parent_size=20, min_child_size=5))
        rules = extract_rules(tree)
        assert len(rules) == len(tree.leaves())
        proportions = [rule.spam_proportion for rule in rules]
        assert proportions == sorted(proportions, reverse=True)
        for rule in rules:
            node = tree.root
            for predictor, group in rule.conditions:
                assert node.split.predictor == predictor
                index = node.split.grouping.groups.index(group)
                node = tree.node(node.children[index])
            assert node.id == rule.leaf_id
            assert node.is_leaf


class TestModelPersistence:
    def test_round_trip_single_node(self, tmp_path):
        tree = grow_tree(constant_dataset(10, 30))
        path = tmp_path / "model.json"
        save_model(tree, path)
        assert load_model(path) == tree

    def test_round_trip_split_tree(self, tmp_path):
        records = [make_record(label=Label.NON_SPAM, meta_tag="very-min",
                               url=f"http://n{i}.test/") for i in range(60)]
        records += [make_record(label=Label.SPAM, meta_tag="max",
                                url=f"http://s{i}.test/") for i in range(40)]
        tree = grow_tree(Dataset(tuple(records)), ChaidConfig(min_parent_size=10))
        path = tmp_path / "model.json"
        save_model(tree, path)
        loaded = load_model(path)
        assert loaded == tree
        save_model(loaded, tmp_path / "again.json")
        assert (tmp_path / "again.json").read_text() == path.read_text()

    def test_truncated_file(self, tmp_path):
        tree = grow_tree(constant_dataset(10, 30))
        path = tmp_path / "model.json"
        save_model(tree, path)
        path.write_text(path.read_text(encoding="utf-8")[:40], encoding="utf-8")
        with pytest.raises(ModelFormatError):
            load_model(path)

    def test_version_mismatch(self, tmp_path):
        tree = grow_tree(constant_dataset(10, 30))
        path = tmp_path / "model.json"
        save_model(tree, path)
        raw = json.loads(path.read_text(encoding="utf-8"))
        raw["version"] = "99"
        path.write_text(json.dumps(raw), encoding="utf-8")
        with pytest.raises(ModelFormatError, match="version"):
            load_model(path)

    def test_missing_field(self, tmp_path):
        path = tmp_path / "model.json"
        path.write_text('{"version": "1"}', encoding="utf-8")
        with pytest.raises(ModelFormatError):
            load_model(path)
