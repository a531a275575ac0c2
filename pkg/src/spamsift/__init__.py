"""Web spam feature extraction and CHAID rule mining."""

__version__ = "0.1.0"

from .chaid import (  # noqa: F401
    AttributeSpec,
    CategoryGrouping,
    ChaidConfig,
    ChaidNode,
    ChaidTree,
    ContingencyTable,
    PatternRule,
    Schema,
    SITE_SCHEMA,
    SplitChoice,
    adjusted_p,
    bonferroni_multiplier,
    build_contingency,
    chi_square_p_value,
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
from .dataset import (  # noqa: F401
    Dataset,
    FoldPlan,
    GeneratorRule,
    GeneratorSpec,
    SplitSpec,
    generate_synthetic,
    k_fold,
    load_csv,
    save_csv,
    split_train_test,
)
from .features import (  # noqa: F401
    ATTRIBUTE_NAMES,
    Blacklist,
    ExtractionConfig,
    Label,
    OrdinalLevel,
    PageDocument,
    RawFeatures,
    SiteRecord,
    check_blacklist,
    count_links,
    count_posts,
    discretize,
    extract_body_text,
    extract_record,
    load_blacklist,
    score_meta,
    score_url,
)
from .metrics import (  # noqa: F401
    ConfusionMatrix,
    CrossValidationResult,
    cross_validate,
    evaluate,
    f_measure,
    precision,
    recall,
)
from .patterns import (  # noqa: F401
    KeywordSet,
    KmpPattern,
    TagPattern,
    build_failure_table,
    contains_any,
    extract_tag_content,
    kmp_search,
    load_keyword_file,
    score_keywords,
)
