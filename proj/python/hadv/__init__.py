"""Training-data quality rates, variant generation, and exact-rate curation.

Thin python surface over the compiled core: tokenization, word-error-rate
distances, threshold neighbor search, near-duplicate rate reports, keyword
task labeling and transforms, entity-marker sample generation, and dataset
curation with verified rates.
"""

from hadv._core import (  # noqa: F401
    AnnotatedText,
    Dataset,
    Error,
    InfeasibleError,
    IoError,
    KdaoConfig,
    Sample,
    __version__,
    build_kdao_dataset,
    build_learning_curve,
    curate_adversarial,
    curate_affable,
    dataset_stats,
    enumerate_pair_samples,
    full_report,
    h_adversarial_rate,
    h_affable_rate,
    insert_markers,
    kdao_label,
    levenshtein,
    load_dataset,
    make_adversarial_negative,
    make_adversarial_positive,
    make_affable,
    shuffle_marker_adversarial,
    standard_error,
    tokenize,
    wer,
    within_threshold,
    write_dataset,
)
