"""Persuasion-technique detection: scoring, threshold calibration, label-union
ensembling and a hashed n-gram logistic-regression baseline.

Label mappings are dicts from ``(article_id, paragraph_id)`` to sets of
technique names.
"""

from ._core import (
    BaselineModel,
    ConfigError,
    Corpus,
    DataError,
    DivergenceError,
    PersuasionError,
    ProbabilityTable,
    TechniqueVocabulary,
    VocabularyMismatch,
    apply_threshold,
    calibrate_ensemble,
    calibrate_threshold,
    emit_submission,
    ensemble_union,
    extract_ngrams,
    f1_macro,
    f1_micro,
    fnv1a64,
    label_distribution,
    load_corpus,
    load_gold,
    load_model,
    load_probability_table,
    load_vocabulary,
    normalize_ws_punct,
    preprocess,
    read_label_file,
    replace_entities,
    run_cli,
    score,
    split_by_language,
    train,
)

__version__ = "0.1.0"
