"""Supervised maximum-entropy sense classifiers."""

from .corpus import (AnnotatedToken, CorpusError, TrainingExample, group_by_word, read_corpus,
                     write_corpus)
from .features import FeatureSelection, SelectionError, extract_features, parse_selection
from .model import (Classifier, Prediction, TrainingError, classify, dump, dumps, fit, load,
                    loads, train)
from .selection import (PER_POS, PER_WORD, SYSTEM_PRIORITY, CrossValidationError, CVResult,
                        cross_validate, select_best, stratified_folds, vote_me)

__all__ = [
    "AnnotatedToken", "CorpusError", "TrainingExample", "group_by_word", "read_corpus",
    "write_corpus", "FeatureSelection", "SelectionError", "extract_features", "parse_selection",
    "Classifier", "Prediction", "TrainingError", "classify", "dump", "dumps", "fit", "load",
    "loads", "train", "PER_POS", "PER_WORD", "SYSTEM_PRIORITY", "CrossValidationError",
    "CVResult", "cross_validate", "select_best", "stratified_folds", "vote_me",
]
