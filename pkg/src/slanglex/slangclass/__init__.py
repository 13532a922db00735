"""Four-class slang-formation classifier with open-set rejection, plus
rule-based analyzers for clipping, reduplicative, and blend patterns."""

from .features import (
    NgramKind,
    FeatureVocabulary,
    extract_char_ngrams,
    extract_morpheme_ngrams,
    fit_vocabulary,
    vectorize,
)
from .logreg import (
    ClassifierModel,
    loss_and_gradient,
    train_logreg,
    predict_proba,
    save_classifier,
    load_classifier,
)
from .openset import (
    ScoreType,
    argmax_label,
    confidence_score,
    predict_with_reject,
    random_baseline,
    LabelSampler,
    cross_class_validate,
    CrossClassReport,
)
from .patterns import (
    ClippingType,
    ReduplicativeType,
    classify_clipping,
    classify_reduplicative,
    substitution_stats,
    SubstitutionStats,
    blend_suffix_stats,
)

__all__ = [
    "NgramKind",
    "FeatureVocabulary",
    "extract_char_ngrams",
    "extract_morpheme_ngrams",
    "fit_vocabulary",
    "vectorize",
    "ClassifierModel",
    "loss_and_gradient",
    "train_logreg",
    "predict_proba",
    "save_classifier",
    "load_classifier",
    "ScoreType",
    "argmax_label",
    "confidence_score",
    "predict_with_reject",
    "random_baseline",
    "LabelSampler",
    "cross_class_validate",
    "CrossClassReport",
    "ClippingType",
    "ReduplicativeType",
    "classify_clipping",
    "classify_reduplicative",
    "substitution_stats",
    "SubstitutionStats",
    "blend_suffix_stats",
]
