"""Subject classification over 10 categories and embedding bias metrics.

Covers the KNN subject model (k=5 over cosine similarity), the gender
direction and DirectBias measures, mean-cosine sexual-prejudice scoring
with a permutation test over name groups, and the standardized
religion-by-prejudice matrix. All operations are pure given immutable
embeddings and lexicons.
"""

from __future__ import annotations

import csv
import enum
import itertools
import math
import random
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .embeddings import EmbeddingTable, cosine
from .errors import AnalysisError, SchemaError
from .labels import SubjectLabel
from .slangclass.openset import argmax_label
from .stats import ConfusionMatrix, confusion_and_report, weighted_f1


def subject_token(word: str) -> str:
    """Corpus token for a headword: lowercased, spaces joined with '_'."""
    return "_".join(word.strip().lower().split())


class KnnMetric(enum.Enum):
    COSINE = "cosine"
    EUCLIDEAN = "euclidean"


@dataclass(frozen=True)
class KnnModel:
    k: int
    reference: tuple[tuple[str, np.ndarray, SubjectLabel], ...]
    metric: KnnMetric = KnnMetric.COSINE

    def __post_init__(self):
        if self.k < 1:
            raise AnalysisError(f"k must be at least 1, got {self.k}")
        if not self.reference:
            raise AnalysisError("KNN model needs at least one reference point")

    @property
    def labels(self) -> tuple[SubjectLabel, ...]:
        return tuple(sorted({lab for _, _, lab in self.reference}, key=str))


def knn_from_embedding(embedding: EmbeddingTable,
                       labeled: Sequence[tuple[str, SubjectLabel]],
                       k: int = 5,
                       metric: KnnMetric = KnnMetric.COSINE
                       ) -> tuple[KnnModel, int]:
    """Build the reference set from labeled words; returns (model, skipped)
    where skipped counts words missing from the embedding vocabulary."""
    reference = []
    skipped = 0
    for word, label in labeled:
        token = subject_token(word)
        if token in embedding:
            reference.append((token, embedding.vector(token), label))
        else:
            skipped += 1
    if not reference:
        raise AnalysisError("no labeled word is in the embedding vocabulary")
    return KnnModel(k=k, reference=tuple(reference), metric=metric), skipped


def knn_predict_proba(model: KnnModel,
                      vector: np.ndarray) -> dict[SubjectLabel, float]:
    """Vote fractions of the k nearest reference points.

    Similarity ties are broken lexicographically by reference token. The
    returned distribution has a key for every label in the reference set.
    """
    dim = model.reference[0][1].shape[0]
    if vector.shape != (dim,):
        raise AnalysisError(
            f"vector dimension {vector.shape} does not match reference {dim}")
    scored = []
    for token, ref, label in model.reference:
        if model.metric is KnnMetric.COSINE:
            key = (-cosine(vector, ref), token)
        else:
            key = (float(np.linalg.norm(vector - ref)), token)
        scored.append((key, label))
    scored.sort(key=lambda item: item[0])
    chosen = scored[:min(model.k, len(scored))]
    votes: dict[SubjectLabel, int] = {}
    for _, label in chosen:
        votes[label] = votes.get(label, 0) + 1
    return {label: votes.get(label, 0) / len(chosen)
            for label in model.labels}


@dataclass(frozen=True)
class SubjectEvaluation:
    f1: float
    confusion: ConfusionMatrix
    per_class: dict
    excluded: int  # test words absent from the embedding vocabulary


def evaluate_subject_model(model: KnnModel,
                           test: Sequence[tuple[str, SubjectLabel]],
                           embedding: EmbeddingTable) -> SubjectEvaluation:
    """Closed-set weighted F1 and confusion matrix on labeled test words."""
    truth: list[SubjectLabel] = []
    preds: list[SubjectLabel] = []
    excluded = 0
    for word, label in test:
        token = subject_token(word)
        if token not in embedding:
            excluded += 1
            continue
        dist = knn_predict_proba(model, embedding.vector(token))
        truth.append(label)
        preds.append(argmax_label(dist))
    if not truth:
        raise AnalysisError("no test word is in the embedding vocabulary")
    labels = sorted(set(truth) | set(preds), key=str)
    confusion, per_class = confusion_and_report(truth, preds, labels)
    return SubjectEvaluation(f1=weighted_f1(truth, preds),
                             confusion=confusion, per_class=per_class,
                             excluded=excluded)


class Gender(enum.Enum):
    MALE = "male"
    FEMALE = "female"
    UNKNOWN = "unknown"


class GenderLexicon:
    """Case-insensitive name -> gender lookup, total with Unknown default."""

    def __init__(self, assignments: Mapping[str, Gender]):
        self._table = {name.casefold(): g for name, g in assignments.items()}

    def lookup(self, name: str) -> Gender:
        return self._table.get(name.casefold(), Gender.UNKNOWN)

    def __len__(self) -> int:
        return len(self._table)

    @classmethod
    def from_csv(cls, path) -> "GenderLexicon":
        assignments = {}
        with open(path, encoding="utf-8") as handle:
            for lineno, row in enumerate(csv.reader(handle), 1):
                if not row or row[0].lstrip().startswith("#"):
                    continue
                if len(row) != 2:
                    raise SchemaError("expected name,gender", line=lineno)
                name, raw = row[0].strip(), row[1].strip().lower()
                try:
                    assignments[name] = Gender(raw)
                except ValueError:
                    raise SchemaError(f"unknown gender {row[1]!r}",
                                      line=lineno, field="gender") from None
        return cls(assignments)


@dataclass(frozen=True)
class BiasLexicons:
    """Term lists driving the bias analyses.

    trait_terms is the religion-axis prejudice list (terrorist, evil, ...);
    prejudice_terms is the sexual-prejudice list L.
    """

    prejudice_terms: tuple[str, ...]
    religious_terms: tuple[str, ...]
    trait_terms: tuple[str, ...]
    occupations: tuple[str, ...]
    gender_pairs: tuple[tuple[str, str], ...]  # (male, female)

    def __post_init__(self):
        for name in ("prejudice_terms", "religious_terms", "trait_terms",
                     "occupations", "gender_pairs"):
            values = getattr(self, name)
            if not values:
                raise AnalysisError(f"bias lexicon {name} is empty")
            if len(set(values)) != len(values):
                raise AnalysisError(f"bias lexicon {name} has duplicates")


def _read_terms(path: Path) -> tuple[str, ...]:
    terms = []
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            terms.append(line.lower())
    return tuple(terms)


def load_bias_lexicons(directory) -> BiasLexicons:
    """Load the five plain-text lexicon files from a directory."""
    directory = Path(directory)
    pairs = []
    pair_path = directory / "gender_pairs.txt"
    for lineno, line in enumerate(
            pair_path.read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip().lower() for p in re.split(r"[,\t]", line)]
        if len(parts) != 2 or not all(parts):
            raise SchemaError("expected male,female", line=lineno)
        pairs.append((parts[0], parts[1]))
    return BiasLexicons(
        prejudice_terms=_read_terms(directory / "prejudice_terms.txt"),
        religious_terms=_read_terms(directory / "religious_terms.txt"),
        trait_terms=_read_terms(directory / "trait_terms.txt"),
        occupations=_read_terms(directory / "occupations.txt"),
        gender_pairs=tuple(pairs),
    )


def gender_direction(embedding: EmbeddingTable,
                     pairs: Sequence[tuple[str, str]]) -> np.ndarray:
    """Unit vector from male toward female word use.

    Mean over pairs of the normalized (female - male) difference vectors,
    renormalized. Every pair word must be in the vocabulary; callers that
    want to tolerate gaps should filter pairs first.
    """
    if not pairs:
        raise AnalysisError("no gender pairs supplied")
    diffs = []
    for male, female in pairs:
        diff = embedding.vector(female) - embedding.vector(male)
        norm = float(np.linalg.norm(diff))
        if norm == 0.0:
            raise AnalysisError(
                f"pair ({male!r}, {female!r}) has identical vectors")
        diffs.append(diff / norm)
    mean = np.mean(diffs, axis=0)
    norm = float(np.linalg.norm(mean))
    if norm == 0.0:
        raise AnalysisError("gender pair differences cancel out")
    return mean / norm


def direct_bias(embedding: EmbeddingTable, neutral_words: Sequence[str],
                g: np.ndarray, c: float = 1.0) -> float:
    """Mean |cosine(w, g)|^c over the words present in the vocabulary."""
    scores = []
    for word in neutral_words:
        token = subject_token(word)
        if token in embedding:
            scores.append(abs(cosine(embedding.vector(token), g)) ** c)
    if not scores:
        raise AnalysisError("no neutral word is in the embedding vocabulary")
    return float(np.mean(scores))


def occupation_projections(embedding: EmbeddingTable,
                           occupations: Sequence[str],
                           g: np.ndarray) -> list[tuple[str, float]]:
    """Signed cosine of each occupation onto g, most-female first."""
    projections = []
    for word in occupations:
        token = subject_token(word)
        if token in embedding:
            projections.append((word, cosine(embedding.vector(token), g)))
    projections.sort(key=lambda item: (-item[1], item[0]))
    return projections


def sexprej(embedding: EmbeddingTable, word: str,
            prejudice_terms: Sequence[str]) -> float:
    """Mean cosine similarity of a word to the prejudice-term list.

    Terms missing from the vocabulary are excluded from the mean; the word
    itself must be present.
    """
    vec = embedding.vector(subject_token(word))
    cosines = [cosine(vec, embedding.vector(term))
               for term in prejudice_terms if term in embedding]
    if not cosines:
        raise AnalysisError("no prejudice term is in the embedding vocabulary")
    return float(np.mean(cosines))


def permutation_test_means(group_a: Sequence[float], group_b: Sequence[float],
                           n_permutations: int = 10_000,
                           seed: int = 0) -> tuple[float, bool]:
    """Two-sided permutation test on the difference of group means.

    Enumerates all label assignments when there are at most n_permutations
    of them (p = fraction with |diff| >= |observed|); otherwise samples
    n_permutations shuffles with the add-one Monte Carlo estimator.
    Returns (p_value, exhaustive).
    """
    if len(group_a) < 2 or len(group_b) < 2:
        raise AnalysisError("each group needs at least 2 values")
    pooled = list(group_a) + list(group_b)
    n_a = len(group_a)
    observed = abs(float(np.mean(group_a)) - float(np.mean(group_b)))
    tol = 1e-12

    if math.comb(len(pooled), n_a) <= n_permutations:
        hits = 0
        total = 0
        for picks in itertools.combinations(range(len(pooled)), n_a):
            chosen = set(picks)
            mean_a = sum(pooled[i] for i in chosen) / n_a
            mean_b = (sum(pooled) - mean_a * n_a) / (len(pooled) - n_a)
            if abs(mean_a - mean_b) >= observed - tol:
                hits += 1
            total += 1
        return hits / total, True

    rng = random.Random(seed)
    hits = 0
    for _ in range(n_permutations):
        rng.shuffle(pooled)
        mean_a = sum(pooled[:n_a]) / n_a
        mean_b = sum(pooled[n_a:]) / (len(pooled) - n_a)
        if abs(mean_a - mean_b) >= observed - tol:
            hits += 1
    return (1 + hits) / (1 + n_permutations), False


@dataclass(frozen=True)
class NameBiasReport:
    female_mean: float
    female_n: int
    male_mean: float
    male_n: int
    difference: float  # female - male
    p_value: float
    exhaustive: bool
    n_permutations: int
    excluded_unknown: int
    excluded_oov: int

    @property
    def group_means(self) -> dict[Gender, tuple[float, int]]:
        return {Gender.FEMALE: (self.female_mean, self.female_n),
                Gender.MALE: (self.male_mean, self.male_n)}


def name_prejudice_comparison(embedding: EmbeddingTable,
                              names: Sequence[str], genders: GenderLexicon,
                              prejudice_terms: Sequence[str],
                              n_permutations: int = 10_000,
                              seed: int = 0) -> NameBiasReport:
    """Mean SEXPREJ by name gender plus permutation-test significance."""
    scores: dict[Gender, list[float]] = {Gender.MALE: [], Gender.FEMALE: []}
    excluded_unknown = 0
    excluded_oov = 0
    for name in names:
        gender = genders.lookup(name)
        if gender is Gender.UNKNOWN:
            excluded_unknown += 1
            continue
        token = subject_token(name)
        if token not in embedding:
            excluded_oov += 1
            continue
        scores[gender].append(sexprej(embedding, name, prejudice_terms))
    for gender, values in scores.items():
        if len(values) < 2:
            raise AnalysisError(
                f"need at least 2 usable {gender.value} names, "
                f"got {len(values)}")
    female = scores[Gender.FEMALE]
    male = scores[Gender.MALE]
    p_value, exhaustive = permutation_test_means(
        female, male, n_permutations=n_permutations, seed=seed)
    return NameBiasReport(
        female_mean=float(np.mean(female)), female_n=len(female),
        male_mean=float(np.mean(male)), male_n=len(male),
        difference=float(np.mean(female)) - float(np.mean(male)),
        p_value=p_value, exhaustive=exhaustive,
        n_permutations=n_permutations,
        excluded_unknown=excluded_unknown, excluded_oov=excluded_oov)


@dataclass(frozen=True)
class ReligiousBiasReport:
    religions: tuple[str, ...]
    prejudices: tuple[str, ...]
    raw: np.ndarray           # religions x prejudices cosine matrix
    standardized: np.ndarray  # per-prejudice column: mean 0, sample std 1
    overall_mean_raw: float
    missing_religions: tuple[str, ...]
    missing_prejudices: tuple[str, ...]


def religious_prejudice_matrix(embedding: EmbeddingTable,
                               religions: Sequence[str],
                               prejudices: Sequence[str]
                               ) -> ReligiousBiasReport:
    """Cosine of each religion to each prejudice trait, column-standardized.

    Standardization uses the sample (n-1) standard deviation over religions
    for each prejudice column; the overall mean is taken on raw scores.
    """
    present_r = [r for r in religions if r in embedding]
    missing_r = tuple(r for r in religions if r not in embedding)
    present_p = [p for p in prejudices if p in embedding]
    missing_p = tuple(p for p in prejudices if p not in embedding)
    if len(present_r) < 2:
        raise AnalysisError(
            f"standardization needs >= 2 religions in vocabulary, "
            f"got {len(present_r)}")
    if not present_p:
        raise AnalysisError("no prejudice term is in the embedding vocabulary")

    raw = np.array([[cosine(embedding.vector(r), embedding.vector(p))
                     for p in present_p] for r in present_r])
    stds = raw.std(axis=0, ddof=1)
    zero_cols = [present_p[j] for j in range(len(present_p)) if stds[j] == 0.0]
    if zero_cols:
        raise AnalysisError(
            f"zero variance for prejudice column(s): {', '.join(zero_cols)}")
    standardized = (raw - raw.mean(axis=0)) / stds
    return ReligiousBiasReport(
        religions=tuple(present_r), prejudices=tuple(present_p),
        raw=raw, standardized=standardized,
        overall_mean_raw=float(raw.mean()),
        missing_religions=missing_r, missing_prejudices=missing_p)
