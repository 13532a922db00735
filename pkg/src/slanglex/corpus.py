"""Lexicon data model, ingestion, vote filtering, and train/test splitting.

Two on-disk formats are understood:

  * slang lexicons as JSON lines, one entry object per line with fields
    ``headword``, ``definitions``, ``examples``, ``upvotes``, ``downvotes``
    and optional ``subjects`` / ``year_added`` (see SCHEMA.md);
  * standard-English lexicons as TSV, ``word<TAB>definition`` with one
    line per definition (a bare word line is accepted as a definition-less
    entry).

All loaded values are immutable and safe to share between parallel
analysis passes.
"""

from __future__ import annotations

import enum
import json
import math
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

from .errors import AnalysisError, SchemaError
from .labels import SlangClass, SubjectLabel


class LexiconFormat(enum.Enum):
    SLANG_JSONL = "slang-jsonl"
    STANDARD_TSV = "standard-tsv"


@dataclass(frozen=True)
class LexiconEntry:
    """One slang headword with its definitions, usage examples and votes.

    Headwords keep their original case and punctuation (alphabetism cues
    depend on periods and capitals); use :attr:`key` for case-insensitive
    joins.
    """

    headword: str
    definitions: tuple[str, ...] = ()
    examples: tuple[str, ...] = ()
    upvotes: int = 0
    downvotes: int = 0
    subjects: frozenset[SubjectLabel] | None = None
    year_added: int | None = None

    def __post_init__(self):
        if not self.headword.strip():
            raise SchemaError("headword is empty", field="headword")
        if self.upvotes < 0:
            raise SchemaError(f"negative upvotes: {self.upvotes}", field="upvotes")
        if self.downvotes < 0:
            raise SchemaError(f"negative downvotes: {self.downvotes}", field="downvotes")
        for example in self.examples:
            if not example:
                raise SchemaError("empty example string", field="examples")

    @property
    def key(self) -> str:
        """Lowercase-folded headword used for joins across lexicons."""
        return self.headword.casefold()

    @property
    def total_votes(self) -> int:
        return self.upvotes + self.downvotes


@dataclass(frozen=True)
class StandardLexicon:
    """Reference lexicon of standard-English words and their definitions."""

    words: frozenset[str]
    definitions: dict[str, tuple[str, ...]] = field(default_factory=dict)

    def __post_init__(self):
        stray = set(self.definitions) - set(self.words)
        if stray:
            raise SchemaError(
                f"definitions for words missing from the word set: {sorted(stray)[:5]}")

    def __contains__(self, word: str) -> bool:
        return word in self.words

    def __len__(self) -> int:
        return len(self.words)


@dataclass(frozen=True)
class GoldClassRecord:
    """A manually labeled word for the slang-class detector.

    ``components`` carries the source word(s) for blends and clippings
    when known.
    """

    word: str
    label: SlangClass
    components: tuple[str, ...] | None = None


@dataclass(frozen=True)
class DatasetSplit:
    train: tuple
    test: tuple
    seed: int


def _entry_from_json(obj: dict) -> LexiconEntry:
    if not isinstance(obj, dict):
        raise SchemaError("expected a JSON object", field=None)
    if "headword" not in obj:
        raise SchemaError("missing required field", field="headword")
    subjects = obj.get("subjects")
    if subjects is not None:
        subjects = frozenset(SubjectLabel.parse(s) for s in subjects)
    for votes_field in ("upvotes", "downvotes"):
        value = obj.get(votes_field, 0)
        if not isinstance(value, int):
            raise SchemaError(f"{votes_field} must be an integer", field=votes_field)
    return LexiconEntry(
        headword=obj["headword"],
        definitions=tuple(obj.get("definitions", ())),
        examples=tuple(obj.get("examples", ())),
        upvotes=obj.get("upvotes", 0),
        downvotes=obj.get("downvotes", 0),
        subjects=subjects,
        year_added=obj.get("year_added"),
    )


def entry_to_dict(entry: LexiconEntry) -> dict:
    """Stable JSON-serializable form of an entry (inverse of ingestion)."""
    obj = {
        "headword": entry.headword,
        "definitions": list(entry.definitions),
        "examples": list(entry.examples),
        "upvotes": entry.upvotes,
        "downvotes": entry.downvotes,
    }
    if entry.subjects is not None:
        obj["subjects"] = sorted(s.value for s in entry.subjects)
    if entry.year_added is not None:
        obj["year_added"] = entry.year_added
    return obj


def load_slang_lexicon(path) -> list[LexiconEntry]:
    """Read a JSON-lines slang lexicon; blank lines are ignored."""
    entries = []
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, 1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"invalid JSON: {exc.msg}", line=lineno) from exc
            try:
                entries.append(_entry_from_json(obj))
            except SchemaError as exc:
                raise SchemaError(str(exc), line=lineno, field=exc.field) from exc
    return entries


def load_standard_lexicon(path) -> StandardLexicon:
    """Read a TSV standard lexicon (word<TAB>definition, one per line)."""
    words = set()
    definitions: dict[str, list[str]] = {}
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, 1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            word = parts[0].strip()
            if not word:
                raise SchemaError("empty word", line=lineno, field="word")
            if len(parts) > 2:
                raise SchemaError(
                    f"expected word<TAB>definition, got {len(parts)} fields",
                    line=lineno)
            words.add(word)
            if len(parts) == 2 and parts[1]:
                definitions.setdefault(word, []).append(parts[1])
    return StandardLexicon(
        words=frozenset(words),
        definitions={w: tuple(defs) for w, defs in definitions.items()},
    )


def load_lexicon(path, format: LexiconFormat):
    """Dispatching loader; returns entries or a StandardLexicon per format."""
    if format is LexiconFormat.SLANG_JSONL:
        return load_slang_lexicon(path)
    if format is LexiconFormat.STANDARD_TSV:
        return load_standard_lexicon(path)
    raise AnalysisError(f"unsupported lexicon format: {format!r}")


def save_slang_lexicon(entries: Iterable[LexiconEntry], path) -> None:
    """Write entries as JSON lines; load_slang_lexicon inverts this exactly."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as handle:
        for entry in entries:
            handle.write(json.dumps(entry_to_dict(entry), ensure_ascii=False,
                                    sort_keys=True))
            handle.write("\n")


def load_gold_classes(path) -> list[GoldClassRecord]:
    """Read gold class records from CSV: word,label[,component;component...]."""
    records = []
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, 1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split(",")
            if len(parts) < 2:
                raise SchemaError("expected word,label", line=lineno)
            word = parts[0].strip()
            if not word:
                raise SchemaError("empty word", line=lineno, field="word")
            try:
                label = SlangClass.parse(parts[1])
            except SchemaError as exc:
                raise SchemaError(str(exc), line=lineno, field="label") from exc
            components = None
            if len(parts) >= 3 and parts[2].strip():
                components = tuple(c.strip() for c in parts[2].split(";") if c.strip())
            records.append(GoldClassRecord(word, label, components))
    return records


def filter_by_votes(entries: Sequence[LexiconEntry],
                    min_votes: int = 100) -> list[LexiconEntry]:
    """Keep entries whose total vote count reaches the threshold.

    Rare words and short-lived trends carry few votes; the default cutoff
    of 100 total votes (inclusive) weeds them out. Order is preserved and
    the operation is idempotent.
    """
    if min_votes < 0:
        raise AnalysisError(f"min_votes must be non-negative, got {min_votes}")
    return [e for e in entries if e.total_votes >= min_votes]


def stratified_split(records: Sequence, label_of: Callable,
                     test_fraction: float, seed: int) -> tuple[tuple, tuple]:
    """Per-class train/test split over arbitrary records.

    Each class contributes round(class_size * test_fraction) test records
    (round half up, minimum 1). Deterministic for a fixed seed; input order
    is preserved within each side.
    """
    if not 0.0 < test_fraction < 1.0:
        raise AnalysisError(f"test_fraction must be in (0, 1), got {test_fraction}")
    by_class: dict = {}
    for i, record in enumerate(records):
        by_class.setdefault(label_of(record), []).append(i)
    rng = random.Random(seed)
    test_idx = set()
    for label in sorted(by_class, key=str):
        indices = by_class[label]
        if len(indices) < 2:
            raise AnalysisError(
                f"class {label} has {len(indices)} record(s); need at least 2 to split")
        n_test = max(1, math.floor(len(indices) * test_fraction + 0.5))
        shuffled = indices[:]
        rng.shuffle(shuffled)
        test_idx.update(shuffled[:n_test])
    train = tuple(r for i, r in enumerate(records) if i not in test_idx)
    test = tuple(r for i, r in enumerate(records) if i in test_idx)
    return train, test


def split_gold(records: Sequence[GoldClassRecord], test_fraction: float = 0.10,
               seed: int = 0) -> DatasetSplit:
    """Stratified train/test split of gold class records."""
    train, test = stratified_split(records, lambda r: r.label,
                                   test_fraction, seed)
    return DatasetSplit(train=train, test=test, seed=seed)
