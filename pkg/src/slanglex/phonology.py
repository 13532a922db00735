"""Grapheme-to-phoneme conversion and phoneme/manner statistics.

Conversion is two-stage: exact lookup in an ARPAbet pronouncing table
(CMU dictionary file format), falling back to a deterministic
longest-match letter-cluster rule table for out-of-vocabulary words.
Each emitted sequence records which path produced it so downstream
reports can quantify fallback usage.

Stress digits on vowel symbols (AH0, IY1, ...) are stripped on load, so
the whole module works over the plain 39-symbol inventory.
"""

from __future__ import annotations

import enum
import importlib.resources
import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import AnalysisError, SchemaError


class Manner(enum.Enum):
    STOP = "Stop"
    FRICATIVE = "Fricative"
    VOWEL = "Vowel"
    NASAL = "Nasal"
    LIQUID = "Liquid"
    AFFRICATE = "Affricate"
    ASPIRATE = "Aspirate"
    SEMIVOWEL = "Semivowel"

    def __str__(self):
        return self.value


_MANNER_GROUPS = {
    Manner.STOP: ("B", "D", "G", "K", "P", "T"),
    Manner.FRICATIVE: ("DH", "F", "S", "SH", "TH", "V", "Z", "ZH"),
    Manner.VOWEL: ("AA", "AE", "AH", "AO", "AW", "AY", "EH", "ER",
                   "EY", "IH", "IY", "OW", "OY", "UH", "UW"),
    Manner.NASAL: ("M", "N", "NG"),
    Manner.LIQUID: ("L", "R"),
    Manner.AFFRICATE: ("CH", "JH"),
    Manner.ASPIRATE: ("HH",),
    Manner.SEMIVOWEL: ("W", "Y"),
}

MANNER_BY_SYMBOL: dict[str, Manner] = {
    symbol: manner for manner, symbols in _MANNER_GROUPS.items() for symbol in symbols
}

ARPABET_INVENTORY = frozenset(MANNER_BY_SYMBOL)


def strip_stress(symbol: str) -> str:
    return symbol.rstrip("012")


def manner_of(symbol: str) -> Manner:
    """Articulation manner of an ARPAbet symbol (stress digits tolerated)."""
    canonical = strip_stress(symbol.upper())
    try:
        return MANNER_BY_SYMBOL[canonical]
    except KeyError:
        raise AnalysisError(f"unknown ARPAbet symbol: {symbol!r}") from None


@dataclass(frozen=True)
class Phoneme:
    symbol: str
    manner: Manner


def phoneme(symbol: str) -> Phoneme:
    """Build a Phoneme, validating the symbol against the inventory."""
    canonical = strip_stress(symbol.upper())
    return Phoneme(canonical, manner_of(canonical))


class ConversionSource(enum.Enum):
    LEXICON_LOOKUP = "lookup"
    RULE_FALLBACK = "fallback"


@dataclass(frozen=True)
class PhonemeSequence:
    word: str
    phonemes: tuple[Phoneme, ...]
    source: ConversionSource

    def symbols(self) -> tuple[str, ...]:
        return tuple(p.symbol for p in self.phonemes)


class PronouncingTable:
    """ARPAbet pronunciations keyed by uppercase word.

    File format is the CMU dictionary one: ``WORD  PH1 PH2 ...`` per line,
    ``;;;`` comment lines ignored, ``WORD(2)``-style alternative
    pronunciations skipped (the first listed pronunciation wins).
    """

    def __init__(self, entries: Mapping[str, Sequence[str]]):
        self._entries = {
            word.upper(): tuple(phoneme(s) for s in symbols)
            for word, symbols in entries.items()
        }

    def __len__(self):
        return len(self._entries)

    def __contains__(self, word: str) -> bool:
        return word.upper() in self._entries

    def lookup(self, word: str) -> tuple[Phoneme, ...] | None:
        return self._entries.get(word.upper())

    @classmethod
    def from_file(cls, path) -> "PronouncingTable":
        entries: dict[str, list[str]] = {}
        with open(path, encoding="utf-8") as handle:
            for lineno, line in enumerate(handle, 1):
                line = line.strip()
                if not line or line.startswith(";;;"):
                    continue
                parts = line.split()
                if len(parts) < 2:
                    raise SchemaError("expected WORD PH1 PH2 ...", line=lineno)
                word = parts[0]
                if re.fullmatch(r".+\(\d+\)", word):
                    continue
                if word.upper() not in entries:
                    entries[word.upper()] = parts[1:]
        return cls(entries)


class FallbackRules:
    """Deterministic letter-cluster to phoneme rules for OOV words.

    Applied greedily left to right, always consuming the longest cluster
    with a rule. The bundled table covers every single letter, so any
    alphabetic input converts.
    """

    def __init__(self, rules: Mapping[str, Sequence[str]]):
        self._rules = {cluster.lower(): tuple(symbols)
                       for cluster, symbols in rules.items()}
        if not self._rules:
            raise AnalysisError("fallback rule table is empty")
        self._max_len = max(len(c) for c in self._rules)

    def apply(self, word: str) -> tuple[Phoneme, ...]:
        letters = re.sub(r"[^a-z]", "", word.lower())
        result: list[Phoneme] = []
        i = 0
        while i < len(letters):
            for width in range(min(self._max_len, len(letters) - i), 0, -1):
                cluster = letters[i:i + width]
                if cluster in self._rules:
                    result.extend(phoneme(s) for s in self._rules[cluster])
                    i += width
                    break
            else:
                raise AnalysisError(
                    f"no fallback rule covers {letters[i]!r} in {word!r}")
        return tuple(result)

    @classmethod
    def from_file(cls, path) -> "FallbackRules":
        rules: dict[str, list[str]] = {}
        with open(path, encoding="utf-8") as handle:
            for lineno, line in enumerate(handle, 1):
                line = line.rstrip("\n")
                if not line.strip() or line.startswith("#"):
                    continue
                parts = line.split("\t")
                if len(parts) != 2:
                    raise SchemaError("expected cluster<TAB>phonemes", line=lineno)
                rules[parts[0].strip()] = parts[1].split()
        return cls(rules)


def _data_path(name: str):
    return importlib.resources.files("slanglex").joinpath("data", name)


def load_bundled_pronouncing_table() -> PronouncingTable:
    with importlib.resources.as_file(_data_path("pronouncing_table.txt")) as path:
        return PronouncingTable.from_file(path)


def load_bundled_fallback_rules() -> FallbackRules:
    with importlib.resources.as_file(_data_path("g2p_rules.tsv")) as path:
        return FallbackRules.from_file(path)


def to_phonemes(word: str, table: PronouncingTable,
                rules: FallbackRules) -> PhonemeSequence:
    """Convert a (possibly multiword) headword to its phoneme sequence.

    Multiword headwords are converted token by token and concatenated.
    The source flag is LEXICON_LOOKUP only when every token resolved via
    the table.
    """
    if not word or not word.strip():
        raise AnalysisError("cannot convert an empty word")
    phonemes: list[Phoneme] = []
    all_lookup = True
    converted_any = False
    for token in word.split():
        cleaned = re.sub(r"[^A-Za-z']", "", token).strip("'")
        if not re.search(r"[A-Za-z]", cleaned):
            continue
        converted_any = True
        found = table.lookup(cleaned)
        if found is not None:
            phonemes.extend(found)
        else:
            phonemes.extend(rules.apply(cleaned))
            all_lookup = False
    if not converted_any:
        raise AnalysisError(f"word contains no alphabetic characters: {word!r}")
    source = ConversionSource.LEXICON_LOOKUP if all_lookup else ConversionSource.RULE_FALLBACK
    return PhonemeSequence(word=word, phonemes=tuple(phonemes), source=source)


@dataclass(frozen=True)
class MannerDistribution:
    probabilities: dict[Manner, float]
    sample_size: int


@dataclass(frozen=True)
class OddsRatioEntry:
    symbol: str
    ratio: float
    rank: int


@dataclass(frozen=True)
class OddsRatioReport:
    entries: tuple[OddsRatioEntry, ...]
    smoothing: float

    def ratio(self, symbol: str) -> float:
        for entry in self.entries:
            if entry.symbol == symbol:
                return entry.ratio
        raise KeyError(symbol)


def phoneme_distribution(corpus: Iterable[PhonemeSequence]) -> dict[str, float]:
    """Relative frequency of each phoneme over all tokens in the corpus.

    One count per headword occurrence in the input (type counts when the
    caller passes one sequence per headword).
    """
    counts: dict[str, int] = {}
    total = 0
    for seq in corpus:
        for p in seq.phonemes:
            counts[p.symbol] = counts.get(p.symbol, 0) + 1
            total += 1
    if total == 0:
        raise AnalysisError("empty corpus: no phonemes to count")
    return {symbol: count / total for symbol, count in sorted(counts.items())}


def odds_ratio_ranking(p_slang: Mapping[str, float], p_std: Mapping[str, float],
                       smoothing: float = 1e-6) -> OddsRatioReport:
    """Rank phonemes by their slang-vs-standard odds ratio, descending.

    Additive smoothing keeps ratios finite when a phoneme is absent from
    one distribution. Ties break alphabetically.
    """
    inventory = sorted(set(p_slang) | set(p_std))
    scored = [
        (symbol, (p_slang.get(symbol, 0.0) + smoothing) / (p_std.get(symbol, 0.0) + smoothing))
        for symbol in inventory
    ]
    scored.sort(key=lambda item: (-item[1], item[0]))
    entries = tuple(OddsRatioEntry(symbol, ratio, rank)
                    for rank, (symbol, ratio) in enumerate(scored, 1))
    return OddsRatioReport(entries=entries, smoothing=smoothing)


class WordPosition(enum.Enum):
    FIRST = "first"
    FINAL = "final"


def positional_manner_distribution(corpus: Sequence[PhonemeSequence],
                                   position: WordPosition) -> MannerDistribution:
    """Distribution of articulation manners at a word edge.

    FIRST looks at the first phoneme of each word, FINAL at the last (for
    multiword headwords these come from the first and last token
    respectively, since conversion concatenates in order).
    """
    counts: dict[Manner, int] = {}
    n = 0
    for seq in corpus:
        if not seq.phonemes:
            continue
        p = seq.phonemes[0] if position is WordPosition.FIRST else seq.phonemes[-1]
        counts[p.manner] = counts.get(p.manner, 0) + 1
        n += 1
    if n == 0:
        raise AnalysisError("empty corpus: no words with phonemes")
    probabilities = {manner: counts.get(manner, 0) / n
                     for manner in Manner if manner in counts}
    return MannerDistribution(probabilities=probabilities, sample_size=n)
