"""Character/morpheme n-gram extraction and vocabulary fitting."""
import numpy as np
import pytest

from slanglex.errors import AnalysisError
from slanglex.morphology import Segmentation
from slanglex.slangclass.features import (
    NgramKind,
    extract_char_ngrams,
    extract_morpheme_ngrams,
    fit_vocabulary,
    vectorize,
)


class TestCharNgrams:
    def test_ab_full_enumeration(self):
        assert extract_char_ngrams("ab", 1, 2) == {"a": 1, "b": 1, "ab": 1}

    def test_boo_with_multiplicity(self):
        assert extract_char_ngrams("boo", 1, 2) == {
            "b": 1, "o": 2, "bo": 1, "oo": 1}

    def test_periods_and_case_survive(self):
        grams = extract_char_ngrams("A.B", 1, 3)
        assert grams["."] == 1
        assert grams["A.B"] == 1
        assert "a" not in grams

    def test_window_longer_than_word(self):
        assert extract_char_ngrams("ab", 1, 5) == {"a": 1, "b": 1, "ab": 1}

    def test_count_identity(self):
        # a word of length L has L - n + 1 n-gram tokens
        word = "abcdefg"
        for n in range(1, 4):
            grams = extract_char_ngrams(word, n, n)
            assert sum(grams.values()) == len(word) - n + 1

    def test_validation(self):
        with pytest.raises(AnalysisError):
            extract_char_ngrams("")
        with pytest.raises(AnalysisError):
            extract_char_ngrams("ab", 2, 1)
        with pytest.raises(AnalysisError):
            extract_char_ngrams("ab", 0, 1)


class TestMorphemeNgrams:
    def test_two_morph_enumeration(self):
        seg = Segmentation("dogcat", ("dog", "cat"))
        assert extract_morpheme_ngrams(seg, 1, 2) == {
            "dog": 1, "cat": 1, "dog+cat": 1}

    def test_three_morph_gram_counts(self):
        seg = Segmentation("abc", ("a", "b", "c"))
        grams = extract_morpheme_ngrams(seg, 1, 3)
        # 3 unigrams, 2 bigrams, 1 trigram
        by_order = {1: 0, 2: 0, 3: 0}
        for gram, count in grams.items():
            by_order[gram.count("+") + 1] += count
        assert by_order == {1: 3, 2: 2, 3: 1}

    def test_single_morph(self):
        seg = Segmentation("dog", ("dog",))
        assert extract_morpheme_ngrams(seg, 1, 5) == {"dog": 1}


class TestVocabulary:
    def test_cap_keeps_most_frequent(self):
        maps = [{"aa": 5, "bb": 1}, {"aa": 2, "cc": 3}]
        vocab = fit_vocabulary(maps, NgramKind.CHAR, cap=2)
        assert vocab.features == ("aa", "cc")

    def test_tie_breaks_lexicographically(self):
        maps = [{"zz": 2, "aa": 2, "mm": 2}]
        vocab = fit_vocabulary(maps, NgramKind.CHAR, cap=2)
        assert vocab.features == ("aa", "mm")

    def test_cap_larger_than_inventory(self):
        vocab = fit_vocabulary([{"a": 1}], NgramKind.CHAR, cap=50)
        assert vocab.features == ("a",)

    def test_validation(self):
        with pytest.raises(AnalysisError):
            fit_vocabulary([{"a": 1}], NgramKind.CHAR, cap=0)
        with pytest.raises(AnalysisError):
            fit_vocabulary([], NgramKind.CHAR)


class TestVectorize:
    def test_counts_land_in_columns(self):
        vocab = fit_vocabulary([{"a": 3, "b": 1}], NgramKind.CHAR, cap=10)
        x = vectorize(vocab, {"a": 2, "b": 7})
        assert x[vocab.index["a"]] == 2.0
        assert x[vocab.index["b"]] == 7.0

    def test_unknown_features_ignored(self):
        vocab = fit_vocabulary([{"a": 1}], NgramKind.CHAR, cap=10)
        x = vectorize(vocab, {"zzz": 40})
        assert np.array_equal(x, np.zeros(1))

    def test_dtype_and_shape(self):
        vocab = fit_vocabulary([{"a": 1, "b": 1, "c": 1}], NgramKind.CHAR, cap=3)
        x = vectorize(vocab, {"b": 1})
        assert x.dtype == np.float64
        assert x.shape == (3,)
