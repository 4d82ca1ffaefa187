"""Tokenization, query parsing, term fusion and weighted matching."""

from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from segscore import Query, fuse_terms, match_score, tokenize

token_lists = st.lists(
    st.text(alphabet="abcdefghijklmnopqrstuvwxyz0123456789", min_size=1, max_size=8),
    max_size=20,
)
weight_maps = st.dictionaries(
    st.sampled_from(["web", "search", "semantic", "ranking", "python", "zz"]),
    st.floats(min_value=0.0, max_value=1.0, allow_nan=False),
    max_size=6,
)


class TestTokenize:
    def test_splits_on_punctuation_and_case_folds(self):
        assert tokenize("Hello, World! it's FINE") == [
            "hello", "world", "it", "s", "fine"]

    def test_underscore_separates(self):
        assert tokenize("under_score") == ["under", "score"]

    def test_digits_and_mixed_runs_survive(self):
        assert tokenize("don't 3GHz x86") == ["don", "t", "3ghz", "x86"]

    def test_unicode_words_kept_whole(self):
        assert tokenize("naïve façade 日本語 text") == ["naïve", "façade", "日本語", "text"]

    def test_empty_and_symbol_only_input(self):
        assert tokenize("") == []
        assert tokenize("___ --- !!! \t\r\n") == []

    def test_whitespace_variants_separate(self):
        assert tokenize("a\tb\r\nc  d") == ["a", "b", "c", "d"]


class TestQuery:
    def test_parse_keeps_raw_and_tokenizes(self):
        q = Query.parse("Web  SEARCH engines")
        assert q.raw == "Web  SEARCH engines"
        assert q.terms == ("web", "search", "engines")

    def test_parse_preserves_duplicate_terms(self):
        assert Query.parse("web web site").terms == ("web", "web", "site")

    def test_empty_query_has_no_terms(self):
        assert Query.parse("  !! ").terms == ()


class TestFuseTerms:
    def test_distinct_query_terms_add_one(self):
        fused = fuse_terms(Query.parse("web search engines web"),
                           {"web": 0.4, "semantic": 0.8})
        assert fused == {"web": 1.4, "search": 1.0, "engines": 1.0, "semantic": 0.8}

    def test_repeating_a_query_term_does_not_stack(self):
        fused = fuse_terms(Query.parse("web web web"), {})
        assert fused == {"web": 1.0}

    def test_inputs_are_not_mutated(self):
        prof = {"web": 0.4}
        q = Query.parse("web")
        fuse_terms(q, prof)
        assert prof == {"web": 0.4}
        assert q.terms == ("web",)

    def test_empty_query_copies_profile(self):
        prof = {"semantic": 0.8}
        fused = fuse_terms(Query.parse(""), prof)
        assert fused == prof
        assert fused is not prof


class TestMatchScore:
    def test_occurrences_count_multiply(self):
        assert match_score(["web", "web", "search", "zzz"],
                           {"web": 1.0, "search": 0.5}) == pytest.approx(2.5)

    def test_empty_inputs_score_zero(self):
        assert match_score([], {"web": 1.0}) == 0.0
        assert match_score(["web"], {}) == 0.0


class TestTermProperties:
    @given(st.text())
    def test_tokenize_is_idempotent(self, text: str):
        """Re-tokenizing the joined tokens changes nothing."""
        tokens = tokenize(text)
        assert tokenize(" ".join(tokens)) == tokens

    @given(st.text())
    def test_tokens_are_lowercase_and_non_empty(self, text: str):
        for tok in tokenize(text):
            assert tok
            assert tok == tok.lower()

    @given(token_lists, token_lists, weight_maps)
    def test_match_score_adds_over_concatenation(self, a, b, weights):
        assert match_score(a + b, weights) == pytest.approx(
            match_score(a, weights) + match_score(b, weights))

    @given(token_lists, weight_maps)
    def test_match_score_scales_with_weights(self, tv, weights):
        doubled = {term: 2.0 * w for term, w in weights.items()}
        assert match_score(tv, doubled) == pytest.approx(2.0 * match_score(tv, weights))

    @given(st.text(alphabet="abcdefghij ", max_size=40), weight_maps)
    def test_fused_weights_stay_within_bounds(self, raw, profile_terms):
        """With profile weights in [0, 1], no fused weight can exceed 2.0."""
        fused = fuse_terms(Query.parse(raw), profile_terms)
        for term in set(tokenize(raw)):
            assert fused[term] >= 1.0
        for term, weight in fused.items():
            assert 0.0 <= weight <= 2.0
