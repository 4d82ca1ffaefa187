"""Acceptance gate: one test per release criterion, each printing a PASS line.

Every test here checks an end-to-end guarantee of the package at a stated
tolerance: reference statistics, score additivity, agreement with the
independent brute-force scorer in oracle.py, partition completeness,
monotonicity, freshness semantics, replay determinism, and graceful
degradation under a dead annotation endpoint.
"""

from __future__ import annotations

import json
import random
import time
from collections import Counter

import pytest

from segscore import (
    DimensionCoefficients,
    Gazetteer,
    GazetteerProvider,
    Profile,
    Query,
    ScoreConfig,
    Segment,
    SessionStats,
    SnapshotStore,
    Vmwt,
    body_of,
    fuse_terms,
    parse_html,
    reference_table_checks,
    score_page,
    segment_page,
    structural_score,
    token_fingerprint,
    tokenize,
    visible_text,
)
from segscore.cli import EXIT_OK, main

from conftest import (
    CORPUS_DIR,
    GAZETTEER_PHRASES,
    PROFILE_TERMS,
    QUERY_RAW,
    REFERENCE_ROWS,
    TINY_DIR,
)
from genhtml import VOCAB, random_document
from oracle import brute_score_page

TOL = 1e-9


def reference_stats() -> list[SessionStats]:
    return [SessionStats(sid, msc, msss, mcas)
            for sid, msc, msss, mcas in REFERENCE_ROWS]


class TestC1ReferenceMeans:
    def test_means_match_at_tolerance_in_under_a_second(self):
        started = time.perf_counter()
        checks = reference_table_checks(reference_stats())
        elapsed = time.perf_counter() - started
        assert len(REFERENCE_ROWS) == 15
        assert abs(checks.msss_mean - 11.87) <= 0.01
        assert abs(checks.mcas_mean - 8.91) <= 0.01
        assert checks.means_ok
        assert elapsed < 1.0
        print(f"\n[acceptance] C1 reference means 11.87/8.91 within 0.01 "
              f"in {elapsed:.4f}s: PASS")


class TestC2ReferenceRatios:
    def test_every_row_ratio_sits_in_the_band(self):
        checks = reference_table_checks(reference_stats())
        assert len(checks.ratios) == 15
        for session_id, ratio in checks.ratios:
            assert 0.74 <= ratio <= 0.76, session_id
        assert checks.ratio_failures == ()
        print("\n[acceptance] C2 all 15 reference ratios in [0.74, 0.76]: PASS")


class TestC3ScoreAdditivity:
    def test_totals_add_up_on_every_corpus_page(self, corpus_paths, query,
                                                profile, gazetteer_provider):
        assert len(corpus_paths) >= 20
        cfg = ScoreConfig(provider=gazetteer_provider)
        for path in corpus_paths:
            report = score_page(path.read_bytes(), path.name, query, profile, cfg)
            assert report.segment_records, path.name
            for rec in report.segment_records:
                assert abs(rec.total - (rec.delta + rec.annotation)) <= TOL, path.name
            assert abs(report.page_score
                       - sum(r.total for r in report.segment_records)) <= TOL, path.name
        print(f"\n[acceptance] C3 segment and page additivity at 1e-9 on "
              f"{len(corpus_paths)} corpus pages: PASS")


class TestC4OracleAgreement:
    DIMENSION_KEYS = ("link", "image", "theme", "visual", "freshness", "profile",
                      "delta", "annotation", "total")

    def test_pipeline_matches_the_brute_force_scorer(self, tiny_paths, query,
                                                     profile, gazetteer_provider):
        assert len(tiny_paths) >= 5
        cfg = ScoreConfig(provider=gazetteer_provider)
        for path in tiny_paths:
            html = path.read_text("utf-8")
            assert len(tokenize(visible_text(body_of(parse_html(html))))) <= 50
            expected = brute_score_page(html, QUERY_RAW, dict(PROFILE_TERMS),
                                        {k: list(v) for k, v in GAZETTEER_PHRASES.items()})
            report = score_page(html, path.name, query, profile, cfg)
            assert len(report.segment_records) == len(expected["segments"]), path.name
            for rec, want in zip(report.segment_records, expected["segments"]):
                got = dict(rec.dimensions.as_dict(), delta=rec.delta,
                           annotation=rec.annotation, total=rec.total)
                for key in self.DIMENSION_KEYS:
                    assert abs(got[key] - want[key]) <= TOL, (path.name, rec.segment_id, key)
            assert abs(report.page_score - expected["page_score"]) <= TOL, path.name
        print(f"\n[acceptance] C4 pipeline equals the independent oracle at 1e-9 "
              f"on {len(tiny_paths)} tiny pages: PASS")


class TestC5TokenPartition:
    def test_hundred_random_documents_partition_exactly(self):
        rng = random.Random(20260815)
        violations = []
        for index in range(100):
            doc = random_document(rng)
            dom = parse_html(doc)
            body_tokens = Counter(tokenize(visible_text(body_of(dom))))
            segment_tokens = Counter()
            for seg in segment_page(dom):
                segment_tokens.update(seg.tokens)
            if segment_tokens != body_tokens:
                violations.append(index)
        assert violations == []
        print("\n[acceptance] C5 token partition holds on 100 random documents "
              "(0 violations): PASS")


class TestC6Monotonicity:
    def make_segment(self, tokens: list[str]) -> Segment:
        return Segment(id=0, dom_path=(1, 0), text=" ".join(tokens),
                       tokens=list(tokens), fingerprint=token_fingerprint(tokens))

    def test_appending_a_fused_token_never_lowers_its_dimensions(self):
        rng = random.Random(9241)
        vmwt, coeffs = Vmwt(), DimensionCoefficients()
        violations = 0
        for _ in range(100):
            query = Query.parse(" ".join(rng.sample(VOCAB, rng.randint(1, 4))))
            profile_terms = {term: round(rng.uniform(0.05, 1.0), 3)
                             for term in rng.sample(VOCAB, rng.randint(1, 4))}
            fused = fuse_terms(query, profile_terms)
            tokens = [rng.choice(VOCAB) for _ in range(rng.randint(0, 40))]
            extra = rng.choice(sorted(fused))
            before, _ = structural_score(
                self.make_segment(tokens), fused, profile_terms, [], vmwt, [], coeffs)
            after, _ = structural_score(
                self.make_segment(tokens + [extra]), fused, profile_terms, [],
                vmwt, [], coeffs)
            if after.freshness < before.freshness - TOL:
                violations += 1
            if abs(after.freshness - (before.freshness + fused[extra])) > TOL:
                violations += 1
            if after.profile < before.profile - TOL:
                violations += 1
        assert violations == 0
        print("\n[acceptance] C6 fused-token monotonicity over 100 random pairs "
              "(0 violations): PASS")


FIRST_DIV = "plain first block with ten ordinary filler tokens right here"
SECOND_DIV = "another plain block holding eleven ordinary filler tokens in a row"


def stable_page(second_extra: str = "") -> str:
    return ("<html><head><title>Notes</title></head><body>"
            f"<div>{FIRST_DIV}</div><div>{SECOND_DIV}{second_extra}</div>"
            "</body></html>")


class TestC7FreshnessSemantics:
    def test_first_unchanged_and_injected_visits(self, tmp_path, query, profile):
        cfg = ScoreConfig(snapshot_store=SnapshotStore(tmp_path))
        url = "http://site/page"

        def freshness(report):
            return [rec.dimensions.freshness for rec in report.segment_records]

        first = score_page(stable_page(), url, query, profile, cfg)
        assert freshness(first) == [0.0, 0.0]
        second = score_page(stable_page(), url, query, profile, cfg)
        assert freshness(second) == [0.0, 0.0]
        third = score_page(stable_page(" web"), url, query, profile, cfg)
        assert freshness(third) == [0.0, 1.0]  # exactly the fused weight of "web"
        print("\n[acceptance] C7 freshness: first visit 0, unchanged 0, one "
              "injected token scores exactly its fused weight: PASS")


class TestC8ReplayDeterminism:
    def test_two_cli_runs_are_byte_identical(self, tmp_path, capsys):
        page = TINY_DIR / "t4_entities.html"
        dom = parse_html(page.read_bytes())
        from segscore import text_key
        fixtures = {
            text_key(seg.text): {"entities": [
                {"type": "Topic", "name": "web search", "relevance": 0.5},
            ]}
            for seg in segment_page(dom)
        }
        fixtures_path = tmp_path / "fixtures.json"
        fixtures_path.write_text(json.dumps(fixtures), "utf-8")
        outputs = []
        for name in ("one.json", "two.json"):
            out_path = tmp_path / name
            code = main(["score", str(page), "--query", QUERY_RAW,
                         "--profile", str(TINY_DIR.parent / "profile.json"),
                         "--provider", "replay", "--fixtures", str(fixtures_path),
                         "--out", str(out_path)])
            assert code == EXIT_OK, capsys.readouterr().err
            outputs.append(out_path.read_bytes())
        assert outputs[0] == outputs[1]
        report = json.loads(outputs[0])
        assert report["flags"] == []
        assert all(s["annotation"] > 0 for s in report["segments"])
        print("\n[acceptance] C8 two replay-provider runs emit byte-identical "
              "reports: PASS")


class TestC9DeadEndpointDegradation:
    def test_scoring_survives_an_unreachable_annotator(self, tmp_path, capsys):
        page = TINY_DIR / "t1_links.html"
        out_path = tmp_path / "report.json"
        started = time.perf_counter()
        code = main(["score", str(page), "--query", QUERY_RAW,
                     "--provider", "remote", "--endpoint", "http://127.0.0.1:1/ann",
                     "--out", str(out_path)])
        elapsed = time.perf_counter() - started
        assert code == EXIT_OK, capsys.readouterr().err
        report = json.loads(out_path.read_text("utf-8"))
        segments = report["segments"]
        assert len(segments) == 2
        assert all(s["annotation"] == 0.0 for s in segments)
        assert len(report["flags"]) == 2
        assert all("annotation provider unavailable" in flag
                   for flag in report["flags"])
        assert elapsed < 7.0  # two segments, well under 3.5s each
        print(f"\n[acceptance] C9 dead endpoint degraded cleanly in "
              f"{elapsed:.2f}s for 2 segments: PASS")
