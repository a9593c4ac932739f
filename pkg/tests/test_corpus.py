import math

import pytest

from keyscore.corpus import (TokenTrace, build_record, build_trace,
                             load_corpus, load_human_scores, save_corpus,
                             segment_spans)
from keyscore.errors import ValidationError
from tests.conftest import write_jsonl

DOCS = [
    {"doc_id": "d1", "text": "routing tables in practice", "gold": ["routing"]},
    {"doc_id": "d2", "text": "summarization systems", "gold": []},
]
PREDS = [
    {"doc_id": "d1", "tokens": ["routing", ";", "bgp"], "probs": [0.9, 0.99, 0.5]},
    {"doc_id": "d2", "tokens": ["models", ";"], "probs": [0.7, 0.99]},
]


class TestSegmentSpans:
    def trace(self, tokens):
        return build_trace(tokens, [0.5] * len(tokens), delimiters={";"})

    def test_basic(self):
        spans = segment_spans(self.trace(["a", "b", ";", "c"]), {";"})
        assert [(s.start, s.end) for s in spans] == [(0, 1), (3, 3)]

    def test_only_delimiters(self):
        assert segment_spans(self.trace([";", ";"]), {";"}) == []

    def test_adjacent_delimiters_drop_empty_runs(self):
        spans = segment_spans(self.trace(["a", ";", ";", "b"]), {";"})
        assert [(s.start, s.end) for s in spans] == [(0, 0), (3, 3)]

    def test_empty_delimiter_set_rejected(self):
        with pytest.raises(ValidationError):
            segment_spans(self.trace(["a"]), set())


class TestTraceValidation:
    def test_length_mismatch_rejected(self):
        with pytest.raises(ValidationError, match="equal length"):
            TokenTrace(("a", "b"), (0.5,), (False, False))

    def test_zero_probability_rejected(self):
        with pytest.raises(ValidationError, match="perplexity undefined"):
            build_trace(["a"], [0.0])

    def test_probability_above_one_rejected(self):
        with pytest.raises(ValidationError):
            build_trace(["a"], [1.0001])

    def test_nan_rejected(self):
        with pytest.raises(ValidationError):
            build_trace(["a"], [float("nan")])

    def test_log_probs_exponentiated(self):
        tr = build_trace(["a"], [math.log(0.25)], probs_are_log=True)
        assert tr.probs[0] == pytest.approx(0.25)


class TestBuildRecord:
    def test_derived_spans_and_phrases(self):
        tr = build_trace(["deep", "nets", ";", "bgp"], [0.5] * 4, delimiters={";"})
        rec = build_record("d", tr, delimiters={";"})
        assert [(s.start, s.end) for s in rec.spans] == [(0, 1), (3, 3)]
        assert [p.raw for p in rec.phrases] == ["deep nets", "bgp"]

    def test_explicit_spans_win(self):
        tr = build_trace(["a", "b"], [0.5, 0.5], delimiters={";"})
        rec = build_record("d", tr, spans=[[0, 0], [1, 1]], delimiters={";"})
        assert [p.raw for p in rec.phrases] == ["a", "b"]

    def test_explicit_span_over_special_token_rejected(self):
        tr = build_trace(["a", ";", "b"], [0.5] * 3, delimiters={";"})
        with pytest.raises(ValidationError, match="special token"):
            build_record("d", tr, spans=[[0, 2]], delimiters={";"})

    def test_explicit_spans_must_cover_all_tokens(self):
        tr = build_trace(["a", ";", "b"], [0.5] * 3, delimiters={";"})
        with pytest.raises(ValidationError, match="cover"):
            build_record("d", tr, spans=[[0, 0]], delimiters={";"})

    def test_spans_reconstruct_non_special_trace(self):
        tr = build_trace(["a", "b", ";", "c", "</s>"], [0.5] * 5)
        rec = build_record("d", tr)
        flat = [tr.tokens[i] for sp in rec.spans for i in range(sp.start, sp.end + 1)]
        non_special = [t for t, m in zip(tr.tokens, tr.special_mask) if not m]
        assert flat == non_special


class TestLoadCorpus:
    def test_well_formed(self, tmp_path):
        dp = write_jsonl(tmp_path / "d.jsonl", DOCS)
        pp = write_jsonl(tmp_path / "p.jsonl", PREDS)
        corpus = load_corpus(dp, pp)
        assert len(corpus.documents) == 2
        assert len(corpus.predictions) == 2
        assert corpus.predictions["d1"].phrases[0].stemmed == ("rout",)

    def test_orphan_prediction_named(self, tmp_path):
        dp = write_jsonl(tmp_path / "d.jsonl", DOCS)
        pp = write_jsonl(tmp_path / "p.jsonl", PREDS + [
            {"doc_id": "doc-99", "tokens": ["x"], "probs": [0.5]}])
        with pytest.raises(ValidationError, match="doc-99"):
            load_corpus(dp, pp)

    def test_zero_probability_cites_line(self, tmp_path):
        dp = write_jsonl(tmp_path / "d.jsonl", DOCS)
        pp = write_jsonl(tmp_path / "p.jsonl", [
            {"doc_id": "d1", "tokens": ["x"], "probs": [0.0]}])
        with pytest.raises(ValidationError, match=r"p\.jsonl:1"):
            load_corpus(dp, pp)

    def test_malformed_line_number(self, tmp_path):
        dp = tmp_path / "d.jsonl"
        dp.write_text('{"doc_id": "a", "text": "t", "gold": []}\nnot json\n')
        pp = write_jsonl(tmp_path / "p.jsonl", [])
        with pytest.raises(ValidationError, match=r"d\.jsonl:2"):
            load_corpus(dp, pp)

    def test_duplicate_doc_id_rejected(self, tmp_path):
        dp = write_jsonl(tmp_path / "d.jsonl", [DOCS[0], DOCS[0]])
        pp = write_jsonl(tmp_path / "p.jsonl", [])
        with pytest.raises(ValidationError, match="duplicate doc_id"):
            load_corpus(dp, pp)

    def test_round_trip_identity(self, tmp_path):
        dp = write_jsonl(tmp_path / "d.jsonl", DOCS)
        pp = write_jsonl(tmp_path / "p.jsonl", PREDS)
        corpus = load_corpus(dp, pp)
        dp2, pp2 = tmp_path / "d2.jsonl", tmp_path / "p2.jsonl"
        save_corpus(corpus, dp2, pp2)
        reloaded = load_corpus(dp2, pp2)
        assert reloaded == corpus
        # serializing the reloaded corpus is byte-stable too
        dp3, pp3 = tmp_path / "d3.jsonl", tmp_path / "p3.jsonl"
        save_corpus(reloaded, dp3, pp3)
        assert dp3.read_bytes() == dp2.read_bytes()
        assert pp3.read_bytes() == pp2.read_bytes()


class TestHumanScores:
    def test_load(self, tmp_path):
        p = write_jsonl(tmp_path / "h.jsonl", [{"doc_id": "a", "score": 1.0}])
        records = load_human_scores(p)
        assert [(r.doc_id, r.score) for r in records] == [("a", 1.0)]

    def test_out_of_range(self, tmp_path):
        p = write_jsonl(tmp_path / "h.jsonl", [{"doc_id": "a", "score": 1.5}])
        with pytest.raises(ValidationError):
            load_human_scores(p)

    def test_empty_file(self, tmp_path):
        p = tmp_path / "h.jsonl"
        p.write_text("")
        assert load_human_scores(p) == []


def test_pairs_iterates_in_document_order(tmp_path):
    dp = write_jsonl(tmp_path / "d.jsonl", DOCS)
    pp = write_jsonl(tmp_path / "p.jsonl", list(reversed(PREDS)))
    corpus = load_corpus(dp, pp)
    assert [doc.doc_id for doc, _ in corpus.pairs()] == ["d1", "d2"]
