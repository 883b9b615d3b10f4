from __future__ import annotations

import json
import logging

import pytest
from cohgraph.corpus import load_corpus, load_embeddings, load_features

from cohbridge.convert import RawDocument, load_raw, preprocess, read_text_dir, read_tsv
from cohbridge.encode import GloveEmbeddings, HashDocumentEncoder, HashWordEmbeddings
from cohbridge.errors import InputError
from cohbridge.nouns import HeuristicTagger

from bridgefix import FIXTURE_DOCS


def build(docs, out_dir, truncate=0, words=None):
    return preprocess(
        docs,
        HeuristicTagger(),
        HashDocumentEncoder(dimension=32),
        words if words is not None else HashWordEmbeddings(dimension=16),
        out_dir,
        truncate=truncate,
    )


class TestRawDocument:
    def test_blank_text_rejected(self):
        with pytest.raises(InputError, match="empty text"):
            RawDocument(id="d0", text="   \n ")

    def test_blank_id_rejected(self):
        with pytest.raises(InputError, match="id"):
            RawDocument(id="", text="Dogs bark.")

    def test_label_defaults_to_none(self):
        assert RawDocument(id="d0", text="Dogs bark.").label is None


class TestReaders:
    def test_text_dir_reads_all(self, text_dir):
        docs = read_text_dir(text_dir)
        assert [d.id for d in docs] == [doc_id for doc_id, _, _ in FIXTURE_DOCS]
        assert docs[0].label == "sports"
        assert docs[4].label == "cooking"
        assert docs[9].label is None

    def test_text_dir_without_txt_files(self, tmp_path):
        with pytest.raises(InputError, match="no \\*.txt files"):
            read_text_dir(tmp_path)

    def test_text_dir_skips_empty_file(self, tmp_path, caplog):
        (tmp_path / "good.txt").write_text("Dogs bark.", encoding="utf-8")
        (tmp_path / "hollow.txt").write_text("  \n", encoding="utf-8")
        with caplog.at_level(logging.WARNING, logger="cohbridge"):
            docs = read_text_dir(tmp_path)
        assert [d.id for d in docs] == ["good"]
        assert any("hollow.txt" in record.message for record in caplog.records)

    def test_malformed_labels_file(self, tmp_path):
        (tmp_path / "a.txt").write_text("Dogs bark.", encoding="utf-8")
        (tmp_path / "labels.tsv").write_text("only-one-column\n", encoding="utf-8")
        with pytest.raises(InputError, match=":1:"):
            read_text_dir(tmp_path)

    def test_unknown_label_id_warns(self, tmp_path, caplog):
        (tmp_path / "a.txt").write_text("Dogs bark.", encoding="utf-8")
        (tmp_path / "labels.tsv").write_text("a\tx\nghost\ty\n", encoding="utf-8")
        with caplog.at_level(logging.WARNING, logger="cohbridge"):
            read_text_dir(tmp_path)
        assert any("ghost" in record.message for record in caplog.records)

    def test_tsv_reads_all(self, tsv_file):
        docs = read_tsv(tsv_file)
        assert [d.id for d in docs] == [doc_id for doc_id, _, _ in FIXTURE_DOCS]
        assert docs[9].label is None

    def test_tsv_keeps_tabs_inside_text(self, tmp_path):
        path = tmp_path / "docs.tsv"
        path.write_text("d0\tx\tDogs bark.\tCats sleep.\n", encoding="utf-8")
        assert read_tsv(path)[0].text == "Dogs bark.\tCats sleep."

    def test_tsv_malformed_line(self, tmp_path):
        path = tmp_path / "docs.tsv"
        path.write_text("d0\tx\tDogs bark.\nd1-missing-columns\n", encoding="utf-8")
        with pytest.raises(InputError, match=":2:"):
            read_tsv(path)

    def test_tsv_skips_empty_text(self, tmp_path, caplog):
        path = tmp_path / "docs.tsv"
        path.write_text("d0\tx\tDogs bark.\nd1\tx\t   \n", encoding="utf-8")
        with caplog.at_level(logging.WARNING, logger="cohbridge"):
            docs = read_tsv(path)
        assert [d.id for d in docs] == ["d0"]
        assert any("d1" in record.message for record in caplog.records)

    def test_tsv_with_no_lines(self, tmp_path):
        path = tmp_path / "docs.tsv"
        path.write_text("\n\n", encoding="utf-8")
        with pytest.raises(InputError, match="no documents"):
            read_tsv(path)

    def test_load_raw_dispatches_on_path_kind(self, text_dir, tsv_file, tmp_path):
        assert [d.id for d in load_raw(text_dir)] == [d.id for d in load_raw(tsv_file)]
        with pytest.raises(InputError, match="neither"):
            load_raw(tmp_path / "missing")


class TestPreprocess:
    def test_outputs_parse_with_pipeline_loaders(self, text_dir, tmp_path):
        summary = build(load_raw(text_dir), tmp_path / "out")
        assert summary["documents"] == 10
        assert summary["skipped"] == 0

        corpus = load_corpus(summary["paths"]["corpus"])
        features = load_features(summary["paths"]["features"])
        table = load_embeddings(summary["paths"]["embeddings"])

        assert len(corpus.documents) == 10
        assert len(features) == 10
        assert all(doc.id in features for doc in corpus.documents)
        assert features.dimension == 32
        assert table.dimension == 16
        assert corpus.label_names == ("cooking", "sports")
        by_id = {doc.id: doc for doc in corpus.documents}
        assert by_id["doc09"].label is None
        assert by_id["doc00"].label == corpus.label_names.index("sports")

    def test_pipeline_stages_consume_the_output(self, text_dir, tmp_path):
        from cohgraph.census import CensusConfig, mine_subgraphs
        from cohgraph.sentgraph import build_sentence_graph

        summary = build(load_raw(text_dir), tmp_path / "out")
        corpus = load_corpus(summary["paths"]["corpus"])
        table = load_embeddings(summary["paths"]["embeddings"])
        cfg = CensusConfig(k=3, w=4)
        for doc in corpus.documents:
            graph = build_sentence_graph(doc, table, delta=0.65)
            assert graph.n == len(doc.sentences)
            mine_subgraphs(graph, cfg)

    def test_embeddings_cover_exactly_the_occurring_nouns(self, text_dir, tmp_path):
        summary = build(load_raw(text_dir), tmp_path / "out")
        corpus = load_corpus(summary["paths"]["corpus"])
        table = load_embeddings(summary["paths"]["embeddings"])
        occurring = {
            noun.lower()
            for doc in corpus.documents
            for sentence in doc.sentences
            for noun in sentence.nouns
        }
        assert set(table.entries) == occurring
        assert summary["nouns"] == summary["embedded"] == len(occurring)

    def test_byte_identical_across_runs(self, text_dir, tmp_path):
        first = build(load_raw(text_dir), tmp_path / "one")
        second = build(load_raw(text_dir), tmp_path / "two")
        for name in ("corpus", "features", "embeddings"):
            with open(first["paths"][name], "rb") as handle:
                a = handle.read()
            with open(second["paths"][name], "rb") as handle:
                b = handle.read()
            assert a == b, name

    def test_truncation_changes_features_but_not_corpus(self, text_dir, tmp_path):
        full = build(load_raw(text_dir), tmp_path / "full")
        cut = build(load_raw(text_dir), tmp_path / "cut", truncate=3)
        with open(full["paths"]["corpus"], "rb") as handle:
            corpus_full = handle.read()
        with open(cut["paths"]["corpus"], "rb") as handle:
            corpus_cut = handle.read()
        assert corpus_full == corpus_cut
        with open(full["paths"]["features"]) as handle:
            features_full = handle.read()
        with open(cut["paths"]["features"]) as handle:
            features_cut = handle.read()
        assert features_full != features_cut

    def test_unsegmentable_document_skipped_with_warning(self, tmp_path, caplog):
        class MarkerTagger(HeuristicTagger):
            def analyze(self, text):
                if text.startswith("SKIP"):
                    return []
                return super().analyze(text)

        docs = [
            RawDocument(id="keep", text="Dogs bark."),
            RawDocument(id="drop", text="SKIP me"),
        ]
        with caplog.at_level(logging.WARNING, logger="cohbridge"):
            summary = preprocess(
                docs,
                MarkerTagger(),
                HashDocumentEncoder(dimension=8),
                HashWordEmbeddings(dimension=8),
                tmp_path / "out",
            )
        assert summary["documents"] == 1
        assert summary["skipped"] == 1
        assert any("drop" in record.message for record in caplog.records)
        assert len(load_corpus(summary["paths"]["corpus"]).documents) == 1

    def test_duplicate_ids_rejected(self, tmp_path):
        docs = [RawDocument(id="d0", text="Dogs bark."), RawDocument(id="d0", text="Cats sleep.")]
        with pytest.raises(InputError, match="duplicate"):
            build(docs, tmp_path / "out")

    def test_empty_document_list_rejected(self, tmp_path):
        with pytest.raises(InputError, match="no usable documents"):
            build([], tmp_path / "out")

    def test_word_source_covering_nothing_rejected(self, tmp_path):
        glove = tmp_path / "glove.txt"
        glove.write_text("unrelated 1.0 2.0\n", encoding="utf-8")
        docs = [RawDocument(id="d0", text="Dogs bark.")]
        with pytest.raises(InputError, match="no embeddable nouns"):
            build(docs, tmp_path / "out", words=GloveEmbeddings(glove))

    def test_glove_subset_restricts_embedding_rows(self, text_dir, tmp_path):
        glove = tmp_path / "glove.txt"
        glove.write_text("rangers 1.0 2.0\nonions 3.0 4.0\nzebra 5.0 6.0\n", encoding="utf-8")
        summary = build(load_raw(text_dir), tmp_path / "out", words=GloveEmbeddings(glove))
        table = load_embeddings(summary["paths"]["embeddings"])
        assert set(table.entries) == {"rangers", "onions"}
        assert summary["embedded"] == 2
        assert summary["nouns"] > summary["embedded"]

    def test_feature_rows_are_valid_json_per_line(self, text_dir, tmp_path):
        summary = build(load_raw(text_dir), tmp_path / "out")
        with open(summary["paths"]["features"], encoding="utf-8") as handle:
            rows = [json.loads(line) for line in handle]
        assert all(set(row) == {"id", "feature"} for row in rows)
        assert all(len(row["feature"]) == 32 for row in rows)
