import math

import numpy as np
import pytest

from cohgraph.census import Signature, SubgraphSet
from cohgraph.errors import ValidationError
from cohgraph.hetgraph import (
    attach_document,
    build_hetero_graph,
    build_vocabulary,
    doc_subgraph_weight,
    dump_graph,
    normalize,
    normalize_adjacency,
    normalize_from_edges,
    pmi_weight,
)


def sig(bits, k=2):
    return Signature(k, bits)


def random_sets(rng, n_docs, n_sigs=6, k=3):
    sigs = [Signature(k, b) for b in range(n_sigs)]
    sets = {}
    for d in range(n_docs):
        counts = {
            s: int(rng.integers(1, 5)) for s in sigs if rng.random() < 0.6
        }
        if not counts:
            counts = {sigs[0]: 1}
        sets[f"doc{d}"] = SubgraphSet(k=k, counts=counts)
    return sets


class TestWeights:
    def test_doc_subgraph_hand_values(self):
        assert doc_subgraph_weight(2, 4, 1, 2) == pytest.approx(0.5 * math.log(2), abs=1e-12)
        assert doc_subgraph_weight(2, 4, 2, 2) == 0.0  # ubiquitous pattern, ln(1)
        assert doc_subgraph_weight(3, 3, 1, 1) == 0.0

    def test_doc_subgraph_validation(self):
        with pytest.raises(ValidationError):
            doc_subgraph_weight(0, 4, 1, 2)
        with pytest.raises(ValidationError):
            doc_subgraph_weight(5, 4, 1, 2)
        with pytest.raises(ValidationError):
            doc_subgraph_weight(1, 1, 3, 2)

    def test_pmi_hand_values(self):
        assert pmi_weight(3, 2, 2, 4) == pytest.approx(math.log(4.0 / 3.0), abs=1e-12)
        assert pmi_weight(2, 2, 1, 4) == 0.0  # independence, ln(1)
        assert pmi_weight(3, 3, 2, 4) == 0.0  # negative association clips to 0

    def test_pmi_zero_cooccurrence(self):
        assert pmi_weight(2, 3, 0, 5) == 0.0

    def test_pmi_validation(self):
        with pytest.raises(ValidationError):
            pmi_weight(0, 2, 0, 4)
        with pytest.raises(ValidationError):
            pmi_weight(2, 2, 3, 4)  # codf above min(df)


class TestVocabulary:
    def test_two_document_example(self):
        g_full = sig(1)  # 2-node pattern with one edge
        g_empty = sig(0)
        sets = {
            "d1": SubgraphSet(2, {g_full: 2, g_empty: 2}),
            "d2": SubgraphSet(2, {g_full: 1}),
        }
        vocab = build_vocabulary(sets)
        assert vocab.n_docs == 2
        assert vocab.signatures == (g_empty, g_full)  # sorted by encoding
        assert vocab.df[vocab.index(g_full)] == 2
        assert vocab.df[vocab.index(g_empty)] == 1
        assert vocab.codf == {(0, 1): 1}

    def test_counts_bounded_by_corpus(self):
        rng = np.random.default_rng(8)
        for _ in range(20):
            sets = random_sets(rng, int(rng.integers(2, 9)))
            vocab = build_vocabulary(sets)
            assert all(1 <= df <= vocab.n_docs for df in vocab.df)
            for (a, b), codf in vocab.codf.items():
                assert a < b
                assert 1 <= codf <= min(vocab.df[a], vocab.df[b])

    def test_mixed_k_rejected(self):
        sets = {
            "d1": SubgraphSet(2, {sig(1): 1}),
            "d2": SubgraphSet(3, {Signature(3, 1): 1}),
        }
        with pytest.raises(ValidationError, match="mix"):
            build_vocabulary(sets)

    def test_empty_rejected(self):
        with pytest.raises(ValidationError):
            build_vocabulary({})


class TestBuildHeteroGraph:
    def test_two_document_example_matrix(self):
        g_full, g_empty = sig(1), sig(0)
        sets = {
            "d1": SubgraphSet(2, {g_full: 2, g_empty: 2}),
            "d2": SubgraphSet(2, {g_full: 1}),
        }
        vocab = build_vocabulary(sets)
        het = build_hetero_graph(vocab, sets)
        a = het.adjacency
        assert a.shape == (4, 4)
        np.testing.assert_array_equal(a, a.T)
        # only d1 -- g_empty carries weight: (2/4) * ln(2/1)
        expected = np.zeros((4, 4))
        j_empty = 2 + vocab.index(g_empty)
        expected[0, j_empty] = expected[j_empty, 0] = 0.5 * math.log(2)
        np.testing.assert_allclose(a, expected, atol=1e-12)

    def test_doc_doc_block_always_zero(self):
        rng = np.random.default_rng(21)
        for _ in range(10):
            sets = random_sets(rng, int(rng.integers(2, 8)))
            het = build_hetero_graph(build_vocabulary(sets), sets)
            n = het.n_docs
            assert not het.adjacency[:n, :n].any()

    def test_ablation_blocks_are_independent(self):
        rng = np.random.default_rng(33)
        sets = random_sets(rng, 6)
        vocab = build_vocabulary(sets)
        full = build_hetero_graph(vocab, sets).adjacency
        no_pattern = build_hetero_graph(vocab, sets, subgraph_edges=False).adjacency
        no_doc = build_hetero_graph(vocab, sets, doc_subgraph_edges=False).adjacency
        n = len(sets)
        np.testing.assert_array_equal(no_pattern[:n, n:], full[:n, n:])
        assert not no_pattern[n:, n:].any()
        np.testing.assert_array_equal(no_doc[n:, n:], full[n:, n:])
        assert not no_doc[:n, :].any()

    def test_symmetric_and_nonnegative(self):
        rng = np.random.default_rng(2)
        for _ in range(10):
            sets = random_sets(rng, int(rng.integers(2, 10)))
            a = build_hetero_graph(build_vocabulary(sets), sets).adjacency
            np.testing.assert_array_equal(a, a.T)
            assert (a >= 0).all()


class TestAttachDocument:
    def base(self):
        g_full, g_empty = sig(1), sig(0)
        sets = {
            "d1": SubgraphSet(2, {g_full: 2, g_empty: 2}),
            "d2": SubgraphSet(2, {g_full: 1}),
        }
        vocab = build_vocabulary(sets)
        return vocab, build_hetero_graph(vocab, sets), g_full, g_empty

    def test_unseen_patterns_drop_out_of_total(self):
        vocab, het, g_full, g_empty = self.base()
        unseen = Signature(2, 2)
        test_set = SubgraphSet(2, {g_empty: 2, unseen: 2})
        bigger = attach_document(het, vocab, test_set, "t")
        a = bigger.adjacency
        n = het.n_docs
        # g_empty df=1 over N=2 docs; total counts only vocabulary patterns
        j = n + 1 + vocab.index(g_empty)
        assert a[n, j] == pytest.approx((2 / 2) * math.log(2), abs=1e-12)
        assert a[n, n + 1 + vocab.index(g_full)] == 0.0

    def test_training_block_bitwise_unchanged(self):
        vocab, het, g_full, g_empty = self.base()
        test_set = SubgraphSet(2, {g_full: 3})
        bigger = attach_document(het, vocab, test_set, "t")
        n, m = het.n_docs, het.n_subgraphs
        a, b = het.adjacency, bigger.adjacency
        np.testing.assert_array_equal(b[:n, :n], a[:n, :n])
        np.testing.assert_array_equal(b[:n, n + 1 :], a[:n, n:])
        np.testing.assert_array_equal(b[n + 1 :, n + 1 :], a[n:, n:])

    def test_empty_pattern_set_isolated(self):
        vocab, het, _, _ = self.base()
        bigger = attach_document(het, vocab, SubgraphSet(2, {}), "t")
        n = het.n_docs
        assert not bigger.adjacency[n, :].any()
        assert not bigger.adjacency[:, n].any()

    def test_duplicate_id_rejected(self):
        vocab, het, g_full, _ = self.base()
        with pytest.raises(ValidationError, match="d1"):
            attach_document(het, vocab, SubgraphSet(2, {g_full: 1}), "d1")

    def test_attach_is_pure(self):
        vocab, het, g_full, _ = self.base()
        before = het.adjacency.copy()
        attach_document(het, vocab, SubgraphSet(2, {g_full: 1}), "t")
        np.testing.assert_array_equal(het.adjacency, before)


class TestNormalize:
    def test_hand_examples(self):
        out = normalize_adjacency(np.array([[0.0, 1.0], [1.0, 0.0]]))
        np.testing.assert_allclose(out, [[0.5, 0.5], [0.5, 0.5]], atol=1e-12)
        out = normalize_adjacency(np.array([[0.0, 3.0], [3.0, 0.0]]))
        np.testing.assert_allclose(out, [[0.25, 0.75], [0.75, 0.25]], atol=1e-12)

    def test_entrywise_formula_on_random_matrices(self):
        rng = np.random.default_rng(17)
        for _ in range(20):
            n = int(rng.integers(1, 12))
            a = rng.random((n, n)) * (rng.random((n, n)) < 0.5)
            a = (a + a.T) / 2
            np.fill_diagonal(a, 0.0)
            out = normalize_adjacency(a)
            a_tilde = a + np.eye(n)
            deg = a_tilde.sum(axis=1)
            for i in range(n):
                for j in range(n):
                    expected = a_tilde[i, j] / math.sqrt(deg[i] * deg[j])
                    assert abs(out[i, j] - expected) <= 1e-12
            np.testing.assert_array_equal(out, out.T)  # exactly symmetric

    def test_isolated_row_becomes_basis_vector(self):
        a = np.zeros((4, 4))
        a[0, 1] = a[1, 0] = 2.0
        out = normalize_adjacency(a)
        np.testing.assert_array_equal(out[2], [0.0, 0.0, 1.0, 0.0])
        np.testing.assert_array_equal(out[3], [0.0, 0.0, 0.0, 1.0])

    def test_spectrum_within_unit_interval(self):
        rng = np.random.default_rng(5)
        for _ in range(15):
            n = int(rng.integers(2, 15))
            a = rng.random((n, n)) * (rng.random((n, n)) < 0.4)
            a = (a + a.T) / 2
            np.fill_diagonal(a, 0.0)
            eigenvalues = np.linalg.eigvalsh(normalize_adjacency(a))
            assert eigenvalues.min() >= -1.0 - 1e-9
            assert eigenvalues.max() <= 1.0 + 1e-9

    def test_rejects_non_square(self):
        with pytest.raises(ValidationError):
            normalize_adjacency(np.zeros((2, 3)))

    def test_coordinate_list_path_identical(self):
        rng = np.random.default_rng(11)
        sets = random_sets(rng, 5)
        het = build_hetero_graph(build_vocabulary(sets), sets)
        dense = normalize(het)
        dumped = dump_graph(het)
        sparse = normalize_from_edges(het.adjacency.shape[0], dumped["edges"])
        np.testing.assert_array_equal(dense, sparse)


class TestDumpGraph:
    def test_shape_and_content(self):
        rng = np.random.default_rng(4)
        sets = random_sets(rng, 4)
        het = build_hetero_graph(build_vocabulary(sets), sets)
        payload = dump_graph(het)
        assert payload["N"] == het.n_docs and payload["M"] == het.n_subgraphs
        assert payload["signatures"] == sorted(payload["signatures"])
        nonzero_upper = int(np.count_nonzero(np.triu(het.adjacency, k=1)))
        assert len(payload["edges"]) == nonzero_upper
        for i, j, weight in payload["edges"]:
            assert i < j
            assert het.adjacency[i, j] == weight
