"""Corpus-level graph linking documents to the subgraph patterns they contain.

Node order is fixed: documents 0..N-1 in corpus order, then patterns
N..N+M-1 sorted by signature encoding. Weights use the natural log:

* document i -- pattern j:  (f_ij / sum_j' f_ij') * ln(N / df_j)
* pattern j -- pattern j':  max(0, ln((codf/N) / ((df_j/N) * (df_j'/N))))

Zero-weight edges (df_j = N, or non-positive pointwise mutual information)
are simply not stored, which is numerically identical to storing 0.
Documents never connect to documents. The propagation matrix adds unit
self-loops and symmetrically normalizes: (A + I)_ij / sqrt(d_i * d_j).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .census import Signature, SubgraphSet
from .errors import ValidationError


@dataclass(frozen=True)
class SubgraphVocabulary:
    """Union of training patterns with document and co-document frequencies."""

    signatures: tuple[Signature, ...]
    df: tuple[int, ...]
    codf: Mapping[tuple[int, int], int]  # keyed (a, b) with a < b, absent = 0
    n_docs: int

    def index(self, sig: Signature) -> int | None:
        return _index_of(self).get(sig)


def _index_of(vocab: SubgraphVocabulary) -> dict[Signature, int]:
    # Cached on the instance despite frozen=True; plain dict lookup afterwards.
    cache = getattr(vocab, "_index_cache", None)
    if cache is None:
        cache = {sig: i for i, sig in enumerate(vocab.signatures)}
        object.__setattr__(vocab, "_index_cache", cache)
    return cache


def build_vocabulary(subgraph_sets: Mapping[str, SubgraphSet]) -> SubgraphVocabulary:
    """Collect the pattern union, df, and codf from training documents only."""
    if not subgraph_sets:
        raise ValidationError("cannot build a vocabulary from zero documents")
    ks = {s.k for s in subgraph_sets.values()}
    if len(ks) > 1:
        raise ValidationError(f"subgraph sets mix k values: {sorted(ks)}")
    union: set[Signature] = set()
    for sset in subgraph_sets.values():
        union.update(sset.counts)
    signatures = tuple(sorted(union))
    index = {sig: i for i, sig in enumerate(signatures)}

    df = [0] * len(signatures)
    codf: dict[tuple[int, int], int] = {}
    for sset in subgraph_sets.values():
        present = sorted(index[sig] for sig in sset.counts)
        for a_pos, a in enumerate(present):
            df[a] += 1
            for b in present[a_pos + 1 :]:
                codf[(a, b)] = codf.get((a, b), 0) + 1
    return SubgraphVocabulary(
        signatures=signatures, df=tuple(df), codf=codf, n_docs=len(subgraph_sets)
    )


def doc_subgraph_weight(frequency: int, doc_total: int, df: int, n_docs: int) -> float:
    """(frequency / doc_total) * ln(n_docs / df)."""
    if frequency < 1 or doc_total < frequency:
        raise ValidationError(f"bad frequencies: frequency={frequency}, doc_total={doc_total}")
    if df < 1 or n_docs < df:
        raise ValidationError(f"bad document frequency: df={df}, n_docs={n_docs}")
    return (frequency / doc_total) * math.log(n_docs / df)


def pmi_weight(df_a: int, df_b: int, codf: int, n_docs: int) -> float:
    """max(0, ln((codf/N) / ((df_a/N)(df_b/N)))); 0 when codf is 0."""
    if df_a < 1 or df_b < 1 or n_docs < max(df_a, df_b):
        raise ValidationError(f"bad document frequencies: {df_a}, {df_b} of {n_docs}")
    if codf < 0 or codf > min(df_a, df_b):
        raise ValidationError(f"codf={codf} inconsistent with df {df_a}, {df_b}")
    if codf == 0:
        return 0.0
    value = math.log((codf / n_docs) / ((df_a / n_docs) * (df_b / n_docs)))
    return max(0.0, value)


@dataclass(frozen=True)
class HeteroGraph:
    """Symmetric weighted adjacency over document and pattern nodes."""

    doc_ids: tuple[str, ...]
    signatures: tuple[Signature, ...]
    adjacency: np.ndarray  # (N+M, N+M), read-only

    @property
    def n_docs(self) -> int:
        return len(self.doc_ids)

    @property
    def n_subgraphs(self) -> int:
        return len(self.signatures)


def build_hetero_graph(
    vocab: SubgraphVocabulary,
    subgraph_sets: Mapping[str, SubgraphSet],
    *,
    doc_subgraph_edges: bool = True,
    subgraph_edges: bool = True,
) -> HeteroGraph:
    """Assemble the weighted adjacency; the two edge families toggle for ablations."""
    doc_ids = tuple(subgraph_sets)
    n, m = len(doc_ids), len(vocab.signatures)
    if vocab.n_docs != n:
        raise ValidationError(
            f"vocabulary built from {vocab.n_docs} documents, got {n} subgraph sets"
        )
    index = _index_of(vocab)
    a = np.zeros((n + m, n + m), dtype=np.float64)

    if doc_subgraph_edges:
        for i, doc_id in enumerate(doc_ids):
            sset = subgraph_sets[doc_id]
            doc_total = sset.total()
            for sig, frequency in sset.counts.items():
                j = index.get(sig)
                if j is None:
                    raise ValidationError(
                        f"document '{doc_id}' carries signature {sig.encode()} missing from vocabulary"
                    )
                weight = doc_subgraph_weight(frequency, doc_total, vocab.df[j], n)
                a[i, n + j] = weight
                a[n + j, i] = weight

    if subgraph_edges:
        for (ja, jb), codf in vocab.codf.items():
            weight = pmi_weight(vocab.df[ja], vocab.df[jb], codf, n)
            if weight != 0.0:
                a[n + ja, n + jb] = weight
                a[n + jb, n + ja] = weight

    a.setflags(write=False)
    return HeteroGraph(doc_ids=doc_ids, signatures=vocab.signatures, adjacency=a)


def attach_document(
    graph: HeteroGraph,
    vocab: SubgraphVocabulary,
    subgraphs: SubgraphSet,
    doc_id: str,
    *,
    doc_subgraph_edges: bool = True,
) -> HeteroGraph:
    """Insert one unlabeled document at index N, leaving training entries untouched.

    Document frequencies stay those of the training vocabulary; patterns absent
    from the vocabulary contribute nothing, including to the frequency total.
    """
    if doc_id in graph.doc_ids:
        raise ValidationError(f"document id '{doc_id}' already present")
    n, m = graph.n_docs, graph.n_subgraphs
    index = _index_of(vocab)
    old = graph.adjacency
    a = np.zeros((n + m + 1, n + m + 1), dtype=np.float64)
    a[:n, :n] = old[:n, :n]
    a[:n, n + 1 :] = old[:n, n:]
    a[n + 1 :, :n] = old[n:, :n]
    a[n + 1 :, n + 1 :] = old[n:, n:]

    if doc_subgraph_edges:
        known = {
            index[sig]: frequency
            for sig, frequency in subgraphs.counts.items()
            if sig in index
        }
        doc_total = sum(known.values())
        for j, frequency in known.items():
            weight = doc_subgraph_weight(frequency, doc_total, vocab.df[j], vocab.n_docs)
            a[n, n + 1 + j] = weight
            a[n + 1 + j, n] = weight

    a.setflags(write=False)
    return HeteroGraph(
        doc_ids=graph.doc_ids + (doc_id,), signatures=graph.signatures, adjacency=a
    )


def normalize_adjacency(adjacency: np.ndarray) -> np.ndarray:
    """Symmetric normalization with self-loops: (A+I)_ij / sqrt(d_i d_j)."""
    if adjacency.ndim != 2 or adjacency.shape[0] != adjacency.shape[1]:
        raise ValidationError(f"adjacency must be square, got {adjacency.shape}")
    a_tilde = adjacency + np.eye(adjacency.shape[0], dtype=np.float64)
    degrees = a_tilde.sum(axis=1)
    inv_sqrt = 1.0 / np.sqrt(degrees)  # degrees >= 1 thanks to the self-loop
    return a_tilde * np.outer(inv_sqrt, inv_sqrt)


def normalize(graph: HeteroGraph) -> np.ndarray:
    return normalize_adjacency(graph.adjacency)


def normalize_from_edges(size: int, edges) -> np.ndarray:
    """Same propagation matrix built from a coordinate list of (i, j, weight)."""
    a = np.zeros((size, size), dtype=np.float64)
    for i, j, weight in edges:
        a[i, j] = weight
        a[j, i] = weight
    return normalize_adjacency(a)


def dump_graph(graph: HeteroGraph) -> dict:
    """Inspection form: sizes, signature encodings, upper-triangle nonzero edges."""
    n_total = graph.adjacency.shape[0]
    edges = []
    for i in range(n_total):
        for j in range(i + 1, n_total):
            weight = graph.adjacency[i, j]
            if weight != 0.0:
                edges.append([i, j, float(weight)])
    return {
        "N": graph.n_docs,
        "M": graph.n_subgraphs,
        "signatures": [sig.encode() for sig in graph.signatures],
        "edges": edges,
    }
