"""Directed sentence graphs from noun-level embedding similarity.

An edge (u, v) with u < v is added when the best cosine similarity between
any noun of sentence u and any noun of sentence v strictly exceeds the
threshold delta. Nouns are lowercased before lookup; tokens missing from
the table and zero-norm vectors never contribute a score.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .corpus import Document, EmbeddingTable, Sentence
from .errors import ParseError, ValidationError


@dataclass(frozen=True)
class SentenceGraph:
    """Forward-edge digraph over a document's 1-based sentence positions."""

    n: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self):
        for u, v in self.edges:
            if not (1 <= u < v <= self.n):
                raise ValidationError(f"edge ({u},{v}) is not forward within 1..{self.n}")


def _unit_rows(sentence: Sentence, table: EmbeddingTable) -> Optional[np.ndarray]:
    """Unit vectors of the sentence's scorable nouns; None when there are none."""
    seen: set[str] = set()
    rows = []
    for noun in sentence.nouns:
        token = noun.lower()
        if token in seen:
            continue
        seen.add(token)
        vec = table.lookup(token)
        if vec is None:
            continue
        norm = float(np.linalg.norm(vec))
        if norm == 0.0:
            continue  # cosine undefined for zero vectors
        rows.append(vec / norm)
    if not rows:
        return None
    return np.stack(rows)


def max_noun_similarity(
    sentence_u: Sentence, sentence_v: Sentence, table: EmbeddingTable
) -> Optional[float]:
    """Best cosine over all noun pairs, or None when either side is unscorable."""
    a = _unit_rows(sentence_u, table)
    b = _unit_rows(sentence_v, table)
    if a is None or b is None:
        return None
    return float(np.max(a @ b.T))


def build_sentence_graph(doc: Document, table: EmbeddingTable, delta: float) -> SentenceGraph:
    if not 0.0 < delta <= 1.0:
        raise ValidationError(f"delta must lie in (0, 1], got {delta}")
    if len(doc.sentences) == 0:
        raise ValidationError(f"document '{doc.id}' has no sentences")
    units = [_unit_rows(s, table) for s in doc.sentences]
    edges = set()
    for u in range(len(units)):
        if units[u] is None:
            continue
        for v in range(u + 1, len(units)):
            if units[v] is None:
                continue
            if float(np.max(units[u] @ units[v].T)) > delta:
                edges.add((u + 1, v + 1))
    return SentenceGraph(n=len(units), edges=frozenset(edges))


def graph_record(doc_id: str, graph: SentenceGraph) -> dict:
    """Cache row: {"id", "n", "edges"} with edges sorted for stable output."""
    return {"id": doc_id, "n": graph.n, "edges": [list(e) for e in sorted(graph.edges)]}


def graph_from_record(record: dict) -> tuple[str, SentenceGraph]:
    try:
        doc_id = record["id"]
        n = int(record["n"])
        edges = frozenset((int(u), int(v)) for u, v in record["edges"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed sentence-graph record: {record!r}") from exc
    return doc_id, SentenceGraph(n=n, edges=edges)
