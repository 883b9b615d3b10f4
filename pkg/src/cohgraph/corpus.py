"""Data model and file I/O for documents, embeddings, features, and fold plans.

File formats (all UTF-8, one record per line where applicable):

* corpus, newline-delimited JSON::

    {"id": str, "label": str | int | null,
     "sentences": [{"nouns": [str], "text": str?}, ...]}

* word embeddings, whitespace-separated text: ``token v1 v2 ... vD``

* per-document feature vectors, newline-delimited JSON::

    {"id": str, "feature": [float, ...]}

Labels become 0-based class indices. Integer-like labels (ints or digit
strings) pass through verbatim; any other set of strings is sorted and
numbered 0..C-1, with the sorted originals kept as ``label_names``.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Optional, Sequence

import numpy as np

from .errors import ParseError, ValidationError


@dataclass(frozen=True)
class Sentence:
    """One sentence: 1-based position in its document plus its noun tokens."""

    index: int
    nouns: tuple[str, ...]
    text: Optional[str] = None


@dataclass(frozen=True)
class Document:
    id: str
    label: Optional[int]
    sentences: tuple[Sentence, ...]

    def __len__(self) -> int:
        return len(self.sentences)

    def word_count(self) -> int:
        """Words across sentences; noun counts stand in when raw text is absent."""
        total = 0
        for s in self.sentences:
            total += len(s.text.split()) if s.text else len(s.nouns)
        return total


@dataclass(frozen=True)
class Corpus:
    """Documents in file order plus the index -> original-label sidecar."""

    documents: tuple[Document, ...]
    label_names: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.documents)

    def __iter__(self) -> Iterator[Document]:
        return iter(self.documents)

    def __getitem__(self, item):
        return self.documents[item]


def _integer_like(value) -> bool:
    return type(value) is int or (isinstance(value, str) and value.isdigit())


def _assign_labels(raw: list, where: str) -> tuple[dict[int, int], tuple[str, ...]]:
    """Map raw label values (keyed by record position) to class indices."""
    present = [(pos, value) for pos, value in raw if value is not None]
    if not present:
        return {}, ()
    if all(_integer_like(v) for _, v in present):
        mapping = {pos: int(v) for pos, v in present}
        low = min(mapping.values())
        if low < 0:
            raise ValidationError(f"{where}: negative class index {low}")
        names = tuple(str(i) for i in range(max(mapping.values()) + 1))
        return mapping, names
    names = tuple(sorted({str(v) for _, v in present}))
    index = {name: i for i, name in enumerate(names)}
    return {pos: index[str(v)] for pos, v in present}, names


def _parse_sentences(value, where: str) -> tuple[Sentence, ...]:
    if not isinstance(value, list):
        raise ParseError(f"{where}: 'sentences' must be a list")
    out = []
    for pos, item in enumerate(value, start=1):
        if not isinstance(item, dict):
            raise ParseError(f"{where}: sentence {pos} must be an object")
        nouns = item.get("nouns")
        if not isinstance(nouns, list) or not all(isinstance(t, str) for t in nouns):
            raise ParseError(f"{where}: sentence {pos} needs a 'nouns' list of strings")
        text = item.get("text")
        if text is not None and not isinstance(text, str):
            raise ParseError(f"{where}: sentence {pos} 'text' must be a string")
        out.append(Sentence(index=pos, nouns=tuple(nouns), text=text))
    return tuple(out)


def load_corpus(path) -> Corpus:
    """Read a newline-delimited JSON corpus; errors carry file:line context."""
    records = []
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            where = f"{path}:{line_no}"
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"{where}: invalid JSON ({exc.msg})") from exc
            if not isinstance(obj, dict):
                raise ParseError(f"{where}: record must be an object")
            doc_id = obj.get("id")
            if not isinstance(doc_id, str) or not doc_id:
                raise ParseError(f"{where}: 'id' must be a non-empty string")
            label = obj.get("label")
            if label is not None and not (type(label) is int or isinstance(label, str)):
                raise ParseError(f"{where}: 'label' must be a string, integer, or null")
            sentences = _parse_sentences(obj.get("sentences"), where)
            records.append((line_no, doc_id, label, sentences))

    seen: dict[str, int] = {}
    for line_no, doc_id, _, _ in records:
        if doc_id in seen:
            raise ValidationError(
                f"{path}:{line_no}: duplicate document id '{doc_id}' (first at line {seen[doc_id]})"
            )
        seen[doc_id] = line_no

    mapping, names = _assign_labels(
        [(pos, label) for pos, (_, _, label, _) in enumerate(records)], str(path)
    )
    docs = tuple(
        Document(id=doc_id, label=mapping.get(pos), sentences=sentences)
        for pos, (_, doc_id, _, sentences) in enumerate(records)
    )
    return Corpus(documents=docs, label_names=names)


def dump_corpus(corpus: Corpus) -> str:
    """Inverse of load_corpus up to label spelling; reloading gives an equal Corpus."""
    lines = []
    for doc in corpus.documents:
        sentences = []
        for s in doc.sentences:
            item: dict = {"nouns": list(s.nouns)}
            if s.text is not None:
                item["text"] = s.text
            sentences.append(item)
        label = None if doc.label is None else corpus.label_names[doc.label]
        lines.append(json.dumps({"id": doc.id, "label": label, "sentences": sentences}, ensure_ascii=False))
    return "\n".join(lines) + ("\n" if lines else "")


@dataclass(frozen=True)
class EmbeddingTable:
    """Token -> vector table; lookups never fabricate vectors for unseen tokens."""

    dimension: int
    entries: Mapping[str, np.ndarray]

    def lookup(self, token: str) -> Optional[np.ndarray]:
        return self.entries.get(token)

    def __contains__(self, token: str) -> bool:
        return token in self.entries

    def __len__(self) -> int:
        return len(self.entries)


def load_embeddings(path) -> EmbeddingTable:
    """Read whitespace-separated vectors; the first line fixes the dimension."""
    entries: dict[str, np.ndarray] = {}
    dimension = None
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            parts = line.split()
            if not parts:
                continue
            token, values = parts[0], parts[1:]
            if not values:
                raise ParseError(f"{path}:{line_no}: no vector components")
            if dimension is None:
                dimension = len(values)
            elif len(values) != dimension:
                raise ParseError(
                    f"{path}:{line_no}: expected {dimension} components, got {len(values)}"
                )
            try:
                vec = np.array([float(v) for v in values], dtype=np.float64)
            except ValueError as exc:
                raise ParseError(f"{path}:{line_no}: non-numeric component") from exc
            vec.setflags(write=False)
            entries[token] = vec
    if dimension is None:
        raise ParseError(f"{path}: empty embedding file")
    return EmbeddingTable(dimension=dimension, entries=entries)


def dump_embeddings(table: EmbeddingTable) -> str:
    lines = [
        token + " " + " ".join(repr(float(x)) for x in vec)
        for token, vec in table.entries.items()
    ]
    return "\n".join(lines) + ("\n" if lines else "")


@dataclass(frozen=True)
class FeatureMatrix:
    """Per-document dense feature rows of a single shared dimension."""

    dimension: int
    rows: Mapping[str, np.ndarray]

    def __contains__(self, doc_id: str) -> bool:
        return doc_id in self.rows

    def __len__(self) -> int:
        return len(self.rows)


def load_features(path) -> FeatureMatrix:
    rows: dict[str, np.ndarray] = {}
    dimension = None
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            where = f"{path}:{line_no}"
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"{where}: invalid JSON ({exc.msg})") from exc
            doc_id = obj.get("id")
            feature = obj.get("feature")
            if not isinstance(doc_id, str) or not doc_id:
                raise ParseError(f"{where}: 'id' must be a non-empty string")
            if not isinstance(feature, list) or not all(
                isinstance(x, (int, float)) and not isinstance(x, bool) for x in feature
            ):
                raise ParseError(f"{where}: 'feature' must be a list of numbers")
            if doc_id in rows:
                raise ValidationError(f"{where}: duplicate feature row for '{doc_id}'")
            if dimension is None:
                dimension = len(feature)
            elif len(feature) != dimension:
                raise ValidationError(
                    f"{where}: feature length {len(feature)} != {dimension}"
                )
            vec = np.array(feature, dtype=np.float64)
            vec.setflags(write=False)
            rows[doc_id] = vec
    if dimension is None:
        raise ParseError(f"{path}: empty feature file")
    return FeatureMatrix(dimension=dimension, rows=rows)


def dump_features(features: FeatureMatrix) -> str:
    lines = [
        json.dumps({"id": doc_id, "feature": [float(x) for x in vec]})
        for doc_id, vec in features.rows.items()
    ]
    return "\n".join(lines) + ("\n" if lines else "")


@dataclass(frozen=True)
class FoldPlan:
    """Cross-validation split: per fold, (train_ids, test_ids)."""

    folds: tuple[tuple[tuple[str, ...], tuple[str, ...]], ...]
    seed: int


def make_folds(
    ids: Sequence[str],
    n_folds: int,
    seed: int,
    *,
    stratify_labels: Optional[Mapping[str, int]] = None,
) -> FoldPlan:
    """Shuffle ids with random.Random(seed) (Mersenne Twister) and partition.

    Default mode slices the shuffled list into near-equal contiguous test
    chunks (the first len % n_folds chunks get one extra id). With
    stratify_labels, ids are grouped by label and dealt round-robin so each
    fold keeps roughly the corpus class ratio.
    """
    ids = list(ids)
    if n_folds < 2:
        raise ValidationError(f"n_folds must be >= 2, got {n_folds}")
    if n_folds > len(ids):
        raise ValidationError(f"n_folds={n_folds} exceeds corpus size {len(ids)}")
    if len(set(ids)) != len(ids):
        raise ValidationError("duplicate ids in fold input")

    rng = random.Random(seed)
    test_sets: list[list[str]] = [[] for _ in range(n_folds)]
    if stratify_labels is None:
        order = list(ids)
        rng.shuffle(order)
        base, extra = divmod(len(order), n_folds)
        start = 0
        for fold in range(n_folds):
            size = base + (1 if fold < extra else 0)
            test_sets[fold] = order[start : start + size]
            start += size
    else:
        missing = [i for i in ids if i not in stratify_labels]
        if missing:
            raise ValidationError(f"no label for id '{missing[0]}' in stratified mode")
        groups: dict[int, list[str]] = {}
        for doc_id in ids:
            groups.setdefault(stratify_labels[doc_id], []).append(doc_id)
        slot = 0
        for label in sorted(groups):
            members = groups[label]
            rng.shuffle(members)
            for doc_id in members:
                test_sets[slot % n_folds].append(doc_id)
                slot += 1
        order = [doc_id for chunk in test_sets for doc_id in chunk]

    folds = []
    for fold in range(n_folds):
        test = test_sets[fold]
        in_test = set(test)
        train = tuple(i for i in order if i not in in_test)
        folds.append((train, tuple(test)))
    return FoldPlan(folds=tuple(folds), seed=seed)


def fold_plan_records(plan: FoldPlan) -> list[dict]:
    """Audit-friendly rows: one object per fold, seed embedded in each."""
    return [
        {"fold": i, "seed": plan.seed, "train": list(train), "test": list(test)}
        for i, (train, test) in enumerate(plan.folds)
    ]
