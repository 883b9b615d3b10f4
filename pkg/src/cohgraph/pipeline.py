"""Cross-validated training, inductive evaluation, and corpus analysis.

Test documents are scored one at a time: each is attached to the training
graph as an extra unlabeled node, the propagation matrix is re-normalized,
and a single forward pass yields its prediction. Training entries of the
adjacency are never recomputed, so no test information leaks backwards.
"""

from __future__ import annotations

import bisect
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np

from . import gcn
from .census import CensusConfig, Signature, SubgraphSet, mine_subgraphs
from .config import RunConfig
from .corpus import Document, EmbeddingTable, FeatureMatrix, make_folds
from .errors import ValidationError
from .hetgraph import attach_document, build_hetero_graph, build_vocabulary, normalize
from .sentgraph import build_sentence_graph

logger = logging.getLogger(__name__)

# Per-fold training seed; the prime keeps distinct (seed, fold) pairs distinct.
_FOLD_SEED_STRIDE = 100003


@dataclass(frozen=True)
class FoldResult:
    fold: int
    doc_ids: tuple[str, ...]
    golds: tuple[int, ...]
    predictions: tuple[int, ...]
    accuracy: float
    macro_f1: float
    confusion: tuple[tuple[int, ...], ...]
    history: tuple[tuple[int, float, float], ...] = ()


@dataclass(frozen=True)
class CvReport:
    folds: tuple[FoldResult, ...]
    mean_accuracy: float
    std_accuracy: float
    mean_macro_f1: float
    std_macro_f1: float
    n_classes: int
    label_names: tuple[str, ...]
    config: dict


def metrics(
    predictions: Sequence[int], golds: Sequence[int], n_classes: int
) -> tuple[float, float, tuple[tuple[int, ...], ...]]:
    """Accuracy, macro-F1 (absent classes contribute 0), and confusion counts.

    confusion[gold][predicted]; rows sum to the per-class gold counts.
    """
    preds = list(predictions)
    gold = list(golds)
    if not preds:
        raise ValidationError("metrics need at least one prediction")
    if len(preds) != len(gold):
        raise ValidationError(f"{len(preds)} predictions vs {len(gold)} golds")
    for value in preds + gold:
        if not 0 <= value < n_classes:
            raise ValidationError(f"class index {value} outside 0..{n_classes - 1}")

    confusion = [[0] * n_classes for _ in range(n_classes)]
    for g, p in zip(gold, preds):
        confusion[g][p] += 1
    accuracy = sum(confusion[c][c] for c in range(n_classes)) / len(preds)

    f1_sum = 0.0
    for c in range(n_classes):
        tp = confusion[c][c]
        fp = sum(confusion[g][c] for g in range(n_classes)) - tp
        fn = sum(confusion[c]) - tp
        precision = tp / (tp + fp) if tp + fp > 0 else 0.0
        recall = tp / (tp + fn) if tp + fn > 0 else 0.0
        if precision + recall > 0:
            f1_sum += 2 * precision * recall / (precision + recall)
    macro_f1 = f1_sum / n_classes
    return accuracy, macro_f1, tuple(tuple(row) for row in confusion)


def _subgraph_set(
    doc: Document,
    embeddings: Optional[EmbeddingTable],
    cfg: RunConfig,
    precomputed: Optional[Mapping[str, SubgraphSet]],
) -> SubgraphSet:
    if precomputed is not None and doc.id in precomputed:
        sset = precomputed[doc.id]
        if sset.k != cfg.k:
            raise ValidationError(
                f"cached census for '{doc.id}' has k={sset.k}, config wants k={cfg.k}"
            )
        return sset
    if embeddings is None:
        raise ValidationError(f"no embeddings and no cached census for '{doc.id}'")
    graph = build_sentence_graph(doc, embeddings, cfg.delta)
    return mine_subgraphs(graph, CensusConfig(k=cfg.k, w=cfg.w, mode=cfg.census_mode))


def _check_inputs(
    train_docs: Sequence[Document],
    test_docs: Sequence[Document],
    features: FeatureMatrix,
) -> None:
    if not train_docs or not test_docs:
        raise ValidationError("both train and test splits must be non-empty")
    for doc in list(train_docs) + list(test_docs):
        if doc.label is None:
            raise ValidationError(f"document '{doc.id}' has no label")
        if doc.id not in features:
            raise ValidationError(f"no feature row for document '{doc.id}'")


def run_fold(
    train_docs: Sequence[Document],
    test_docs: Sequence[Document],
    embeddings: Optional[EmbeddingTable],
    features: FeatureMatrix,
    cfg: RunConfig,
    *,
    n_classes: Optional[int] = None,
    fold_index: int = 0,
    precomputed_sets: Optional[Mapping[str, SubgraphSet]] = None,
) -> FoldResult:
    """Train on the train split, then score each test document inductively."""
    _check_inputs(train_docs, test_docs, features)
    if n_classes is None:
        n_classes = max(2, max(d.label for d in list(train_docs) + list(test_docs)) + 1)

    train_cfg = gcn.TrainConfig(
        hidden_dim=cfg.hidden_dim,
        learning_rate=cfg.learning_rate,
        epochs=cfg.epochs,
        seed=cfg.seed * _FOLD_SEED_STRIDE + fold_index,
        dropout_rate=cfg.dropout,
    )
    n_train = len(train_docs)

    if cfg.baseline:
        # Identity propagation over document rows only; pattern nodes carry
        # zero features and cannot influence document rows, so dropping them
        # changes nothing about the classifier.
        x = np.stack([features.rows[d.id] for d in train_docs])
        prop = np.eye(n_train, dtype=np.float64)
        labels = np.array([d.label for d in train_docs], dtype=np.intp)
        model, history = gcn.train(prop, x, labels, range(n_train), n_classes, train_cfg)
        predictions = []
        for doc in test_docs:
            _, probs = gcn.baseline_forward(model, features.rows[doc.id][np.newaxis, :])
            predictions.append(int(np.argmax(probs[0])))
    else:
        train_sets = {
            d.id: _subgraph_set(d, embeddings, cfg, precomputed_sets) for d in train_docs
        }
        vocab = build_vocabulary(train_sets)
        het = build_hetero_graph(
            vocab,
            train_sets,
            doc_subgraph_edges=cfg.doc_subgraph_edges,
            subgraph_edges=cfg.subgraph_edges,
        )
        prop = normalize(het)
        n_patterns = het.n_subgraphs
        x = np.zeros((n_train + n_patterns, features.dimension), dtype=np.float64)
        for i, doc in enumerate(train_docs):
            x[i] = features.rows[doc.id]
        labels = np.full(n_train + n_patterns, -1, dtype=np.intp)
        labels[:n_train] = [d.label for d in train_docs]
        model, history = gcn.train(prop, x, labels, range(n_train), n_classes, train_cfg)

        predictions = []
        for doc in test_docs:
            sset = _subgraph_set(doc, embeddings, cfg, precomputed_sets)
            het_t = attach_document(
                het, vocab, sset, doc.id, doc_subgraph_edges=cfg.doc_subgraph_edges
            )
            prop_t = normalize(het_t)
            x_t = np.insert(x, n_train, features.rows[doc.id], axis=0)
            _, probs = gcn.forward(model, prop_t, x_t)
            predictions.append(int(np.argmax(probs[n_train])))

    golds = [d.label for d in test_docs]
    accuracy, macro_f1, confusion = metrics(predictions, golds, n_classes)
    return FoldResult(
        fold=fold_index,
        doc_ids=tuple(d.id for d in test_docs),
        golds=tuple(golds),
        predictions=tuple(predictions),
        accuracy=accuracy,
        macro_f1=macro_f1,
        confusion=confusion,
        history=tuple(history),
    )


def _fold_task(args) -> FoldResult:
    (fold_index, train_docs, test_docs, embeddings, features, cfg, n_classes, pre) = args
    return run_fold(
        train_docs,
        test_docs,
        embeddings,
        features,
        cfg,
        n_classes=n_classes,
        fold_index=fold_index,
        precomputed_sets=pre,
    )


def cross_validate(
    docs,
    embeddings: Optional[EmbeddingTable],
    features: FeatureMatrix,
    cfg: RunConfig,
    *,
    workers: int = 1,
    precomputed_sets: Optional[Mapping[str, SubgraphSet]] = None,
) -> CvReport:
    """Seeded k-fold cross-validation; identical config gives identical output.

    Folds are independent, so workers > 1 runs them in separate processes;
    results are reassembled in fold order either way.
    """
    label_names = tuple(getattr(docs, "label_names", ()))
    doc_list = list(docs)
    if not doc_list:
        raise ValidationError("empty corpus")
    for doc in doc_list:
        if doc.label is None:
            raise ValidationError(f"document '{doc.id}' has no label")
    n_classes = max(2, len(label_names), max(d.label for d in doc_list) + 1)

    plan = make_folds([d.id for d in doc_list], cfg.folds, cfg.seed)
    by_id = {d.id: d for d in doc_list}
    tasks = [
        (
            fold_index,
            [by_id[i] for i in train_ids],
            [by_id[i] for i in test_ids],
            embeddings,
            features,
            cfg,
            n_classes,
            precomputed_sets,
        )
        for fold_index, (train_ids, test_ids) in enumerate(plan.folds)
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            folds = list(pool.map(_fold_task, tasks))
    else:
        folds = [_fold_task(task) for task in tasks]

    accuracies = np.array([f.accuracy for f in folds])
    f1s = np.array([f.macro_f1 for f in folds])
    return CvReport(
        folds=tuple(folds),
        mean_accuracy=float(accuracies.mean()),
        std_accuracy=float(accuracies.std()),  # population std, ddof=0
        mean_macro_f1=float(f1s.mean()),
        std_macro_f1=float(f1s.std()),
        n_classes=n_classes,
        label_names=label_names,
        config=cfg.to_dict(),
    )


def report_dict(report: CvReport) -> dict:
    """JSON form of a report; per-epoch histories stay in their CSV artifacts."""
    return {
        "config": report.config,
        "n_classes": report.n_classes,
        "label_names": list(report.label_names),
        "folds": [
            {
                "fold": f.fold,
                "accuracy": f.accuracy,
                "macro_f1": f.macro_f1,
                "confusion": [list(row) for row in f.confusion],
                "predictions": [
                    {"id": doc_id, "gold": g, "predicted": p}
                    for doc_id, g, p in zip(f.doc_ids, f.golds, f.predictions)
                ],
            }
            for f in report.folds
        ],
        "mean_accuracy": report.mean_accuracy,
        "std_accuracy": report.std_accuracy,
        "mean_macro_f1": report.mean_macro_f1,
        "std_macro_f1": report.std_macro_f1,
    }


def report_to_json(report: CvReport) -> str:
    return json.dumps(report_dict(report), sort_keys=True, indent=2) + "\n"


def fold_records(report: CvReport) -> list[dict]:
    """Newline-delimited form: one object per fold, then one summary object."""
    rows: list[dict] = [
        {
            "fold": f.fold,
            "accuracy": f.accuracy,
            "macro_f1": f.macro_f1,
            "confusion": [list(row) for row in f.confusion],
            "test_ids": list(f.doc_ids),
        }
        for f in report.folds
    ]
    rows.append(
        {
            "summary": {
                "mean_accuracy": report.mean_accuracy,
                "std_accuracy": report.std_accuracy,
                "mean_macro_f1": report.mean_macro_f1,
                "std_macro_f1": report.std_macro_f1,
                "n_classes": report.n_classes,
            },
            "config": report.config,
        }
    )
    return rows


def render_report_table(report: CvReport) -> str:
    lines = ["fold  accuracy  macro_f1  test_docs"]
    for f in report.folds:
        lines.append(f"{f.fold:>4}  {f.accuracy:8.4f}  {f.macro_f1:8.4f}  {len(f.doc_ids):>9}")
    lines.append(
        f"mean  {report.mean_accuracy:8.4f}  {report.mean_macro_f1:8.4f}"
        f"  (std {report.std_accuracy:.4f} / {report.std_macro_f1:.4f})"
    )
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class CorrelationEntry:
    signature: Signature
    class_index: int
    r: float
    p_value: float
    support: int  # documents containing the pattern
    class_size: int  # documents whose gold label is class_index


def correlation_analysis(
    subgraph_sets: Mapping[str, SubgraphSet],
    labels: Mapping[str, int],
    n_classes: int,
    *,
    feature: str = "normalized",
    permutations: int = 10000,
    seed: int = 0,
) -> list[CorrelationEntry]:
    """Pearson correlation of per-document pattern features vs class indicators.

    p-values come from a seeded permutation test: the count of permuted
    |r| values at or above the observed |r| over `permutations` draws, with
    +1 smoothing on both numerator and denominator. Zero-variance features
    are skipped with a log note; the indicator itself has zero variance only
    when a class is absent or universal, which skips that class the same way.
    """
    if feature not in ("normalized", "count", "presence"):
        raise ValidationError(f"unknown correlation feature {feature!r}")
    if permutations < 1:
        raise ValidationError("permutations must be >= 1")
    doc_ids = list(subgraph_sets)
    if not doc_ids:
        raise ValidationError("correlation analysis needs at least one document")
    for doc_id in doc_ids:
        if doc_id not in labels:
            raise ValidationError(f"document '{doc_id}' has no label")
        if not 0 <= labels[doc_id] < n_classes:
            raise ValidationError(f"label of '{doc_id}' outside 0..{n_classes - 1}")

    union: set[Signature] = set()
    for sset in subgraph_sets.values():
        union.update(sset.counts)
    signatures = sorted(union)
    n = len(doc_ids)

    x = np.zeros((n, len(signatures)), dtype=np.float64)
    for row, doc_id in enumerate(doc_ids):
        sset = subgraph_sets[doc_id]
        total = sset.total()
        for col, sig in enumerate(signatures):
            count = sset.counts.get(sig, 0)
            if feature == "presence":
                x[row, col] = 1.0 if count else 0.0
            elif feature == "count":
                x[row, col] = count
            else:
                x[row, col] = count / total if total else 0.0

    presence = np.zeros(len(signatures), dtype=np.intp)
    for col, sig in enumerate(signatures):
        presence[col] = sum(1 for s in subgraph_sets.values() if sig in s.counts)

    x_centered = x - x.mean(axis=0)
    sx = np.sqrt((x_centered * x_centered).sum(axis=0))
    usable = sx > 0.0
    for col in np.flatnonzero(~usable):
        logger.info("skipping zero-variance pattern %s", signatures[col].encode())

    gold = np.array([labels[d] for d in doc_ids], dtype=np.intp)
    rng = np.random.default_rng(seed)
    entries: list[CorrelationEntry] = []
    for class_index in range(n_classes):
        y = (gold == class_index).astype(np.float64)
        class_size = int(y.sum())
        y_centered = y - y.mean()
        sy = float(np.sqrt((y_centered * y_centered).sum()))
        # Permutations are drawn whether or not the class is usable, keeping
        # the generator stream independent of which entries get skipped.
        perm_index = np.argsort(rng.random((permutations, n)), axis=1)
        if sy == 0.0:
            logger.info("skipping class %d: constant indicator", class_index)
            continue
        # Zero-variance columns divide to nan here; they are filtered below.
        with np.errstate(invalid="ignore", divide="ignore"):
            r = (x_centered.T @ y_centered) / (sx * sy)
            y_perm_centered = y[perm_index] - y.mean()
            r_perm = (x_centered.T @ y_perm_centered.T) / (sx[:, np.newaxis] * sy)
        at_least = (np.abs(r_perm) >= np.abs(r)[:, np.newaxis]).sum(axis=1)
        p_values = (at_least + 1) / (permutations + 1)
        for col in np.flatnonzero(usable):
            entries.append(
                CorrelationEntry(
                    signature=signatures[col],
                    class_index=class_index,
                    r=float(r[col]),
                    p_value=float(p_values[col]),
                    support=int(presence[col]),
                    class_size=class_size,
                )
            )

    entries.sort(key=lambda e: (e.class_index, -e.r, e.signature))
    return entries


def correlation_records(entries: Sequence[CorrelationEntry]) -> list[dict]:
    return [
        {
            "signature": e.signature.encode(),
            "pattern": e.signature.describe(),
            "class": e.class_index,
            "r": e.r,
            "p_value": e.p_value,
            "support": e.support,
            "class_size": e.class_size,
        }
        for e in entries
    ]


def render_correlation_table(entries: Sequence[CorrelationEntry]) -> str:
    lines = ["class  r        p_value   support  signature"]
    for e in entries:
        lines.append(
            f"{e.class_index:>5}  {e.r:+.4f}  {e.p_value:8.6f}  {e.support:>7}  {e.signature.encode()}"
            f"  {e.signature.describe()}"
        )
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class BucketRow:
    low: int
    high: Optional[int]  # None marks the open-ended last bucket
    count: int
    accuracy: Optional[float]


@dataclass(frozen=True)
class DiagnosticsReport:
    predicted_histogram: tuple[int, ...]
    per_class_accuracy: tuple[Optional[float], ...]
    length_buckets: tuple[BucketRow, ...]


def diagnostics(
    fold_results: Sequence[FoldResult],
    docs,
    n_classes: int,
    bucket_edges: Sequence[int] = (100, 200, 300, 400),
) -> DiagnosticsReport:
    """Prediction histogram, per-class accuracy, and accuracy by document length."""
    edges = list(bucket_edges)
    if edges != sorted(edges) or len(set(edges)) != len(edges):
        raise ValidationError(f"bucket edges must be strictly increasing, got {edges}")
    lengths = {d.id: d.word_count() for d in docs}

    histogram = [0] * n_classes
    class_total = [0] * n_classes
    class_correct = [0] * n_classes
    bucket_total = [0] * (len(edges) + 1)
    bucket_correct = [0] * (len(edges) + 1)
    for result in fold_results:
        for doc_id, g, p in zip(result.doc_ids, result.golds, result.predictions):
            if doc_id not in lengths:
                raise ValidationError(f"prediction for unknown document '{doc_id}'")
            histogram[p] += 1
            class_total[g] += 1
            class_correct[g] += int(g == p)
            bucket = bisect.bisect_left(edges, lengths[doc_id])
            bucket_total[bucket] += 1
            bucket_correct[bucket] += int(g == p)

    per_class = tuple(
        class_correct[c] / class_total[c] if class_total[c] else None
        for c in range(n_classes)
    )
    rows = []
    for b in range(len(edges) + 1):
        low = 0 if b == 0 else edges[b - 1] + 1
        high = edges[b] if b < len(edges) else None
        accuracy = bucket_correct[b] / bucket_total[b] if bucket_total[b] else None
        rows.append(BucketRow(low=low, high=high, count=bucket_total[b], accuracy=accuracy))
    return DiagnosticsReport(
        predicted_histogram=tuple(histogram),
        per_class_accuracy=per_class,
        length_buckets=tuple(rows),
    )


def diagnostics_dict(report: DiagnosticsReport) -> dict:
    return {
        "predicted_histogram": list(report.predicted_histogram),
        "per_class_accuracy": list(report.per_class_accuracy),
        "length_buckets": [
            {"low": b.low, "high": b.high, "count": b.count, "accuracy": b.accuracy}
            for b in report.length_buckets
        ],
    }


def render_diagnostics_table(report: DiagnosticsReport) -> str:
    lines = ["predicted-class histogram: " + ", ".join(
        f"{c}:{n}" for c, n in enumerate(report.predicted_histogram)
    )]
    lines.append("per-class accuracy:")
    for c, acc in enumerate(report.per_class_accuracy):
        lines.append(f"  class {c}: " + ("n/a" if acc is None else f"{acc:.4f}"))
    lines.append("accuracy by document length (words):")
    for b in report.length_buckets:
        span = f"{b.low}-{b.high}" if b.high is not None else f">{b.low - 1}"
        acc = "n/a" if b.accuracy is None else f"{b.accuracy:.4f}"
        lines.append(f"  {span:>9}: n={b.count:<5} acc={acc}")
    return "\n".join(lines) + "\n"
