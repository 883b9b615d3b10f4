"""Command-line entry points.

The workflow is staged so that the expensive census work is cached and
reused across training configurations::

    cohgraph graphs     --corpus c.jsonl --embeddings e.txt -o out/
    cohgraph census     --graphs out/graphs.jsonl -o out/
    cohgraph train-eval --corpus c.jsonl --features f.jsonl --census out/census.jsonl -o out/
    cohgraph analyze    --corpus c.jsonl --census out/census.jsonl -o out/

Every command writes artifacts deterministically: rerunning with identical
inputs and flags produces byte-identical files. The output directory can
also come from the COHGRAPH_OUT_DIR environment variable.
"""

from __future__ import annotations

import functools
import json
import os

import click

from . import __version__, census, corpus, gcn, pipeline, sentgraph
from .config import CORRELATION_FEATURES, RunConfig
from .errors import CohgraphError


def _fail_on_package_errors(func):
    """Turn package errors into clean nonzero exits instead of tracebacks."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except CohgraphError as exc:
            raise click.ClickException(str(exc)) from exc

    return wrapper


def _out_dir_option(func):
    return click.option(
        "--out-dir",
        "-o",
        envvar="COHGRAPH_OUT_DIR",
        required=True,
        type=click.Path(file_okay=False),
        help="Output directory (or set COHGRAPH_OUT_DIR).",
    )(func)


def _write_text(path, text: str) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(text)


def _write_jsonl(path, records) -> None:
    _write_text(path, "".join(json.dumps(r, sort_keys=True) + "\n" for r in records))


def _write_meta(path, cfg: RunConfig) -> None:
    _write_text(path, json.dumps({"config": cfg.to_dict()}, sort_keys=True, indent=2) + "\n")


def _load_census_cache(path, expect_k: int) -> dict[str, census.SubgraphSet]:
    sets: dict[str, census.SubgraphSet] = {}
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            if not line.strip():
                continue
            doc_id, sset = census.census_from_record(json.loads(line))
            if sset.k != expect_k:
                raise click.ClickException(
                    f"census cache {path} was mined with k={sset.k}, run wants k={expect_k}"
                )
            sets[doc_id] = sset
    return sets


@click.group()
@click.version_option(version=__version__)
def main() -> None:
    """Structural-similarity graphs and GCN classification for documents."""


@main.command("graphs")
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--embeddings", "embeddings_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--delta", default=0.65, show_default=True, help="Similarity threshold for edges.")
@_out_dir_option
@_fail_on_package_errors
def cmd_graphs(corpus_path, embeddings_path, delta, out_dir) -> None:
    """Build per-document sentence graphs and cache them as graphs.jsonl."""
    cfg = RunConfig(
        corpus_path=corpus_path,
        embeddings_path=embeddings_path,
        out_dir=out_dir,
        delta=delta,
    ).validate()
    docs = corpus.load_corpus(corpus_path)
    table = corpus.load_embeddings(embeddings_path)
    os.makedirs(out_dir, exist_ok=True)
    records = []
    for doc in docs:
        graph = sentgraph.build_sentence_graph(doc, table, delta)
        records.append(sentgraph.graph_record(doc.id, graph))
    _write_jsonl(os.path.join(out_dir, "graphs.jsonl"), records)
    _write_meta(os.path.join(out_dir, "graphs.meta.json"), cfg)
    click.echo(f"wrote {len(records)} sentence graphs to {out_dir}/graphs.jsonl")


@main.command("census")
@click.option("--graphs", "graphs_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--k", default=4, show_default=True, help="Subgraph size.")
@click.option("--w", default=8, show_default=True, help="Window width in sentences.")
@click.option(
    "--mode",
    default="strided",
    show_default=True,
    type=click.Choice(census.MODES),
    help="strided: windows advancing by w-k+1; exhaustive: every span-limited subset.",
)
@_out_dir_option
@_fail_on_package_errors
def cmd_census(graphs_path, k, w, mode, out_dir) -> None:
    """Mine k-node pattern frequencies from cached sentence graphs."""
    cfg = RunConfig(out_dir=out_dir, k=k, w=w, census_mode=mode).validate()
    census_cfg = census.CensusConfig(k=k, w=w, mode=mode)
    records = []
    with open(graphs_path, encoding="utf-8") as handle:
        for line in handle:
            if not line.strip():
                continue
            doc_id, graph = sentgraph.graph_from_record(json.loads(line))
            sset = census.mine_subgraphs(graph, census_cfg)
            records.append(census.census_record(doc_id, sset))
    os.makedirs(out_dir, exist_ok=True)
    _write_jsonl(os.path.join(out_dir, "census.jsonl"), records)
    _write_meta(os.path.join(out_dir, "census.meta.json"), cfg)
    click.echo(f"wrote {len(records)} census rows to {out_dir}/census.jsonl")


def _train_flags(func):
    decorators = [
        click.option("--delta", default=0.65, show_default=True),
        click.option("--k", default=4, show_default=True),
        click.option("--w", default=8, show_default=True),
        click.option("--mode", "census_mode", default="strided", show_default=True,
                     type=click.Choice(census.MODES)),
        click.option("--hidden-dim", default=240, show_default=True),
        click.option("--dropout", default=0.5, show_default=True),
        click.option("--learning-rate", default=0.01, show_default=True),
        click.option("--epochs", default=160, show_default=True),
        click.option("--folds", default=10, show_default=True),
        click.option("--seed", default=0, show_default=True),
        click.option("--workers", default=1, show_default=True,
                     help="Process-parallel folds; results identical at any value."),
        click.option("--baseline", is_flag=True,
                     help="Identity propagation over document features only."),
        click.option("--no-doc-edges", "doc_edges", flag_value=False, default=True,
                     help="Ablation: drop document-pattern edges."),
        click.option("--no-pattern-edges", "pattern_edges", flag_value=False, default=True,
                     help="Ablation: drop pattern-pattern edges."),
    ]
    for decorator in reversed(decorators):
        func = decorator(func)
    return func


@main.command("train-eval")
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--features", "features_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--embeddings", "embeddings_path", type=click.Path(exists=True, dir_okay=False),
              help="Needed unless --census provides cached counts or --baseline is set.")
@click.option("--census", "census_path", type=click.Path(exists=True, dir_okay=False),
              help="Cached census.jsonl to reuse instead of mining again.")
@_train_flags
@_out_dir_option
@_fail_on_package_errors
def cmd_train_eval(
    corpus_path, features_path, embeddings_path, census_path,
    delta, k, w, census_mode, hidden_dim, dropout, learning_rate, epochs,
    folds, seed, workers, baseline, doc_edges, pattern_edges, out_dir,
) -> None:
    """Cross-validated training with inductive per-document evaluation."""
    cfg = RunConfig(
        corpus_path=corpus_path,
        embeddings_path=embeddings_path,
        features_path=features_path,
        out_dir=out_dir,
        delta=delta,
        k=k,
        w=w,
        census_mode=census_mode,
        hidden_dim=hidden_dim,
        dropout=dropout,
        learning_rate=learning_rate,
        epochs=epochs,
        folds=folds,
        seed=seed,
        doc_subgraph_edges=doc_edges,
        subgraph_edges=pattern_edges,
        baseline=baseline,
        workers=workers,
    ).validate()
    if not baseline and census_path is None and embeddings_path is None:
        raise click.UsageError("provide --embeddings or --census (or use --baseline)")

    docs = corpus.load_corpus(corpus_path)
    features = corpus.load_features(features_path)
    table = corpus.load_embeddings(embeddings_path) if embeddings_path else None
    cached = _load_census_cache(census_path, k) if census_path else None

    report = pipeline.cross_validate(
        docs, table, features, cfg, workers=workers, precomputed_sets=cached
    )
    os.makedirs(out_dir, exist_ok=True)
    _write_text(os.path.join(out_dir, "cv_report.json"), pipeline.report_to_json(report))
    _write_jsonl(os.path.join(out_dir, "cv_report.jsonl"), pipeline.fold_records(report))
    table_text = (
        "config: " + json.dumps(report.config, sort_keys=True) + "\n"
        + pipeline.render_report_table(report)
    )
    _write_text(os.path.join(out_dir, "cv_report.txt"), table_text)
    plan = corpus.make_folds([d.id for d in docs], folds, seed)
    _write_jsonl(os.path.join(out_dir, "fold_plan.jsonl"), corpus.fold_plan_records(plan))
    config_comment = "config: " + json.dumps(report.config, sort_keys=True)
    for fold in report.folds:
        gcn.write_history_csv(
            os.path.join(out_dir, f"history_fold{fold.fold}.csv"),
            fold.history,
            header_comment=config_comment,
        )
    click.echo(pipeline.render_report_table(report), nl=False)


@main.command("analyze")
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--census", "census_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--embeddings", "embeddings_path", type=click.Path(exists=True, dir_okay=False),
              help="Needed when no --census cache is given.")
@click.option("--report", "report_path", type=click.Path(exists=True, dir_okay=False),
              help="cv_report.json for prediction diagnostics.")
@click.option("--delta", default=0.65, show_default=True)
@click.option("--k", default=4, show_default=True)
@click.option("--w", default=8, show_default=True)
@click.option("--mode", "census_mode", default="strided", show_default=True,
              type=click.Choice(census.MODES))
@click.option("--feature", default="normalized", show_default=True,
              type=click.Choice(CORRELATION_FEATURES),
              help="Pattern feature used for correlations.")
@click.option("--permutations", default=10000, show_default=True)
@click.option("--seed", default=0, show_default=True)
@_out_dir_option
@_fail_on_package_errors
def cmd_analyze(
    corpus_path, census_path, embeddings_path, report_path, delta, k, w,
    census_mode, feature, permutations, seed, out_dir,
) -> None:
    """Pattern-class correlations, plus diagnostics when a report is given."""
    cfg = RunConfig(
        corpus_path=corpus_path,
        embeddings_path=embeddings_path,
        out_dir=out_dir,
        delta=delta,
        k=k,
        w=w,
        census_mode=census_mode,
        correlation_feature=feature,
        permutations=permutations,
        seed=seed,
    ).validate()
    docs = corpus.load_corpus(corpus_path)
    if census_path:
        sets = _load_census_cache(census_path, k)
        missing = [d.id for d in docs if d.id not in sets]
        if missing:
            raise click.ClickException(f"census cache lacks document '{missing[0]}'")
        sets = {d.id: sets[d.id] for d in docs}
    else:
        if not embeddings_path:
            raise click.UsageError("provide --embeddings or --census")
        table = corpus.load_embeddings(embeddings_path)
        census_cfg = census.CensusConfig(k=k, w=w, mode=census_mode)
        sets = {
            d.id: census.mine_subgraphs(
                sentgraph.build_sentence_graph(d, table, delta), census_cfg
            )
            for d in docs
        }

    labels = {d.id: d.label for d in docs}
    unlabeled = [i for i, v in labels.items() if v is None]
    if unlabeled:
        raise click.ClickException(f"document '{unlabeled[0]}' has no label")
    n_classes = max(2, len(docs.label_names), max(labels.values()) + 1)

    entries = pipeline.correlation_analysis(
        sets, labels, n_classes, feature=feature, permutations=permutations, seed=seed
    )
    os.makedirs(out_dir, exist_ok=True)
    rows = pipeline.correlation_records(entries)
    rows.append({"config": cfg.to_dict()})
    _write_jsonl(os.path.join(out_dir, "correlations.jsonl"), rows)
    _write_text(
        os.path.join(out_dir, "correlations.txt"),
        "config: " + json.dumps(cfg.to_dict(), sort_keys=True) + "\n"
        + pipeline.render_correlation_table(entries),
    )

    if report_path:
        with open(report_path, encoding="utf-8") as handle:
            saved = json.load(handle)
        fold_results = [
            pipeline.FoldResult(
                fold=f["fold"],
                doc_ids=tuple(p["id"] for p in f["predictions"]),
                golds=tuple(p["gold"] for p in f["predictions"]),
                predictions=tuple(p["predicted"] for p in f["predictions"]),
                accuracy=f["accuracy"],
                macro_f1=f["macro_f1"],
                confusion=tuple(tuple(row) for row in f["confusion"]),
            )
            for f in saved["folds"]
        ]
        diag = pipeline.diagnostics(fold_results, docs, saved["n_classes"])
        payload = {"config": cfg.to_dict(), "diagnostics": pipeline.diagnostics_dict(diag)}
        _write_text(
            os.path.join(out_dir, "diagnostics.json"),
            json.dumps(payload, sort_keys=True, indent=2) + "\n",
        )
        _write_text(
            os.path.join(out_dir, "diagnostics.txt"),
            "config: " + json.dumps(cfg.to_dict(), sort_keys=True) + "\n"
            + pipeline.render_diagnostics_table(diag),
        )
    click.echo(f"wrote {len(entries)} correlation entries to {out_dir}/correlations.jsonl")


if __name__ == "__main__":
    main()
