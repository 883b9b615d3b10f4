"""Command line entry point for the raw-text bridge."""

from __future__ import annotations

import logging

import click

from . import __version__
from .convert import load_raw, preprocess
from .encode import get_document_encoder, get_word_source
from .errors import BridgeError
from .nouns import get_tagger


@click.command(name="cohbridge")
@click.version_option(version=__version__)
@click.option(
    "--input",
    "input_path",
    required=True,
    type=click.Path(exists=True),
    help="Raw-text directory (*.txt plus optional labels.tsv) or a TSV file "
    "with id, label, and text columns.",
)
@click.option(
    "--out-dir",
    required=True,
    envvar="COHBRIDGE_OUT_DIR",
    type=click.Path(file_okay=False),
    help="Directory for corpus.jsonl, features.jsonl, and embeddings.txt.",
)
@click.option(
    "--encoder",
    default="hash",
    show_default=True,
    help="Document encoder: 'hash' or the name of a locally cached transformers model.",
)
@click.option(
    "--tagger",
    default="heuristic",
    show_default=True,
    help="Noun tagger: 'heuristic', 'stanza', or 'stanza:<lang>'.",
)
@click.option(
    "--embeddings",
    "embeddings_spec",
    default="hash",
    show_default=True,
    help="Word vectors: 'hash' or 'glove:PATH'.",
)
@click.option(
    "--truncate",
    default=0,
    show_default=True,
    help="Token budget per document before encoding; 0 disables truncation.",
)
@click.option("--feature-dim", default=128, show_default=True, help="Hash document feature dimension.")
@click.option("--embed-dim", default=64, show_default=True, help="Hash word vector dimension.")
@click.option("--seed", default=0, show_default=True, help="Salt for the hash encoder and word vectors.")
def main(input_path, out_dir, encoder, tagger, embeddings_spec, truncate, feature_dim, embed_dim, seed):
    """Convert raw documents into the corpus, feature, and embedding files the
    graph pipeline reads."""
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(message)s")
    if truncate < 0:
        raise click.ClickException(f"--truncate must be >= 0, got {truncate}")
    if feature_dim < 1:
        raise click.ClickException(f"--feature-dim must be positive, got {feature_dim}")
    if embed_dim < 1:
        raise click.ClickException(f"--embed-dim must be positive, got {embed_dim}")
    salt = str(seed)
    try:
        tagger_impl = get_tagger(tagger)
        encoder_impl = get_document_encoder(encoder, dimension=feature_dim, salt=salt)
        words = get_word_source(embeddings_spec, dimension=embed_dim, salt=salt)
        docs = load_raw(input_path)
        summary = preprocess(docs, tagger_impl, encoder_impl, words, out_dir, truncate=truncate)
    except BridgeError as exc:
        raise click.ClickException(str(exc)) from exc
    click.echo(f"documents: {summary['documents']} (skipped {summary['skipped']})")
    click.echo(f"nouns: {summary['nouns']} ({summary['embedded']} embedded)")
    for name in ("corpus", "features", "embeddings"):
        click.echo(f"{name}: {summary['paths'][name]}")


if __name__ == "__main__":
    main()
