"""Raw text in, pipeline-ready corpus, feature, and embedding files out.

Input is either a directory of *.txt files (id = file stem, labels from an
optional labels.tsv) or a single TSV with id, label, and text columns.
Documents whose text is empty or yields no sentences are skipped with a
warning; everything that survives produces exactly one corpus record and
one feature row. The embedding file covers exactly the lowercased nouns
occurring in the emitted corpus and nothing else.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional

from .errors import InputError

logger = logging.getLogger("cohbridge")

CORPUS_FILE = "corpus.jsonl"
FEATURES_FILE = "features.jsonl"
EMBEDDINGS_FILE = "embeddings.txt"


@dataclass(frozen=True)
class RawDocument:
    """One unprocessed input document; text must not be blank."""

    id: str
    text: str
    label: Optional[str] = None

    def __post_init__(self):
        if not self.id:
            raise InputError("document id must be non-empty")
        if not self.text.strip():
            raise InputError(f"document '{self.id}' has empty text")


def _read_labels(path: Path) -> dict[str, str]:
    if not path.is_file():
        return {}
    labels: dict[str, str] = {}
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            parts = line.rstrip("\n").split("\t")
            if len(parts) != 2 or not parts[0] or not parts[1]:
                raise InputError(f"{path}:{line_no}: expected 'id<TAB>label'")
            labels[parts[0]] = parts[1]
    return labels


def read_text_dir(path) -> list[RawDocument]:
    """One document per *.txt file; an optional labels.tsv supplies labels."""
    root = Path(path)
    files = sorted(root.glob("*.txt"))
    if not files:
        raise InputError(f"no *.txt files found under '{root}'")
    labels = _read_labels(root / "labels.tsv")
    docs = []
    for file in files:
        text = file.read_text(encoding="utf-8")
        if not text.strip():
            logger.warning("skipping '%s': file is empty", file.name)
            continue
        docs.append(RawDocument(id=file.stem, text=text, label=labels.get(file.stem)))
    for unknown in sorted(set(labels) - {f.stem for f in files}):
        logger.warning("labels.tsv names unknown document '%s'", unknown)
    return docs


def read_tsv(path) -> list[RawDocument]:
    """One document per line: id, label, text; an empty label means unlabeled."""
    docs = []
    seen_line = False
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            seen_line = True
            parts = line.rstrip("\n").split("\t", 2)
            if len(parts) != 3 or not parts[0]:
                raise InputError(f"{path}:{line_no}: expected 'id<TAB>label<TAB>text'")
            doc_id, label, text = parts
            if not text.strip():
                logger.warning("skipping '%s' (%s:%d): text is empty", doc_id, path, line_no)
                continue
            docs.append(RawDocument(id=doc_id, text=text, label=label or None))
    if not seen_line:
        raise InputError(f"'{path}' contains no documents")
    return docs


def load_raw(path) -> list[RawDocument]:
    p = Path(path)
    if p.is_dir():
        return read_text_dir(p)
    if p.is_file():
        return read_tsv(p)
    raise InputError(f"input '{path}' is neither a directory nor a file")


def preprocess(
    docs: Iterable[RawDocument], tagger, encoder, words, out_dir, truncate: int = 0
) -> dict:
    """Analyze and encode documents, then write the three output files.

    Returns a summary dict with document, skip, and vocabulary counts plus
    the written paths. Raises InputError when nothing usable remains.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    corpus_lines: list[str] = []
    feature_lines: list[str] = []
    nouns: dict[str, None] = {}
    seen_ids: set[str] = set()
    skipped = 0
    for doc in docs:
        if doc.id in seen_ids:
            raise InputError(f"duplicate document id '{doc.id}'")
        seen_ids.add(doc.id)
        analyzed = tagger.analyze(doc.text)
        if not analyzed:
            logger.warning("skipping document '%s': no sentences found", doc.id)
            skipped += 1
            continue
        sentences = [{"nouns": list(sentence_nouns), "text": sentence} for sentence, sentence_nouns in analyzed]
        corpus_lines.append(
            json.dumps({"id": doc.id, "label": doc.label, "sentences": sentences}, ensure_ascii=False)
        )
        vec = encoder.encode(doc.text, truncate=truncate)
        feature_lines.append(json.dumps({"id": doc.id, "feature": [float(x) for x in vec]}))
        for _, sentence_nouns in analyzed:
            for noun in sentence_nouns:
                nouns.setdefault(noun.lower())
    if not corpus_lines:
        raise InputError("no usable documents: every input was empty or unsegmentable")
    vectors = words.vectors(sorted(nouns))
    if not vectors:
        raise InputError("no embeddable nouns found in any document")
    paths = {
        "corpus": out / CORPUS_FILE,
        "features": out / FEATURES_FILE,
        "embeddings": out / EMBEDDINGS_FILE,
    }
    paths["corpus"].write_text("\n".join(corpus_lines) + "\n", encoding="utf-8")
    paths["features"].write_text("\n".join(feature_lines) + "\n", encoding="utf-8")
    embedding_lines = [
        token + " " + " ".join(repr(float(x)) for x in vectors[token]) for token in sorted(vectors)
    ]
    paths["embeddings"].write_text("\n".join(embedding_lines) + "\n", encoding="utf-8")
    return {
        "documents": len(corpus_lines),
        "skipped": skipped,
        "nouns": len(nouns),
        "embedded": len(vectors),
        "paths": {name: str(p) for name, p in paths.items()},
    }
