from __future__ import annotations

import pytest
from click.testing import CliRunner

from bridgefix import FIXTURE_DOCS


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def text_dir(tmp_path):
    """Directory-of-txt form of the fixture corpus, with labels.tsv."""
    root = tmp_path / "raw"
    root.mkdir()
    for doc_id, label, text in FIXTURE_DOCS:
        (root / f"{doc_id}.txt").write_text(text, encoding="utf-8")
    lines = [f"{doc_id}\t{label}" for doc_id, label, _ in FIXTURE_DOCS if label is not None]
    (root / "labels.tsv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    return root


@pytest.fixture
def tsv_file(tmp_path):
    """Single-file TSV form of the same corpus; an empty label means unlabeled."""
    path = tmp_path / "docs.tsv"
    lines = [f"{doc_id}\t{label or ''}\t{text}" for doc_id, label, text in FIXTURE_DOCS]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
