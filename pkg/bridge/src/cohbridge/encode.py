"""Document encoders and word-vector sources.

The offline defaults derive every number from SHA-256 digests, so repeated
runs are byte-identical without model downloads or a random seed protocol.
The transformers encoder and the GloVe reader are optional adapters that
fail with actionable errors when their backing package or file is absent.
"""

from __future__ import annotations

import hashlib
from pathlib import Path
from typing import Iterable

import numpy as np

from .errors import ModelError
from .segment import tokenize


def _digest(salt: str, *parts: str) -> bytes:
    payload = "\x1f".join((salt,) + parts).encode("utf-8")
    return hashlib.sha256(payload).digest()


class HashDocumentEncoder:
    """Signed hashed bag of words over lowercased tokens, L2-normalized."""

    name = "hash"

    def __init__(self, dimension: int = 128, salt: str = ""):
        if dimension < 1:
            raise ValueError(f"dimension must be positive, got {dimension}")
        self.dimension = int(dimension)
        self.salt = salt

    def encode(self, text: str, truncate: int = 0) -> np.ndarray:
        tokens = [token.lower() for token in tokenize(text)]
        if truncate > 0:
            tokens = tokens[:truncate]  # keep the prefix, like sequence models do
        vec = np.zeros(self.dimension, dtype=np.float64)
        for token in tokens:
            digest = _digest(self.salt, "feature", token)
            index = int.from_bytes(digest[:4], "big") % self.dimension
            vec[index] += 1.0 if digest[4] % 2 == 0 else -1.0
        norm = float(np.linalg.norm(vec))
        if norm > 0.0:
            vec /= norm
        return vec


class TransformerDocumentEncoder:
    """Sequence-summary pooling from a locally cached transformers model.

    The document vector is the hidden state at the final position, which
    summarizes the whole (possibly truncated) sequence for causal and
    summary-token architectures. Loading never touches the network; the
    model must already sit in the local cache.
    """

    def __init__(self, model_name: str):
        try:
            import torch  # noqa: F401
            from transformers import AutoModel, AutoTokenizer
        except ImportError as exc:
            raise ModelError(
                "transformer encoders need the 'transformers' and 'torch' packages; "
                "install them or use the hash encoder"
            ) from exc
        try:
            self._tokenizer = AutoTokenizer.from_pretrained(model_name, local_files_only=True)
            self._model = AutoModel.from_pretrained(model_name, local_files_only=True)
        except Exception as exc:
            raise ModelError(
                f"could not load transformer model '{model_name}' from the local cache; "
                "download it beforehand or use the hash encoder"
            ) from exc
        self._model.eval()
        self.name = model_name
        self.dimension = int(self._model.config.hidden_size)

    def encode(self, text: str, truncate: int = 0) -> np.ndarray:
        import torch

        kwargs: dict = {"return_tensors": "pt"}
        if truncate > 0:
            kwargs.update(truncation=True, max_length=truncate)
        batch = self._tokenizer(text, **kwargs)
        with torch.no_grad():
            hidden = self._model(**batch).last_hidden_state
        return hidden[0, -1].to(torch.float64).numpy()


class HashWordEmbeddings:
    """Deterministic unit vectors per token; same token, same vector."""

    def __init__(self, dimension: int = 64, salt: str = ""):
        if dimension < 1:
            raise ValueError(f"dimension must be positive, got {dimension}")
        self.dimension = int(dimension)
        self.salt = salt

    def vectors(self, tokens: Iterable[str]) -> dict[str, np.ndarray]:
        out: dict[str, np.ndarray] = {}
        for token in tokens:
            if token in out:
                continue
            seed = int.from_bytes(_digest(self.salt, "word", token)[:8], "big")
            vec = np.random.default_rng(seed).standard_normal(self.dimension)
            out[token] = vec / float(np.linalg.norm(vec))
        return out


class GloveEmbeddings:
    """Subset reader for GloVe-format text files.

    Only requested tokens are kept, so the emitted embedding file stays
    restricted to the corpus vocabulary. Tokens missing from the file are
    silently absent; the pipeline treats them as unscorable.
    """

    def __init__(self, path):
        self.path = Path(path)
        if not self.path.is_file():
            raise ModelError(
                f"embedding file '{path}' does not exist; point the glove source at a "
                "GloVe-format text file or use the hash word vectors"
            )

    def vectors(self, tokens: Iterable[str]) -> dict[str, np.ndarray]:
        wanted = set(tokens)
        out: dict[str, np.ndarray] = {}
        with open(self.path, encoding="utf-8") as handle:
            for line in handle:
                parts = line.split()
                if len(parts) < 2:
                    continue  # header or blank line
                token = parts[0]
                if token in wanted and token not in out:
                    out[token] = np.array([float(v) for v in parts[1:]], dtype=np.float64)
        return out


def get_document_encoder(name: str, dimension: int = 128, salt: str = ""):
    """'hash' builds the offline encoder; anything else names a transformers model."""
    if name == "hash":
        return HashDocumentEncoder(dimension=dimension, salt=salt)
    return TransformerDocumentEncoder(name)


def get_word_source(source: str, dimension: int = 64, salt: str = ""):
    """'hash' builds deterministic vectors; 'glove:PATH' reads a file subset."""
    if source == "hash":
        return HashWordEmbeddings(dimension=dimension, salt=salt)
    if source.startswith("glove:"):
        return GloveEmbeddings(source.split(":", 1)[1])
    raise ModelError(f"unknown embedding source '{source}'; expected 'hash' or 'glove:PATH'")
