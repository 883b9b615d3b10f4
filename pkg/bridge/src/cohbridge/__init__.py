"""Raw-document bridge emitting pipeline-ready corpus, feature, and embedding files."""

from .convert import (
    CORPUS_FILE,
    EMBEDDINGS_FILE,
    FEATURES_FILE,
    RawDocument,
    load_raw,
    preprocess,
    read_text_dir,
    read_tsv,
)
from .encode import (
    GloveEmbeddings,
    HashDocumentEncoder,
    HashWordEmbeddings,
    TransformerDocumentEncoder,
    get_document_encoder,
    get_word_source,
)
from .errors import BridgeError, InputError, ModelError
from .nouns import HeuristicTagger, StanzaTagger, get_tagger
from .segment import split_sentences, tokenize

__version__ = "0.1.0"

__all__ = [
    "BridgeError",
    "CORPUS_FILE",
    "EMBEDDINGS_FILE",
    "FEATURES_FILE",
    "GloveEmbeddings",
    "HashDocumentEncoder",
    "HashWordEmbeddings",
    "HeuristicTagger",
    "InputError",
    "ModelError",
    "RawDocument",
    "StanzaTagger",
    "TransformerDocumentEncoder",
    "get_document_encoder",
    "get_tagger",
    "get_word_source",
    "load_raw",
    "preprocess",
    "read_text_dir",
    "read_tsv",
    "split_sentences",
    "tokenize",
    "__version__",
]
