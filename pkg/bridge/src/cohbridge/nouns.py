"""Sentence analysis: segmentation plus per-sentence noun extraction.

Both taggers expose ``analyze(text) -> [(sentence, nouns), ...]``. The
heuristic tagger is dependency-free and deterministic: it keeps
capitalized tokens away from sentence starts, tokens with common noun
suffixes, and simple plural forms, after filtering a stopword list. It is
coarse by design. The stanza tagger delegates segmentation and tagging to
a pretrained model and keeps tokens tagged NOUN or PROPN.
"""

from __future__ import annotations

from .errors import ModelError
from .segment import split_sentences, tokenize

AnalyzedSentence = tuple[str, list[str]]

_STOPWORDS = frozenset(
    """
    a an the and or but nor so yet if then else when while because although
    though since unless until of in on at by for with without within about
    against between among through during before after above below under over
    to from up down out off again further once here there where why how all
    any both each few more most other some such no not only own same than
    too very just even ever never always often also still already
    can cannot could will would shall should may might must
    do does did done doing have has had having be is are was were been being
    am i you he she it we they me him her us them my your his its our their
    mine yours hers ours theirs myself yourself himself herself itself
    ourselves themselves this that these those who whom whose which what
    as says said
    """.split()
)

# Suffixes that overwhelmingly mark English common nouns.
_NOUN_SUFFIXES = (
    "tion",
    "sion",
    "ment",
    "ness",
    "ity",
    "ance",
    "ence",
    "ship",
    "hood",
    "ism",
    "ology",
    "age",
    "ure",
)


def _looks_like_noun(token: str, sentence_initial: bool) -> bool:
    lowered = token.lower()
    if lowered in _STOPWORDS:
        return False
    if token[0].isupper() and not sentence_initial:
        return True  # mid-sentence capitals read as proper nouns
    if lowered.endswith(_NOUN_SUFFIXES):
        return True
    # Crude plural: a trailing s that is not part of -ss, -us, or -is.
    return len(lowered) >= 4 and lowered.endswith("s") and not lowered.endswith(("ss", "us", "is"))


class HeuristicTagger:
    """Rule-based noun finder for fully offline runs."""

    name = "heuristic"

    def analyze(self, text: str) -> list[AnalyzedSentence]:
        out = []
        for sentence in split_sentences(text):
            tokens = tokenize(sentence)
            nouns = [
                token
                for position, token in enumerate(tokens)
                if _looks_like_noun(token, sentence_initial=position == 0)
            ]
            out.append((sentence, nouns))
        return out


class StanzaTagger:
    """POS tagging via stanza; needs the package and a downloaded model."""

    name = "stanza"

    def __init__(self, lang: str = "en"):
        try:
            import stanza
        except ImportError as exc:
            raise ModelError(
                "the stanza tagger needs the 'stanza' package; install it with "
                "'pip install stanza' or use the heuristic tagger"
            ) from exc
        try:
            self._pipeline = stanza.Pipeline(
                lang=lang, processors="tokenize,pos", download_method=None, verbose=False
            )
        except Exception as exc:
            raise ModelError(
                f"could not load the stanza '{lang}' model; download it with "
                f"stanza.download('{lang}') or use the heuristic tagger"
            ) from exc

    def analyze(self, text: str) -> list[AnalyzedSentence]:
        document = self._pipeline(text)
        out = []
        for sentence in document.sentences:
            nouns = [word.text for word in sentence.words if word.upos in ("NOUN", "PROPN")]
            out.append((sentence.text, nouns))
        return out


def get_tagger(name: str):
    if name == "heuristic":
        return HeuristicTagger()
    if name == "stanza":
        return StanzaTagger()
    if name.startswith("stanza:"):
        return StanzaTagger(lang=name.split(":", 1)[1])
    raise ModelError(f"unknown tagger '{name}'; expected 'heuristic', 'stanza', or 'stanza:<lang>'")
