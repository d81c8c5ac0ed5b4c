"""Tokenization, stopword/term removal and the lexicon-based noun filter."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

_ALPHA_RUN = re.compile(r"[^\W\d_]+")


@lru_cache(maxsize=None)
def load_wordlist(name: str) -> frozenset:
    text = resources.files("scmine").joinpath("data", f"{name}.txt").read_text(encoding="utf-8")
    return frozenset(w.strip().lower() for w in text.splitlines() if w.strip())


def default_stopwords() -> frozenset:
    return load_wordlist("stopwords")


@dataclass(frozen=True)
class PreprocessOptions:
    drop_terms: frozenset = frozenset({"java"})
    keep_nouns_only: bool = False
    stopword_list: frozenset = field(default_factory=default_stopwords)
    strip_nonalpha: bool = True

    def __post_init__(self):
        object.__setattr__(self, "drop_terms", frozenset(t.lower() for t in self.drop_terms))
        object.__setattr__(self, "stopword_list", frozenset(t.lower() for t in self.stopword_list))


def _verb_inflection(tok: str, verbs: frozenset) -> bool:
    if len(tok) >= 5 and tok.endswith("ing"):
        return True
    if len(tok) >= 4 and tok.endswith("ed"):
        return True
    if tok.endswith("ies") and tok[:-3] + "y" in verbs:
        return True
    if tok.endswith("es") and tok[:-2] in verbs:
        return True
    if tok.endswith("s") and tok[:-1] in verbs:
        return True
    return False


def is_noun(tok: str) -> bool:
    """Heuristic noun test.

    Lexicon nouns always pass. Listed verbs and adjectives, and tokens that
    look like inflected verbs (-ing, -ed, third person -s of a listed verb),
    fail. Everything else, including unknown identifiers, passes.
    """
    nouns = load_wordlist("nouns")
    if tok in nouns:
        return True
    verbs = load_wordlist("verbs")
    if tok in verbs or tok in load_wordlist("adjectives"):
        return False
    if tok.endswith("ly") and len(tok) > 4:
        stem = tok[:-2]
        if stem in load_wordlist("adjectives") or stem[:-1] + "y" in load_wordlist("adjectives"):
            return False
    return not _verb_inflection(tok, verbs)


def tokenize(text: str, strip_nonalpha: bool = True) -> list[str]:
    text = text.lower()
    if strip_nonalpha:
        return _ALPHA_RUN.findall(text)
    return text.split()


def preprocess_text(text: str, opts: PreprocessOptions | None = None) -> list[str]:
    opts = opts or PreprocessOptions()
    drop = opts.stopword_list | opts.drop_terms
    tokens = [t for t in tokenize(text, opts.strip_nonalpha) if t not in drop]
    if opts.keep_nouns_only:
        tokens = [t for t in tokens if is_noun(t)]
    return tokens
