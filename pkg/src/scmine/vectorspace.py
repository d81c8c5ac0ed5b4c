"""Bag-of-words vectors and the similarity measures built on them.

A :class:`TermVector` is a sparse, immutable map from integer term id to a
non-negative weight. Frame bags use quantized colours as term ids; text
bags use the vocabulary ids assigned by :class:`TfidfIndex`.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import _backend
from .errors import (
    DegenerateMatrixError,
    EmptyVocabularyError,
    UndefinedSimilarityError,
    ValidationError,
)

DEFAULT_BITS = 4


class TermVector:
    """Sparse non-negative term weights, stored as sorted id/weight arrays."""

    __slots__ = ("ids", "weights")

    def __init__(self, ids=(), weights=()):
        ids = np.asarray(ids, dtype=np.int64).ravel()
        weights = np.asarray(weights, dtype=np.float64).ravel()
        if ids.shape != weights.shape:
            raise ValidationError("ids and weights differ in length")
        if weights.size and (weights < 0).any():
            raise ValidationError("term weights must be non-negative")
        keep = weights > 0
        ids, weights = ids[keep], weights[keep]
        order = np.argsort(ids, kind="stable")
        ids, weights = ids[order], weights[order]
        if ids.size > 1 and (np.diff(ids) == 0).any():
            raise ValidationError("duplicate term id")
        ids = np.ascontiguousarray(ids)
        weights = np.ascontiguousarray(weights)
        ids.setflags(write=False)
        weights.setflags(write=False)
        self.ids = ids
        self.weights = weights

    @classmethod
    def from_mapping(cls, mapping: Mapping[int, float]) -> "TermVector":
        return cls(list(mapping.keys()), list(mapping.values()))

    @classmethod
    def from_dense(cls, dense) -> "TermVector":
        dense = np.asarray(dense, dtype=np.float64)
        nz = np.flatnonzero(dense)
        return cls(nz, dense[nz])

    def to_dict(self) -> dict[int, float]:
        return dict(zip(self.ids.tolist(), self.weights.tolist()))

    def __len__(self):
        return self.ids.size

    def __iter__(self):
        return iter(self.ids.tolist())

    def __getitem__(self, term: int) -> float:
        pos = np.searchsorted(self.ids, term)
        if pos < self.ids.size and self.ids[pos] == term:
            return float(self.weights[pos])
        return 0.0

    def __eq__(self, other):
        if not isinstance(other, TermVector):
            return NotImplemented
        return np.array_equal(self.ids, other.ids) and np.array_equal(self.weights, other.weights)

    def __hash__(self):
        return hash((self.ids.tobytes(), self.weights.tobytes()))

    def __repr__(self):
        return f"TermVector({self.to_dict()!r})"

    @property
    def total(self) -> float:
        return float(self.weights.sum())

    def norm_sq(self) -> float:
        return _backend.sparse_dot(self.ids, self.weights, self.ids, self.weights)

    def dot(self, other: "TermVector") -> float:
        return _backend.sparse_dot(self.ids, self.weights, other.ids, other.weights)

    def scaled(self, factor: float) -> "TermVector":
        return TermVector(self.ids, self.weights * factor)

    def binary(self) -> "TermVector":
        return TermVector(self.ids, np.ones_like(self.weights))


def quantize_frame(raster, bits_per_channel: int = DEFAULT_BITS) -> TermVector:
    """Colour-quantize an RGB raster into a bag of pixel counts.

    Each channel keeps its top ``bits_per_channel`` bits; the three bin
    indices are packed into a single term id ``R·2^(2b) + G·2^b + B``.
    """
    if not 1 <= int(bits_per_channel) <= 8:
        raise ValidationError(f"bits_per_channel must be in 1..8, got {bits_per_channel}")
    raster = np.asarray(raster)
    if raster.ndim != 3 or raster.shape[2] != 3:
        raise ValidationError(f"expected an H×W×3 raster, got shape {raster.shape}")
    if raster.shape[0] * raster.shape[1] == 0:
        raise ValidationError("empty raster")
    raster = np.ascontiguousarray(raster, dtype=np.uint8)
    counts = _backend.quantize_counts(raster, int(bits_per_channel))
    return TermVector.from_dense(counts)


def _both_empty(a: TermVector, b: TermVector) -> bool:
    return len(a) == 0 and len(b) == 0


def jaccard(a: TermVector, b: TermVector, binary: bool = False) -> float:
    """Extended (Tanimoto) Jaccard: a·b / (|a|² + |b|² − a·b).

    With ``binary=True`` both bags are reduced to their supports first,
    which gives the plain set intersection-over-union.
    """
    if _both_empty(a, b):
        raise UndefinedSimilarityError("jaccard of two empty vectors")
    if binary:
        a, b = a.binary(), b.binary()
    ab = a.dot(b)
    return ab / (a.norm_sq() + b.norm_sq() - ab)


def cosine(a: TermVector, b: TermVector) -> float:
    """Cosine of the angle between two bags; 0.0 if exactly one is empty."""
    if _both_empty(a, b):
        raise UndefinedSimilarityError("cosine of two empty vectors")
    if len(a) == 0 or len(b) == 0:
        return 0.0
    # sqrt(x*x) == x in IEEE arithmetic, so identical inputs give exactly 1.0
    return a.dot(b) / math.sqrt(a.norm_sq() * b.norm_sq())


@dataclass(frozen=True, eq=False)
class LsiModel:
    """Truncated SVD of a term × column count matrix.

    ``latent[j]`` is column ``j`` projected into the k-dimensional space
    (right singular vectors scaled by the singular values).
    """

    k: int
    rank: int
    term_ids: np.ndarray
    basis: np.ndarray
    singular_values: np.ndarray
    latent: np.ndarray

    @property
    def n_columns(self) -> int:
        return self.latent.shape[0]


def term_matrix(columns: Sequence[TermVector]) -> tuple[np.ndarray, np.ndarray]:
    """Dense term × column matrix over the union of the columns' term ids."""
    if not columns:
        return np.zeros(0, dtype=np.int64), np.zeros((0, 0))
    term_ids = np.unique(np.concatenate([c.ids for c in columns]))
    matrix = np.zeros((term_ids.size, len(columns)))
    for j, col in enumerate(columns):
        matrix[np.searchsorted(term_ids, col.ids), j] = col.weights
    return term_ids, matrix


def numerical_rank(singular_values: np.ndarray, shape: tuple[int, int]) -> int:
    if singular_values.size == 0 or singular_values[0] <= 0:
        return 0
    tol = singular_values[0] * max(shape) * np.finfo(np.float64).eps
    return int((singular_values > tol).sum())


def lsi_fit(columns: Sequence[TermVector], k: int) -> LsiModel:
    if len(columns) < 2:
        raise ValidationError("LSI needs at least 2 columns")
    if k < 1:
        raise ValidationError(f"k must be >= 1, got {k}")
    term_ids, matrix = term_matrix(columns)
    if matrix.size == 0 or not matrix.any():
        raise DegenerateMatrixError("all-zero term matrix")
    u, s, vt = np.linalg.svd(matrix, full_matrices=False)
    rank = numerical_rank(s, matrix.shape)
    k = min(k, rank)
    latent = vt[:k].T * s[:k]

    # identical columns share one latent vector bit-for-bit
    first_seen: dict[TermVector, int] = {}
    for j, col in enumerate(columns):
        src = first_seen.setdefault(col, j)
        if src != j:
            latent[j] = latent[src]

    for arr in (u, s, latent):
        arr.setflags(write=False)
    return LsiModel(
        k=k,
        rank=rank,
        term_ids=term_ids,
        basis=u[:, :k],
        singular_values=s[:k],
        latent=latent,
    )


def lsi_similarity(model: LsiModel, i: int, j: int) -> float:
    n = model.n_columns
    if not (0 <= i < n and 0 <= j < n):
        raise ValidationError(f"column index out of range: ({i}, {j}) for {n} columns")
    u, v = model.latent[i], model.latent[j]
    nu, nv = float(u @ u), float(v @ v)
    if nu == 0.0 or nv == 0.0:
        raise UndefinedSimilarityError(f"zero latent vector at column {i if nu == 0 else j}")
    if i == j or np.array_equal(u, v):
        return 1.0
    sim = float(u @ v) / math.sqrt(nu * nv)
    return min(1.0, max(-1.0, sim))


class TfidfIndex:
    """Term vocabulary, document frequencies and weighted document vectors.

    ``weighting`` is ``"tfidf"`` (raw tf × ln(N/df)) or ``"raw"`` (counts).
    """

    def __init__(self, vocabulary, df, doc_ids, vectors, weighting="tfidf"):
        self.vocabulary: dict[str, int] = vocabulary
        self.df: np.ndarray = df
        self.doc_ids: list[str] = doc_ids
        self.vectors: list[TermVector] = vectors
        self.weighting = weighting
        self.terms = sorted(vocabulary, key=vocabulary.__getitem__)

    @property
    def n_docs(self) -> int:
        return len(self.doc_ids)

    def idf(self) -> np.ndarray:
        return np.log(self.n_docs / self.df)

    def weight(self, term: str, doc_index: int) -> float:
        tid = self.vocabulary.get(term)
        if tid is None:
            return 0.0
        return self.vectors[doc_index][tid]

    def vectorize(self, tokens: Iterable[str]) -> TermVector:
        """Weight a token list against this index; unknown terms are dropped."""
        counts = Counter(t for t in tokens if t in self.vocabulary)
        if not counts:
            return TermVector()
        ids = np.array([self.vocabulary[t] for t in counts], dtype=np.int64)
        tf = np.array(list(counts.values()), dtype=np.float64)
        if self.weighting == "tfidf":
            tf = tf * self.idf()[ids]
        return TermVector(ids, tf)


def tfidf_build(corpus, weighting: str = "tfidf") -> TfidfIndex:
    """Index tokenized documents (anything with ``.id`` and ``.tokens``)."""
    if weighting not in ("tfidf", "raw"):
        raise ValidationError(f"unknown weighting {weighting!r}")
    corpus = list(corpus)
    if not corpus:
        raise EmptyVocabularyError("empty corpus")
    counts = [Counter(doc.tokens) for doc in corpus]
    vocab_terms = sorted(set().union(*counts))
    if not vocab_terms:
        raise EmptyVocabularyError("no terms in any document")
    vocabulary = {t: i for i, t in enumerate(vocab_terms)}
    df = np.zeros(len(vocab_terms), dtype=np.int64)
    for c in counts:
        df[[vocabulary[t] for t in c]] += 1
    idf = np.log(len(corpus) / df)
    vectors = []
    for c in counts:
        ids = np.array([vocabulary[t] for t in c], dtype=np.int64)
        w = np.array(list(c.values()), dtype=np.float64)
        if weighting == "tfidf" and ids.size:
            w = w * idf[ids]
        vectors.append(TermVector(ids, w))
    df.setflags(write=False)
    return TfidfIndex(vocabulary, df, [doc.id for doc in corpus], vectors, weighting)
