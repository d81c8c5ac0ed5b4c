"""LDA by collapsed Gibbs sampling, term relevance, and the intertopic map."""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import _backend
from .errors import ValidationError

LN2 = math.log(2.0)
DEFAULT_BETA = 0.01
DEFAULT_ITERATIONS = 1000
MAX_RADIUS = 0.25


def default_alpha(K: int) -> float:
    return 50.0 / K


@dataclass(frozen=True, eq=False)
class TopicModel:
    K: int
    vocabulary: tuple[str, ...]
    phi: np.ndarray
    theta: np.ndarray
    term_marginal: np.ndarray
    prevalence: np.ndarray
    alpha: float
    beta: float
    iterations: int
    seed: int
    doc_index: tuple[int, ...] = ()
    assignments: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def V(self) -> int:
        return len(self.vocabulary)


def lda_fit(corpus: Sequence[Sequence[str]], K: int, alpha: Optional[float] = None,
            beta: float = DEFAULT_BETA, iterations: int = DEFAULT_ITERATIONS,
            seed: int = 0) -> TopicModel:
    """Fit LDA with ``iterations`` collapsed-Gibbs sweeps.

    Topic assignments start uniformly at random; every sweep visits tokens
    in corpus order. The same ``seed`` gives identical output on either
    kernel backend. Empty documents are dropped; ``doc_index`` maps rows of
    ``theta`` back to the input positions.
    """
    if K < 1:
        raise ValidationError(f"K must be >= 1, got {K}")
    if iterations < 0:
        raise ValidationError("iterations must be >= 0")
    alpha = default_alpha(K) if alpha is None else float(alpha)
    if alpha <= 0 or beta <= 0:
        raise ValidationError("alpha and beta must be positive")
    kept = [i for i, doc in enumerate(corpus) if len(doc)]
    if len(kept) < len(corpus):
        warnings.warn(f"dropped {len(corpus) - len(kept)} empty document(s)", stacklevel=2)
    if not kept:
        raise ValidationError("corpus has no non-empty documents")

    vocabulary = tuple(sorted({t for i in kept for t in corpus[i]}))
    term_id = {t: n for n, t in enumerate(vocabulary)}
    words = np.array([term_id[t] for i in kept for t in corpus[i]], dtype=np.int64)
    docs = np.repeat(np.arange(len(kept), dtype=np.int64), [len(corpus[i]) for i in kept])
    n_tokens, V, D = words.size, len(vocabulary), len(kept)
    if K > n_tokens:
        raise ValidationError(f"K={K} exceeds the corpus token count {n_tokens}")

    rng = np.random.default_rng(seed)
    z = rng.integers(K, size=n_tokens).astype(np.int64)
    n_dk = np.zeros((D, K), dtype=np.int64)
    n_kw = np.zeros((K, V), dtype=np.int64)
    np.add.at(n_dk, (docs, z), 1)
    np.add.at(n_kw, (z, words), 1)
    n_k = n_kw.sum(axis=1)

    for _ in range(iterations):
        _backend.gibbs_sweep(words, docs, z, n_dk, n_kw, n_k, alpha, float(beta), rng.random(n_tokens))

    phi = (n_kw + beta) / (n_k[:, None] + V * beta)
    doc_len = n_dk.sum(axis=1)
    theta = (n_dk + alpha) / (doc_len[:, None] + K * alpha)
    prevalence = (theta * doc_len[:, None]).sum(axis=0) / doc_len.sum()
    term_marginal = np.bincount(words, minlength=V) / n_tokens
    for arr in (phi, theta, prevalence, term_marginal, z):
        arr.setflags(write=False)
    return TopicModel(
        K=K, vocabulary=vocabulary, phi=phi, theta=theta, term_marginal=term_marginal,
        prevalence=prevalence, alpha=alpha, beta=float(beta), iterations=iterations,
        seed=seed, doc_index=tuple(kept), assignments=z,
    )


def relevance_terms(model: TopicModel, topic: int, lam: float, top_n: Optional[int] = None):
    """Rank terms by λ·log φ + (1−λ)·log(φ / p(w)); ties by term."""
    if not 0 <= topic < model.K:
        raise ValidationError(f"topic {topic} out of range for K={model.K}")
    if not 0.0 <= lam <= 1.0:
        raise ValidationError(f"lambda must be in [0, 1], got {lam}")
    log_phi = np.log(model.phi[topic])
    log_lift = np.log(model.phi[topic] / model.term_marginal)
    rel = lam * log_phi + (1.0 - lam) * log_lift
    ranked = sorted(zip(model.vocabulary, rel.tolist()), key=lambda tr: (-tr[1], tr[0]))
    return ranked if top_n is None else ranked[:top_n]


def jensen_shannon(p, q) -> float:
    """JSD in nats; 0·log 0 taken as 0. Symmetric and within [0, ln 2]."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    m = 0.5 * (p + q)

    def kl(a):
        nz = a > 0
        return float(np.sum(a[nz] * np.log(a[nz] / m[nz])))

    return min(LN2, max(0.0, 0.5 * kl(p) + 0.5 * kl(q)))


def classical_mds(dist: np.ndarray, dims: int = 2) -> np.ndarray:
    """Torgerson scaling; axes beyond the positive spectrum are zero."""
    n = dist.shape[0]
    j = np.eye(n) - np.full((n, n), 1.0 / n)
    b = -0.5 * j @ (dist ** 2) @ j
    b = 0.5 * (b + b.T)
    evals, evecs = np.linalg.eigh(b)
    order = np.argsort(evals)[::-1][:dims]
    coords = np.zeros((n, dims))
    for axis, idx in enumerate(order):
        if evals[idx] <= 0:
            break
        col = evecs[:, idx] * math.sqrt(evals[idx])
        # fix the sign so output does not depend on the eigensolver's choice
        if col[np.argmax(np.abs(col))] < 0:
            col = -col
        coords[:, axis] = col
    return coords


@dataclass(frozen=True, eq=False)
class IntertopicMap:
    coords: np.ndarray
    radii: np.ndarray
    jsd: np.ndarray
    distances: np.ndarray

    def overlapping_pairs(self) -> list[tuple[int, int]]:
        pairs = []
        k = len(self.radii)
        for i in range(k):
            for j in range(i + 1, k):
                gap = float(np.linalg.norm(self.coords[i] - self.coords[j]))
                if gap < self.radii[i] + self.radii[j]:
                    pairs.append((i, j))
        return pairs

    @property
    def has_overlap(self) -> bool:
        return bool(self.overlapping_pairs())


def intertopic_map(model: TopicModel) -> IntertopicMap:
    if model.K < 2:
        raise ValidationError("intertopic map needs K >= 2")
    K = model.K
    jsd = np.zeros((K, K))
    for i in range(K):
        for j in range(i + 1, K):
            jsd[i, j] = jsd[j, i] = jensen_shannon(model.phi[i], model.phi[j])
    dist = np.sqrt(jsd)
    root_prev = np.sqrt(model.prevalence)
    radii = MAX_RADIUS * root_prev / root_prev.max()
    return IntertopicMap(coords=classical_mds(dist), radii=radii, jsd=jsd, distances=dist)


@dataclass(frozen=True, eq=False)
class TuneResult:
    K: int
    model: TopicModel
    map: IntertopicMap
    overlap: bool
    tried: tuple[tuple[int, int], ...] = ()

    def __iter__(self):
        return iter((self.K, self.model, self.map))


def _fit_and_map(args):
    corpus, K, params = args
    model = lda_fit(corpus, K, **params)
    return model, intertopic_map(model)


def tune_topics(corpus, k_max: int, workers: int = 1, **fit_params) -> TuneResult:
    """Largest K in k_max..2 whose topic circles do not overlap.

    ``alpha`` defaults to 50/K per candidate. Falls back to K=2 with
    ``overlap=True`` when no candidate is overlap-free. With ``workers > 1``
    every candidate is fitted in parallel; the result is the same.
    """
    if k_max < 2:
        raise ValidationError(f"k_max must be >= 2, got {k_max}")
    candidates = list(range(k_max, 1, -1))
    jobs = [(corpus, K, fit_params) for K in candidates]
    tried = []
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            fitted = list(pool.map(_fit_and_map, jobs))
    else:
        fitted = None
    last = None
    for n, K in enumerate(candidates):
        model, tmap = fitted[n] if fitted else _fit_and_map(jobs[n])
        n_overlap = len(tmap.overlapping_pairs())
        tried.append((K, n_overlap))
        last = (model, tmap)
        if n_overlap == 0:
            return TuneResult(K, model, tmap, False, tuple(tried))
    return TuneResult(2, last[0], last[1], True, tuple(tried))


def topic_report(model: TopicModel, tmap: Optional[IntertopicMap], lam: float, top_n: int) -> dict:
    term_id = {t: n for n, t in enumerate(model.vocabulary)}
    topics = []
    for k in range(model.K):
        entry = {
            "topic": k,
            "prevalence": float(model.prevalence[k]),
            "terms": [{"term": t, "relevance": r, "phi": float(model.phi[k][term_id[t]])}
                      for t, r in relevance_terms(model, k, lam, top_n)],
        }
        if tmap is not None:
            entry["x"], entry["y"] = (float(c) for c in tmap.coords[k])
            entry["radius"] = float(tmap.radii[k])
        topics.append(entry)
    report = {"K": model.K, "lambda": lam, "topics": topics}
    if tmap is not None:
        report["jsd"] = tmap.jsd.tolist()
        report["overlapping_pairs"] = [list(p) for p in tmap.overlapping_pairs()]
    return report
