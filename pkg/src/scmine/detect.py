"""Score videos by consecutive-frame similarity and evaluate the ranking."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

from .corpus import FrameSequence
from .errors import InsufficientFramesError, ValidationError
from .vectorspace import cosine, jaccard, lsi_fit, lsi_similarity

ALGORITHMS = ("jaccard", "cosine", "lsi")
LSI_MAX_K = 10


@dataclass(frozen=True)
class VideoScore:
    video_id: str
    algorithm: str
    score: float
    pair_count: int


@dataclass(frozen=True)
class RankingEvaluation:
    k: int
    retrieved_relevant: int
    total_relevant: int
    precision: float
    recall: float
    f1: float
    k_clamped: bool = False


def pair_similarities(seq: FrameSequence, algorithm: str) -> list[float]:
    """Similarity of every consecutive frame pair, in time order."""
    if algorithm not in ALGORITHMS:
        raise ValidationError(f"unknown algorithm {algorithm!r}; choose from {ALGORITHMS}")
    bags = seq.bags
    if len(bags) < 2:
        raise InsufficientFramesError(f"{seq.video_id}: need at least 2 frames, got {len(bags)}")
    if algorithm == "lsi":
        model = lsi_fit(bags, LSI_MAX_K)
        return [lsi_similarity(model, n, n + 1) for n in range(len(bags) - 1)]
    sim = jaccard if algorithm == "jaccard" else cosine
    return [sim(a, b) for a, b in zip(bags, bags[1:])]


def video_similarity(seq: FrameSequence, algorithm: str = "cosine") -> VideoScore:
    """Mean similarity over all consecutive sampled-frame pairs."""
    sims = pair_similarities(seq, algorithm)
    return VideoScore(seq.video_id, algorithm, sum(sims) / len(sims), len(sims))


def rank_videos(scores: Iterable[VideoScore]) -> list[str]:
    """Descending score; ties by ascending video id."""
    scores = list(scores)
    if len({s.algorithm for s in scores}) > 1:
        raise ValidationError("cannot rank scores from different algorithms together")
    return [s.video_id for s in sorted(scores, key=lambda s: (-s.score, s.video_id))]


def evaluate_ranking(ranked: Sequence[str], relevant: set, k: int) -> RankingEvaluation:
    if k < 1:
        raise ValidationError(f"k must be >= 1, got {k}")
    if not relevant:
        raise ValidationError("relevant set is empty")
    clamped = k > len(ranked)
    if clamped:
        warnings.warn(f"k={k} exceeds ranking length {len(ranked)}; clamping", stacklevel=2)
        k = len(ranked)
    hits = sum(1 for v in ranked[:k] if v in relevant)
    precision = hits / k if k else 0.0
    recall = hits / len(relevant)
    f1 = 2 * precision * recall / (precision + recall) if hits else 0.0
    return RankingEvaluation(k, hits, len(relevant), precision, recall, f1, clamped)
