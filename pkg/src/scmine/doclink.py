"""Rank API documents against transcripts and evaluate against judgments."""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from .corpus import Document
from .errors import EmptyQueryError, ParseError, ValidationError
from .text import PreprocessOptions, preprocess_text
from .vectorspace import TermVector, TfidfIndex, cosine

DEFAULT_TAU = 0.12
DEFAULT_KS = (3, 5, 10, 20)

# transcripts and docs share one tokenizer; no noun filter, verbs like
# "contains" carry signal when matching method names
LINK_OPTIONS = PreprocessOptions(keep_nouns_only=False)


@dataclass(frozen=True)
class LinkResult:
    screencast_id: str
    ranking: tuple[tuple[str, float], ...]
    tau: float
    above_threshold: int
    top_n: Optional[int] = None

    @property
    def top(self) -> tuple[tuple[str, float], ...]:
        return self.ranking if self.top_n is None else self.ranking[: self.top_n]

    def ranked_ids(self) -> list[str]:
        return [d for d, _ in self.ranking]


@dataclass(frozen=True)
class EvaluationRow:
    k: int
    retrieved_relevant_total: int
    total_relevant: int
    micro_precision: float
    micro_recall: float
    macro_precision: float
    macro_recall: float

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "retrieved": f"{self.retrieved_relevant_total}/{self.total_relevant}",
            "retrieved_relevant_total": self.retrieved_relevant_total,
            "total_relevant": self.total_relevant,
            "micro_precision": self.micro_precision,
            "micro_recall": self.micro_recall,
            "macro_precision": self.macro_precision,
            "macro_recall": self.macro_recall,
        }


EvaluationTable = list


def tokenize_documents(docs: Sequence[Document], opts: PreprocessOptions = LINK_OPTIONS):
    for doc in docs:
        doc.tokens = preprocess_text(doc.raw_text, opts)
    return docs


def score_all(index: TfidfIndex, query: TermVector) -> list[tuple[str, float]]:
    """Cosine of the query against every indexed document, ranked.

    Ties (including all-zero scores) break by ascending doc id.
    """
    scores = []
    for doc_id, vec in zip(index.doc_ids, index.vectors):
        s = 0.0 if len(query) == 0 or len(vec) == 0 else cosine(query, vec)
        scores.append((doc_id, s))
    scores.sort(key=lambda ds: (-ds[1], ds[0]))
    return scores


def link_transcript(index: TfidfIndex, transcript: Document, top_n: Optional[int] = 20,
                    tau: float = DEFAULT_TAU) -> LinkResult:
    """Rank every document in ``index`` by cosine to the transcript.

    A transcript with no tokens is an error. One whose tokens all fall
    outside the index vocabulary scores 0 against every document.
    """
    if index.n_docs == 0:
        raise ValidationError("empty document index")
    tokens = transcript.tokens or preprocess_text(transcript.raw_text, LINK_OPTIONS)
    if not tokens:
        raise EmptyQueryError(f"{transcript.id}: transcript has no terms after preprocessing")
    ranking = score_all(index, index.vectorize(tokens))
    above = sum(1 for _, s in ranking if s >= tau)
    return LinkResult(transcript.id, tuple(ranking), tau, above, top_n)


def hits_at(ranked_ids: Sequence[str], relevant: set, k: int) -> int:
    return sum(1 for d in ranked_ids[:k] if d in relevant)


def evaluate_links(results: Sequence[LinkResult], judgments: dict,
                   ks: Sequence[int] = DEFAULT_KS) -> EvaluationTable:
    """Micro and macro precision/recall at each cutoff.

    Micro figures pool hit counts across screencasts and are computed as
    exact fractions before conversion. A cutoff longer than a ranking
    counts only the documents actually ranked.
    """
    if not results:
        raise ValidationError("no link results to evaluate")
    for r in results:
        if r.screencast_id not in judgments:
            raise ValidationError(f"no relevance judgments for screencast {r.screencast_id!r}")
    if any(k < 1 for k in ks):
        raise ValidationError("every k must be >= 1")
    total_relevant = sum(len(judgments[r.screencast_id]) for r in results)
    rows = []
    for k in sorted(ks):
        hits_total = 0
        slots = 0
        prec = []
        rec = []
        for r in results:
            relevant = judgments[r.screencast_id]
            ids = r.ranked_ids()
            cut = min(k, len(ids))
            h = hits_at(ids, relevant, cut)
            hits_total += h
            slots += cut
            prec.append(Fraction(h, cut) if cut else Fraction(0))
            rec.append(Fraction(h, len(relevant)))
        rows.append(EvaluationRow(
            k=k,
            retrieved_relevant_total=hits_total,
            total_relevant=total_relevant,
            micro_precision=float(Fraction(hits_total, slots)) if slots else 0.0,
            micro_recall=float(Fraction(hits_total, total_relevant)),
            macro_precision=float(sum(prec) / len(prec)),
            macro_recall=float(sum(rec) / len(rec)),
        ))
    return rows


def threshold_partition(all_scores: Sequence[float], relevant_scores: Sequence[float],
                        tau: float = DEFAULT_TAU):
    """(fraction of all scores < τ, fraction of relevant scores ≥ τ).

    Both are exact :class:`~fractions.Fraction` counts; the second is
    ``None`` when there are no relevant scores.
    """
    if not all_scores:
        raise ValidationError("all_scores is empty")
    below = Fraction(sum(1 for s in all_scores if s < tau), len(all_scores))
    if not relevant_scores:
        return below, None
    above = Fraction(sum(1 for s in relevant_scores if s >= tau), len(relevant_scores))
    return below, above


def load_judgments(path) -> dict[str, set[str]]:
    """JSON lines ``{"screencast_id": ..., "relevant_doc_ids": [...]}``."""
    path = Path(path)
    judgments: dict[str, set[str]] = {}
    with path.open(encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(path, line_no, f"invalid JSON ({exc.msg})") from None
            if not isinstance(obj, dict):
                raise ParseError(path, line_no, "expected a JSON object")
            sid = obj.get("screencast_id")
            rel = obj.get("relevant_doc_ids")
            if not isinstance(sid, str) or not isinstance(rel, list) \
                    or not all(isinstance(d, str) for d in rel):
                raise ParseError(path, line_no, "need screencast_id (str) and relevant_doc_ids (list of str)")
            if not rel:
                raise ParseError(path, line_no, f"empty relevant set for {sid!r}")
            if sid in judgments:
                raise ParseError(path, line_no, f"duplicate screencast_id {sid!r}")
            judgments[sid] = set(rel)
    return judgments
