"""Batch command line: detect, topics, link, eval-detect, eval-link.

Exit codes: 0 success, 2 invalid input or arguments, 1 I/O failure.
Set ``SCMINE_WORKERS`` to score videos in parallel; output is identical
for any worker count.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from .corpus import load_api_docs, load_frames, load_text_corpus, load_transcript, load_video_manifest
from .detect import ALGORITHMS, evaluate_ranking, rank_videos, video_similarity
from .doclink import (
    DEFAULT_KS,
    DEFAULT_TAU,
    LINK_OPTIONS,
    evaluate_links,
    link_transcript,
    load_judgments,
    threshold_partition,
    tokenize_documents,
)
from .errors import ValidationError
from .text import PreprocessOptions, preprocess_text
from .topics import DEFAULT_BETA, DEFAULT_ITERATIONS, intertopic_map, lda_fit, topic_report, tune_topics
from .vectorspace import DEFAULT_BITS, tfidf_build

log = logging.getLogger("scmine")

OUTPUT_KEYS = {"out", "rankings_csv", "command_func"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ValidationError(f"{self.prog}: {message}")


def _ks(text: str) -> list[int]:
    try:
        ks = sorted({int(k) for k in text.split(",") if k.strip()})
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid k list {text!r}") from None
    if not ks or ks[0] < 1:
        raise argparse.ArgumentTypeError("k values must be positive integers")
    return ks


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
    return v


def _unit_float(text: str) -> float:
    v = float(text)
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"must be in [0, 1], got {text}")
    return v


def _bits(text: str) -> int:
    v = int(text)
    if not 1 <= v <= 8:
        raise argparse.ArgumentTypeError(f"bits must be in 1..8, got {text}")
    return v


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text}")
    return v


def run_config(args: argparse.Namespace) -> dict:
    """Resolved parameters embedded in every output (output paths excluded)."""
    cfg = {}
    for key, value in sorted(vars(args).items()):
        if key in OUTPUT_KEYS:
            continue
        cfg[key] = str(value) if isinstance(value, Path) else value
    cfg["version"] = __version__
    return cfg


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("SCMINE_WORKERS", "1")))
    except ValueError:
        raise ValidationError("SCMINE_WORKERS must be an integer") from None


def _write_text(path, text: str) -> None:
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _csv_text(config: dict, header, rows) -> str:
    buf = io.StringIO()
    buf.write("# config: " + json.dumps(config, sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _score_video(job):
    rec_id, frame_dir, interval, bits, algorithm = job
    return video_similarity(load_frames(frame_dir, interval, bits, video_id=rec_id), algorithm)


def cmd_detect(args) -> str:
    records = load_video_manifest(args.manifest)
    jobs = [(r.id, r.frame_dir, args.interval, args.bits, args.algorithm) for r in records]
    workers = _workers()
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            scores = list(pool.map(_score_video, jobs))
    else:
        scores = [_score_video(j) for j in jobs]
    by_id = {s.video_id: s for s in scores}
    order = rank_videos(scores)
    config = run_config(args)
    if args.format == "json":
        text = _dump_json({
            "config": config,
            "ranking": [
                {"video_id": v, "algorithm": args.algorithm, "score": by_id[v].score,
                 "pair_count": by_id[v].pair_count, "rank": n}
                for n, v in enumerate(order, 1)
            ],
        })
    else:
        text = _csv_text(config, ["video_id", "algorithm", "score", "rank"],
                         [[v, args.algorithm, repr(by_id[v].score), n] for n, v in enumerate(order, 1)])
    _write_text(args.out, text)
    return f"detect: scored {len(scores)} video(s) with {args.algorithm}"


def cmd_topics(args) -> str:
    docs = load_text_corpus(args.corpus)
    opts = PreprocessOptions(keep_nouns_only=args.nouns_only)
    corpus = [preprocess_text(d.raw_text, opts) for d in docs]
    params = {"beta": args.beta, "iterations": args.iterations, "seed": args.seed}
    if args.alpha is not None:
        params["alpha"] = args.alpha
    if args.k is not None:
        model = lda_fit(corpus, args.k, **params)
        tmap = intertopic_map(model) if model.K >= 2 else None
        tuning = {"mode": "fixed", "overlap": None if tmap is None else tmap.has_overlap}
    else:
        res = tune_topics(corpus, args.kmax, workers=_workers(), **params)
        model, tmap = res.model, res.map
        tuning = {"mode": "search", "overlap": res.overlap,
                  "tried": [{"K": k, "overlapping_pairs": n} for k, n in res.tried]}
    report = topic_report(model, tmap, args.lam, args.top)
    report["alpha"] = model.alpha
    report["documents"] = [docs[i].id for i in model.doc_index]
    _write_text(args.out, _dump_json({"config": run_config(args), "tuning": tuning, "model": report}))
    return f"topics: K={model.K} over {len(model.doc_index)} document(s)"


def _index(args):
    docs = tokenize_documents(load_api_docs(args.docs))
    if not docs:
        raise ValidationError(f"no .html documents under {args.docs}")
    return tfidf_build(docs, weighting=args.weighting)


def _load_query(path, screencast_id=None):
    doc = load_transcript(path, id=screencast_id)
    doc.tokens = preprocess_text(doc.raw_text, LINK_OPTIONS)
    return doc


def cmd_link(args) -> str:
    index = _index(args)
    result = link_transcript(index, _load_query(args.transcript), args.top, args.tau)
    _write_text(args.out, _dump_json({
        "config": run_config(args),
        "screencast_id": result.screencast_id,
        "tau": result.tau,
        "above_threshold": result.above_threshold,
        "corpus_size": index.n_docs,
        "ranking": [{"rank": n, "doc_id": d, "score": s} for n, (d, s) in enumerate(result.top, 1)],
    }))
    return f"link: ranked {index.n_docs} document(s); {result.above_threshold} at or above tau={args.tau}"


def _read_ranking_csv(path) -> list[str]:
    rows = []
    with Path(path).open(encoding="utf-8") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    reader = csv.DictReader(lines)
    if reader.fieldnames is None or not {"video_id", "rank"} <= set(reader.fieldnames):
        raise ValidationError(f"{path}: expected columns video_id, rank")
    for n, row in enumerate(reader, 2):
        try:
            rows.append((int(row["rank"]), row["video_id"]))
        except (TypeError, ValueError):
            raise ValidationError(f"{path}: bad rank on data row {n - 1}") from None
    return [v for _, v in sorted(rows)]


def cmd_eval_detect(args) -> str:
    records = load_video_manifest(args.manifest)
    relevant = {r.id for r in records if r.kind == "dev-screencast"}
    if not relevant:
        raise ValidationError("manifest has no dev-screencast videos to evaluate against")
    ranked = _read_ranking_csv(args.ranking)
    rows = []
    for k in args.ks:
        ev = evaluate_ranking(ranked, relevant, k)
        rows.append({"k": ev.k, "requested_k": k, "k_clamped": ev.k_clamped,
                     "retrieved_relevant": ev.retrieved_relevant, "total_relevant": ev.total_relevant,
                     "precision": ev.precision, "recall": ev.recall, "f1": ev.f1})
    _write_text(args.out, _dump_json({"config": run_config(args), "evaluation": rows}))
    last = rows[-1]
    return f"eval-detect: recall@{last['k']}={last['recall']:.4f} precision@{last['k']}={last['precision']:.4f}"


def _find_transcript(directory: Path, sid: str) -> Path:
    for suffix in (".txt", ".vtt", ".srt"):
        p = directory / f"{sid}{suffix}"
        if p.is_file():
            return p
    raise FileNotFoundError(f"no transcript for {sid!r} in {directory}")


def cmd_eval_link(args) -> str:
    index = _index(args)
    judgments = load_judgments(args.judgments)
    results = []
    for sid in sorted(judgments):
        query = _load_query(_find_transcript(Path(args.transcripts), sid), sid)
        results.append(link_transcript(index, query, None, args.tau))
    table = evaluate_links(results, judgments, args.ks)
    all_scores = [s for r in results for _, s in r.ranking]
    rel_scores = [s for r in results for d, s in r.ranking if d in judgments[r.screencast_id]]
    below, above = threshold_partition(all_scores, rel_scores, args.tau)
    out = {
        "config": run_config(args),
        "table": [row.to_json() for row in table],
        "threshold": {
            "tau": args.tau,
            "fraction_all_below": float(below),
            "fraction_all_below_exact": f"{below.numerator}/{below.denominator}",
            "fraction_relevant_above": None if above is None else float(above),
            "fraction_relevant_above_exact": None if above is None else f"{above.numerator}/{above.denominator}",
            "candidates_at_or_above": sum(r.above_threshold for r in results),
        },
    }
    _write_text(args.out, _dump_json(out))
    if args.rankings_csv:
        rows = [[r.screencast_id, d, repr(s), n]
                for r in results for n, (d, s) in enumerate(r.ranking[: args.top], 1)]
        Path(args.rankings_csv).write_text(
            _csv_text(run_config(args), ["screencast_id", "doc_id", "score", "rank"], rows), encoding="utf-8")
    best = table[-1]
    return f"eval-link: {best.retrieved_relevant_total}/{best.total_relevant} relevant within top-{best.k}"


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="scmine", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"scmine {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", metavar="command", parser_class=_Parser)
    sub.required = True

    def common(sp):
        sp.add_argument("--seed", type=int, default=0, help="recorded in output metadata")
        sp.add_argument("--out", default=None, help="output file (default stdout)")

    d = sub.add_parser("detect", help="rank videos by consecutive-frame similarity")
    d.add_argument("--manifest", type=Path, required=True)
    d.add_argument("--algorithm", choices=ALGORITHMS, default="cosine")
    d.add_argument("--interval", type=_positive_float, default=10.0)
    d.add_argument("--bits", type=_bits, default=DEFAULT_BITS)
    d.add_argument("--format", choices=("csv", "json"), default="csv")
    common(d)
    d.set_defaults(command_func=cmd_detect)

    t = sub.add_parser("topics", help="fit LDA and report topics")
    t.add_argument("--corpus", type=Path, required=True)
    group = t.add_mutually_exclusive_group()
    group.add_argument("--kmax", type=_positive_int, default=10)
    group.add_argument("--k", type=_positive_int, default=None)
    t.add_argument("--alpha", type=_positive_float, default=None, help="default 50/K")
    t.add_argument("--beta", type=_positive_float, default=DEFAULT_BETA)
    t.add_argument("--iterations", type=_positive_int, default=DEFAULT_ITERATIONS)
    t.add_argument("--lambda", dest="lam", type=_unit_float, default=0.6)
    t.add_argument("--top", type=_positive_int, default=10)
    t.add_argument("--nouns-only", action="store_true")
    common(t)
    t.set_defaults(command_func=cmd_topics)

    def link_opts(sp):
        sp.add_argument("--docs", type=Path, required=True)
        sp.add_argument("--tau", type=float, default=DEFAULT_TAU)
        sp.add_argument("--top", type=_positive_int, default=20)
        sp.add_argument("--weighting", choices=("tfidf", "raw"), default="tfidf")

    lk = sub.add_parser("link", help="rank API documents for one transcript")
    lk.add_argument("--transcript", type=Path, required=True)
    link_opts(lk)
    common(lk)
    lk.set_defaults(command_func=cmd_link)

    ed = sub.add_parser("eval-detect", help="precision/recall@k of a detect ranking")
    ed.add_argument("--ranking", type=Path, required=True, help="CSV written by detect")
    ed.add_argument("--manifest", type=Path, required=True)
    ed.add_argument("--ks", type=_ks, default=[20])
    common(ed)
    ed.set_defaults(command_func=cmd_eval_detect)

    el = sub.add_parser("eval-link", help="evaluate doc links against judgments")
    el.add_argument("--transcripts", type=Path, required=True, help="directory of <screencast_id>.txt/.vtt")
    el.add_argument("--judgments", type=Path, required=True)
    el.add_argument("--ks", type=_ks, default=list(DEFAULT_KS))
    el.add_argument("--rankings-csv", type=Path, default=None)
    link_opts(el)
    common(el)
    el.set_defaults(command_func=cmd_eval_link)
    return p


def run_cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        summary = args.command_func(args)
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, UnicodeDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(summary, file=sys.stderr if args.out in (None, "-") else sys.stdout)
    return 0


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
