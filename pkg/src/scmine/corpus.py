"""Loaders for manifests, frame directories, transcripts and API pages."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from html.parser import HTMLParser
from pathlib import Path
from typing import Optional

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import (
    DuplicateIdError,
    EmptyDocumentError,
    FrameReadError,
    InsufficientFramesError,
    ParseError,
    ValidationError,
)
from .vectorspace import DEFAULT_BITS, TermVector, quantize_frame

VIDEO_KINDS = ("dev-screencast", "non-dev-screencast", "non-screencast", "other", "unknown")
DOC_KINDS = ("title", "transcript", "api-doc")
FRAME_SUFFIXES = (".ppm", ".png")


@dataclass(frozen=True)
class VideoRecord:
    id: str
    kind: str
    frame_dir: Path
    title: str = ""
    transcript_path: Optional[Path] = None

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind,
            "frame_dir": str(self.frame_dir),
            "title": self.title,
            "transcript_path": None if self.transcript_path is None else str(self.transcript_path),
        }


@dataclass
class Document:
    id: str
    kind: str
    raw_text: str
    tokens: list[str] = field(default_factory=list)


@dataclass(frozen=True)
class FrameSequence:
    video_id: str
    frames: tuple[tuple[float, TermVector], ...]

    def __post_init__(self):
        times = [t for t, _ in self.frames]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValidationError(f"{self.video_id}: frame timestamps must strictly increase")

    @property
    def timestamps(self) -> list[float]:
        return [t for t, _ in self.frames]

    @property
    def bags(self) -> list[TermVector]:
        return [b for _, b in self.frames]

    def __len__(self):
        return len(self.frames)


def _resolve(base: Path, value: str) -> Path:
    p = Path(value)
    return p if p.is_absolute() else (base / p).resolve()


def load_video_manifest(path) -> list[VideoRecord]:
    """Read a JSON-lines manifest. Relative paths resolve against its directory."""
    path = Path(path)
    base = path.parent.resolve()
    records: list[VideoRecord] = []
    seen: set[str] = set()
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
            for key in ("id", "kind", "frame_dir"):
                if not isinstance(obj.get(key), str) or not obj[key]:
                    raise ParseError(path, line_no, f"missing or non-string {key!r}")
            if obj["kind"] not in VIDEO_KINDS:
                raise ParseError(path, line_no, f"unknown kind {obj['kind']!r}")
            if obj["id"] in seen:
                raise DuplicateIdError(obj["id"])
            seen.add(obj["id"])
            frame_dir = _resolve(base, obj["frame_dir"])
            if not frame_dir.is_dir():
                raise ValidationError(f"{path}:{line_no}: frame_dir {frame_dir} does not exist")
            transcript = obj.get("transcript_path")
            records.append(
                VideoRecord(
                    id=obj["id"],
                    kind=obj["kind"],
                    frame_dir=frame_dir,
                    title=obj.get("title") or "",
                    transcript_path=None if not transcript else _resolve(base, transcript),
                )
            )
    return records


def dump_video_manifest(records, path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec.to_json(), sort_keys=True) + "\n")


def read_raster(path) -> np.ndarray:
    try:
        with Image.open(path) as img:
            return np.asarray(img.convert("RGB"), dtype=np.uint8)
    except (OSError, UnidentifiedImageError, ValueError) as exc:
        raise FrameReadError(path, exc) from None


def list_frame_files(frame_dir) -> list[tuple[int, Path]]:
    frames = []
    for p in Path(frame_dir).iterdir():
        if p.suffix.lower() in FRAME_SUFFIXES and p.stem.isdigit():
            frames.append((int(p.stem), p))
    frames.sort()
    for (a, pa), (b, pb) in zip(frames, frames[1:]):
        if a == b:
            raise ValidationError(f"two frames for t={a}s: {pa.name}, {pb.name}")
    return frames


def select_frame_times(times: list[int], interval: float) -> list[int]:
    """For each interval step, the earliest timestamp at or after its boundary.

    Steps are ``[t0 + m·interval, t0 + (m+1)·interval)`` from the first
    frame ``t0``; a step with no frame contributes nothing.
    """
    picked = []
    last_step = None
    times = sorted(times)
    for t in times:
        step = int((t - times[0]) // interval)
        if step != last_step:
            picked.append(t)
            last_step = step
    return picked


def load_frames(frame_dir, interval: float = 10, bits_per_channel: int = DEFAULT_BITS,
                video_id: Optional[str] = None) -> FrameSequence:
    if interval <= 0:
        raise ValidationError(f"interval must be > 0, got {interval}")
    frame_dir = Path(frame_dir)
    if not frame_dir.is_dir():
        raise FileNotFoundError(f"frame directory not found: {frame_dir}")
    files = dict(list_frame_files(frame_dir))
    times = select_frame_times(list(files), interval)
    if len(times) < 2:
        raise InsufficientFramesError(
            f"{frame_dir}: {len(times)} selectable frame(s) at interval {interval}s, need 2"
        )
    frames = tuple(
        (float(t), quantize_frame(read_raster(files[t]), bits_per_channel)) for t in times
    )
    return FrameSequence(video_id or frame_dir.name, frames)


class _VisibleText(HTMLParser):
    """Collects visible text; block elements become word breaks, inline ones don't."""

    SKIP = {"script", "style", "head", "title", "noscript", "template"}
    BLOCK = {
        "address", "article", "aside", "blockquote", "br", "caption", "dd", "div", "dl",
        "dt", "fieldset", "figcaption", "figure", "footer", "form", "h1", "h2", "h3",
        "h4", "h5", "h6", "header", "hr", "li", "main", "nav", "ol", "p", "pre",
        "section", "table", "tbody", "td", "tfoot", "th", "thead", "tr", "ul",
    }

    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.parts: list[str] = []
        self._skip_depth = 0

    def handle_starttag(self, tag, attrs):
        if tag in self.SKIP:
            self._skip_depth += 1
        elif tag in self.BLOCK:
            self.parts.append(" ")

    def handle_startendtag(self, tag, attrs):
        if tag in self.BLOCK:
            self.parts.append(" ")

    def handle_endtag(self, tag):
        if tag in self.SKIP:
            self._skip_depth = max(0, self._skip_depth - 1)
        elif tag in self.BLOCK:
            self.parts.append(" ")

    def handle_data(self, data):
        if not self._skip_depth:
            self.parts.append(data)


_WS = re.compile(r"\s+")
_TAG_LIKE = re.compile(r"<(?=[A-Za-z/!?])")


def extract_api_doc_text(html: str, id: str) -> Document:
    """Visible text of an API reference page, identifiers kept verbatim.

    Decoded ``&lt;`` before a letter (``List<E>``) is written as ``< `` so the
    result never contains anything that parses as a tag.
    """
    parser = _VisibleText()
    parser.feed(html)
    parser.close()
    text = _WS.sub(" ", "".join(parser.parts)).strip()
    text = _TAG_LIKE.sub("< ", text)
    if not text:
        raise EmptyDocumentError(f"{id}: no visible text")
    return Document(id=id, kind="api-doc", raw_text=text)


def load_api_docs(doc_dir) -> list[Document]:
    """Every ``*.html``/``*.htm`` under ``doc_dir``; ids are paths relative to it."""
    doc_dir = Path(doc_dir)
    if not doc_dir.is_dir():
        raise FileNotFoundError(f"documentation directory not found: {doc_dir}")
    docs = []
    for p in sorted(doc_dir.rglob("*")):
        if p.suffix.lower() in (".html", ".htm") and p.is_file():
            doc_id = p.relative_to(doc_dir).with_suffix("").as_posix()
            docs.append(extract_api_doc_text(p.read_text(encoding="utf-8", errors="replace"), doc_id))
    return docs


_TIMING = re.compile(
    r"^\s*(\d+|WEBVTT.*|NOTE(\s.*)?|"
    r"(\d{1,2}:)?\d{1,2}:\d{2}([.,]\d{1,3})?\s*-->\s*(\d{1,2}:)?\d{1,2}:\d{2}([.,]\d{1,3})?.*)\s*$"
)
_INLINE_TAG = re.compile(r"<[^>]*>")


def strip_captions(text: str) -> str:
    """Drop cue numbers, timing lines and the WEBVTT header; join spoken lines."""
    spoken = []
    for line in text.splitlines():
        if _TIMING.match(line):
            continue
        line = _INLINE_TAG.sub("", line).strip()
        if line:
            spoken.append(line)
    return _WS.sub(" ", " ".join(spoken)).strip()


def load_transcript(path, id: Optional[str] = None) -> Document:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    raw = strip_captions(text)
    if not raw:
        raise EmptyDocumentError(f"{path}: transcript is empty after stripping timings")
    return Document(id=id or path.stem, kind="transcript", raw_text=raw)


def load_text_corpus(path) -> list[Document]:
    """JSON lines ``{"id", "text", "kind"?}``, as consumed by the topics command."""
    path = Path(path)
    docs = []
    seen = set()
    with path.open(encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(path, line_no, f"invalid JSON ({exc.msg})") from None
            if not isinstance(obj, dict) or not isinstance(obj.get("id"), str) \
                    or not isinstance(obj.get("text"), str):
                raise ParseError(path, line_no, "expected {\"id\": str, \"text\": str}")
            kind = obj.get("kind", "title")
            if kind not in DOC_KINDS:
                raise ParseError(path, line_no, f"unknown kind {kind!r}")
            if obj["id"] in seen:
                raise DuplicateIdError(obj["id"])
            seen.add(obj["id"])
            docs.append(Document(id=obj["id"], kind=kind, raw_text=obj["text"]))
    return docs
