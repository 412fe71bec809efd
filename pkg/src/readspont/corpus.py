"""
Batch evaluation over a manifest of pre-segmented alphabet streams.

Pipeline per segment: read .als -> duration filter -> measure -> derive ->
classify. Records are merged sorted by id before any aggregate is computed,
so results do not depend on manifest order or scheduling.
"""

from __future__ import annotations

import csv
import json
import logging
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence, TextIO

from .alphabet import AlphabetStream, Label, StreamFormatError, WordPolicy, read_als
from .features import derive, fmt, measure
from .scoring import DEFAULT_PARAMS, ScoreParams, classify, is_borderline

log = logging.getLogger(__name__)

CLASSES = (Label.READ, Label.SPONTANEOUS)
MANIFEST_COLUMNS = ("path", "id", "speaker", "ground_truth")


class ManifestError(ValueError):
    pass


class FileError(OSError):
    def __init__(self, path, reason):
        self.path = str(path)
        super().__init__(f"cannot read {path}: {reason}")


@dataclass(frozen=True)
class ManifestEntry:
    path: str
    id: str
    speaker: Optional[str] = None
    ground_truth: Optional[Label] = None


def validate_manifest(entries: Sequence[ManifestEntry]) -> None:
    seen = set()
    for e in entries:
        if not e.path:
            raise ManifestError(f"entry {e.id!r} has an empty path")
        if e.id in seen:
            raise ManifestError(f"duplicate id {e.id!r}")
        seen.add(e.id)


def read_manifest(path) -> list[ManifestEntry]:
    """Read a ``path,id,speaker,ground_truth`` CSV.

    Relative paths resolve against the manifest's directory.
    """
    path = Path(path)
    base = path.parent
    try:
        fh = open(path, encoding="utf-8", newline="")
    except OSError as exc:
        raise FileError(path, exc.strerror or exc) from exc
    entries = []
    with fh:
        reader = csv.DictReader(fh)
        missing = {"path", "id"} - set(reader.fieldnames or ())
        if missing:
            raise ManifestError(f"{path}: missing column(s) {sorted(missing)}")
        for lineno, row in enumerate(reader, 2):
            seg_path = (row.get("path") or "").strip()
            if seg_path and not Path(seg_path).is_absolute():
                seg_path = str(base / seg_path)
            try:
                truth = Label.parse_truth(row.get("ground_truth"))
            except ValueError as exc:
                raise ManifestError(f"{path}:{lineno}: {exc}") from None
            entries.append(
                ManifestEntry(
                    path=seg_path,
                    id=(row.get("id") or "").strip(),
                    speaker=(row.get("speaker") or "").strip() or None,
                    ground_truth=truth,
                )
            )
    validate_manifest(entries)
    return entries


def write_manifest(entries: Iterable[ManifestEntry], path, relative_to=None) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(MANIFEST_COLUMNS)
        for e in entries:
            p = e.path
            if relative_to is not None:
                p = str(Path(p).relative_to(relative_to))
            writer.writerow([p, e.id, e.speaker or "", e.ground_truth.value if e.ground_truth else ""])


def filter_min_duration(streams: Iterable[AlphabetStream], min_s: float) -> list[AlphabetStream]:
    """Keep streams lasting at least ``min_s`` seconds (boundary kept)."""
    if min_s < 0:
        raise ValueError("min_s must be >= 0")
    return [s for s in streams if s.duration_s >= min_s]


@dataclass(frozen=True)
class SegmentRecord:
    id: str
    speaker: Optional[str]
    duration_s: float
    f1: Optional[float]
    f2: Optional[float]
    f3: Optional[float]
    score: Optional[float]
    label: Label
    borderline: bool
    ground_truth: Optional[Label]

    @property
    def correct(self) -> Optional[bool]:
        if self.ground_truth is None or self.label is Label.UNDETERMINED:
            return None
        return self.label is self.ground_truth


@dataclass
class Confusion:
    """Counts keyed by (ground truth, predicted label) over read/spontaneous."""

    counts: dict = field(default_factory=dict)

    @classmethod
    def from_counts(cls, read_read=0, spont_read=0, read_spont=0, spont_spont=0) -> "Confusion":
        R, S = Label.READ, Label.SPONTANEOUS
        return cls({(R, R): read_read, (S, R): spont_read, (R, S): read_spont, (S, S): spont_spont})

    @classmethod
    def from_records(cls, records: Iterable[SegmentRecord]) -> "Confusion":
        tally = Counter(
            (r.ground_truth, r.label)
            for r in records
            if r.ground_truth is not None and r.label is not Label.UNDETERMINED
        )
        return cls({(t, p): tally.get((t, p), 0) for t in CLASSES for p in CLASSES})

    def get(self, truth: Label, predicted: Label) -> int:
        return self.counts.get((truth, predicted), 0)

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    @property
    def n_correct(self) -> int:
        return sum(self.get(c, c) for c in CLASSES)

    @property
    def accuracy(self) -> Optional[float]:
        return self.n_correct / self.total if self.total else None

    def support(self, truth: Label) -> int:
        return sum(self.get(truth, p) for p in CLASSES)

    def recall(self, truth: Label) -> Optional[float]:
        n = self.support(truth)
        return self.get(truth, truth) / n if n else None

    def predicted(self, label: Label) -> int:
        return sum(self.get(t, label) for t in CLASSES)

    def as_dict(self) -> dict:
        return {
            "read->read": self.get(Label.READ, Label.READ),
            "read->spontaneous": self.get(Label.READ, Label.SPONTANEOUS),
            "spontaneous->read": self.get(Label.SPONTANEOUS, Label.READ),
            "spontaneous->spontaneous": self.get(Label.SPONTANEOUS, Label.SPONTANEOUS),
            "total": self.total,
            "accuracy": _round(self.accuracy),
            "recall_read": _round(self.recall(Label.READ)),
            "recall_spontaneous": _round(self.recall(Label.SPONTANEOUS)),
        }


def _round(x: Optional[float]) -> Optional[float]:
    return None if x is None else round(x, 4)


@dataclass
class EvalReport:
    records: list[SegmentRecord]
    params: ScoreParams = DEFAULT_PARAMS
    policy: WordPolicy = WordPolicy.ANY_SYMBOL
    min_s: float = 0.0
    stride_ms: float = 20.0
    errors: list[dict] = field(default_factory=list)  # {"id", "path", "error"}
    filtered: list[str] = field(default_factory=list)  # ids below min_s

    @property
    def confusion(self) -> Confusion:
        return Confusion.from_records(self.records)

    @property
    def accuracy(self) -> Optional[float]:
        return self.confusion.accuracy

    @property
    def undetermined(self) -> list[str]:
        return [r.id for r in self.records if r.label is Label.UNDETERMINED]

    @property
    def scored(self) -> list[SegmentRecord]:
        return [r for r in self.records if r.score is not None]

    def to_dict(self) -> dict:
        label_counts = Counter(r.label.value for r in self.records)
        return {
            "stride_ms": self.stride_ms,
            "word_policy": self.policy.value,
            "min_duration_s": self.min_s,
            "params": self.params.as_dict(),
            "n_segments": len(self.records),
            "n_filtered": len(self.filtered),
            "n_errors": len(self.errors),
            "label_counts": {lab.value: label_counts.get(lab.value, 0) for lab in Label},
            "confusion": self.confusion.as_dict(),
            "borderline": borderline_report(self, self.params).as_dict(),
            "speaker_errors": {
                spk: row.as_dict() for spk, row in speaker_error_table(self).items()
            },
            "undetermined": self.undetermined,
            "filtered": self.filtered,
            "errors": self.errors,
            "segments": [record_dict(r) for r in self.records],
        }


def record_dict(r: SegmentRecord) -> dict:
    return {
        "id": r.id,
        "speaker": r.speaker,
        "duration_s": _round(r.duration_s),
        "f1": _round(r.f1),
        "f2": _round(r.f2),
        "f3": _round(r.f3),
        "score": _round(r.score),
        "label": r.label.value,
        "borderline": r.borderline,
        "ground_truth": r.ground_truth.value if r.ground_truth else None,
    }


def record_from_dict(d: dict) -> SegmentRecord:
    return SegmentRecord(
        id=d["id"],
        speaker=d.get("speaker"),
        duration_s=d.get("duration_s") or 0.0,
        f1=d.get("f1"),
        f2=d.get("f2"),
        f3=d.get("f3"),
        score=d.get("score"),
        label=Label(d["label"]),
        borderline=bool(d.get("borderline")),
        ground_truth=Label.parse_truth(d.get("ground_truth")),
    )


def score_stream(
    stream: AlphabetStream,
    p: ScoreParams = DEFAULT_PARAMS,
    policy: WordPolicy = WordPolicy.ANY_SYMBOL,
) -> SegmentRecord:
    m = measure(stream, policy)
    d = derive(m)
    decision = classify(d, p)
    return SegmentRecord(
        id=stream.id,
        speaker=stream.speaker,
        duration_s=m.duration_s,
        f1=d.f1,
        f2=d.f2,
        f3=d.f3,
        score=decision.score,
        label=decision.label,
        borderline=decision.borderline,
        ground_truth=stream.ground_truth,
    )


def _load(entry: ManifestEntry, stride_ms: float):
    try:
        return read_als(entry.path, stride_ms, id=entry.id, speaker=entry.speaker,
                        ground_truth=entry.ground_truth)
    except StreamFormatError as exc:
        return exc
    except OSError as exc:
        raise FileError(entry.path, exc.strerror or exc) from exc


def evaluate(
    manifest: Sequence[ManifestEntry],
    p: ScoreParams = DEFAULT_PARAMS,
    policy: WordPolicy = WordPolicy.ANY_SYMBOL,
    min_s: float = 2.0,
    stride_ms: float = 20.0,
    workers: Optional[int] = None,
) -> EvalReport:
    """Score every manifest entry.

    Unreadable files raise FileError. Malformed streams are recorded in
    ``report.errors`` and the batch continues.
    """
    validate_manifest(manifest)
    if min_s < 0:
        raise ValueError("min_s must be >= 0")
    if workers and workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            loaded = list(pool.map(lambda e: _load(e, stride_ms), manifest))
    else:
        loaded = [_load(e, stride_ms) for e in manifest]

    records, errors, filtered = [], [], []
    for entry, item in zip(manifest, loaded):
        if isinstance(item, StreamFormatError):
            log.warning("segment %s: %s", entry.id, item)
            errors.append({"id": entry.id, "path": entry.path, "error": str(item)})
        elif item.duration_s < min_s:
            filtered.append(entry.id)
        else:
            records.append(score_stream(item, p, policy))
    records.sort(key=lambda r: r.id)
    errors.sort(key=lambda e: e["id"])
    filtered.sort()
    return EvalReport(records, p, policy, min_s, stride_ms, errors, filtered)


@dataclass
class BorderlineReport:
    records: list[SegmentRecord]
    low: float
    high: float

    @property
    def confusion(self) -> Confusion:
        return Confusion.from_records(self.records)

    @property
    def accuracy(self) -> Optional[float]:
        return self.confusion.accuracy

    def as_dict(self) -> dict:
        return {
            "band": [_round(self.low), _round(self.high)],
            "n_segments": len(self.records),
            "ids": [r.id for r in self.records],
            "confusion": self.confusion.as_dict(),
        }


def borderline_report(report: EvalReport, p: Optional[ScoreParams] = None) -> BorderlineReport:
    """Restrict to segments whose score lies in [tau_r - delta, tau_r + delta]."""
    p = p or report.params
    band = [r for r in report.records if r.score is not None and is_borderline(r.score, p)]
    return BorderlineReport(band, p.tau_r - p.delta, p.tau_r + p.delta)


SCORE_RANGE = (0.0, 3.0)


def export_histogram(report: EvalReport | Iterable[SegmentRecord], bins: int = 30) -> list[tuple[float, float, int]]:
    """Equal-width bins over [0, 3]; the last bin is closed on the right."""
    if bins < 1:
        raise ValueError("bins must be >= 1")
    records = report.records if isinstance(report, EvalReport) else list(report)
    lo, hi = SCORE_RANGE
    width = (hi - lo) / bins
    counts = [0] * bins
    for r in records:
        if r.score is None:
            continue
        k = min(int((r.score - lo) / width), bins - 1)
        counts[max(k, 0)] += 1
    return [(lo + i * width, lo + (i + 1) * width, counts[i]) for i in range(bins)]


def export_scatter(report: EvalReport | Iterable[SegmentRecord]) -> list[tuple]:
    records = report.records if isinstance(report, EvalReport) else list(report)
    return [(r.id, r.f1, r.f2, r.f3, r.score, r.label.value) for r in records]


@dataclass
class SpeakerErrors:
    spont_to_read: int = 0
    read_to_spont: int = 0
    undetermined: int = 0

    @property
    def direction(self) -> Optional[str]:
        if self.spont_to_read and self.read_to_spont:
            return "both"
        if self.spont_to_read:
            return "spontaneous->read"
        if self.read_to_spont:
            return "read->spontaneous"
        return None

    @property
    def n_errors(self) -> int:
        return self.spont_to_read + self.read_to_spont

    def as_dict(self) -> dict:
        return {
            "spontaneous->read": self.spont_to_read,
            "read->spontaneous": self.read_to_spont,
            "undetermined": self.undetermined,
            "direction": self.direction,
        }


def speaker_error_table(report: EvalReport | Iterable[SegmentRecord]) -> dict[str, SpeakerErrors]:
    """Per-speaker mis-recognitions over rows with both speaker and ground truth.

    Speakers with neither errors nor undetermined segments are omitted.
    """
    records = report.records if isinstance(report, EvalReport) else list(report)
    table: dict[str, SpeakerErrors] = {}
    for r in records:
        if r.speaker is None or r.ground_truth is None:
            continue
        row = table.setdefault(r.speaker, SpeakerErrors())
        if r.label is Label.UNDETERMINED:
            row.undetermined += 1
        elif r.label is not r.ground_truth:
            if r.ground_truth is Label.SPONTANEOUS:
                row.spont_to_read += 1
            else:
                row.read_to_spont += 1
    return {spk: row for spk, row in sorted(table.items()) if row.n_errors or row.undetermined}


# -- writers ---------------------------------------------------------------

SEGMENT_COLUMNS = ("id", "speaker", "duration_s", "f1", "f2", "f3", "score", "label", "borderline", "ground_truth")


def write_records_csv(records: Iterable[SegmentRecord], fh: TextIO) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(SEGMENT_COLUMNS)
    for r in records:
        w.writerow([
            r.id, r.speaker or "", fmt(r.duration_s), fmt(r.f1), fmt(r.f2), fmt(r.f3), fmt(r.score),
            r.label.value, "1" if r.borderline else "0", r.ground_truth.value if r.ground_truth else "",
        ])


def write_histogram_csv(hist: Iterable[tuple[float, float, int]], fh: TextIO) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(("bin_low", "bin_high", "count"))
    for lo, hi, n in hist:
        w.writerow((fmt(lo), fmt(hi), n))


def write_scatter_csv(rows: Iterable[tuple], fh: TextIO) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(("id", "f1", "f2", "f3", "score", "label"))
    for sid, f1, f2, f3, r, label in rows:
        w.writerow((sid, fmt(f1), fmt(f2), fmt(f3), fmt(r), label))


def write_report_json(report: EvalReport, fh: TextIO) -> None:
    json.dump(report.to_dict(), fh, indent=2, sort_keys=False)
    fh.write("\n")


def load_report_records(path) -> list[SegmentRecord]:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    return [record_from_dict(d) for d in data["segments"]]
