"""Measured counts and derived rate features of an alphabet stream."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Iterable, Optional, TextIO

from .alphabet import SEPARATOR, UNKNOWN, AlphabetStream, WordPolicy, segment_words


@dataclass(frozen=True)
class MeasuredFeatures:
    duration_s: float
    word_count: int
    alphabet_count: int
    active_count: int
    inactive_count: int
    separator_count: int = 0


@dataclass(frozen=True)
class DerivedFeatures:
    """Ratios over measured counts. None marks a ratio with a zero denominator."""

    awl: Optional[float]  # alphabets per word
    aps: Optional[float]  # alphabets per second
    wps: Optional[float]  # words per second
    inactive_aps: Optional[float]  # unknown frames per second
    active_awl: Optional[float]  # active frames per word

    @property
    def f1(self) -> Optional[float]:
        return self.active_awl

    @property
    def f2(self) -> Optional[float]:
        return self.inactive_aps

    @property
    def f3(self) -> Optional[float]:
        return self.wps

    @property
    def classifier_inputs(self) -> tuple[Optional[float], Optional[float], Optional[float]]:
        return self.active_awl, self.inactive_aps, self.wps

    @property
    def defined(self) -> bool:
        return None not in self.classifier_inputs


def measure(stream: AlphabetStream, policy: WordPolicy = WordPolicy.ANY_SYMBOL) -> MeasuredFeatures:
    s = stream.symbols
    inactive = s.count(UNKNOWN)
    separators = s.count(SEPARATOR)
    return MeasuredFeatures(
        duration_s=stream.duration_s,
        word_count=len(segment_words(stream, policy)),
        alphabet_count=len(s),
        active_count=len(s) - inactive - separators,
        inactive_count=inactive,
        separator_count=separators,
    )


def _ratio(num: float, den: float) -> Optional[float]:
    return num / den if den else None


def derive(m: MeasuredFeatures) -> DerivedFeatures:
    return DerivedFeatures(
        awl=_ratio(m.alphabet_count, m.word_count),
        aps=_ratio(m.alphabet_count, m.duration_s),
        wps=_ratio(m.word_count, m.duration_s),
        inactive_aps=_ratio(m.inactive_count, m.duration_s),
        active_awl=_ratio(m.active_count, m.word_count),
    )


def extract(stream: AlphabetStream, policy: WordPolicy = WordPolicy.ANY_SYMBOL):
    """measure() then derive(); returns both."""
    m = measure(stream, policy)
    return m, derive(m)


FEATURE_COLUMNS = (
    "id", "duration_s", "words", "alphabets", "active", "inactive", "separators",
    "awl", "aps", "wps", "inactive_aps", "active_awl",
)


def fmt(value: Optional[float]) -> str:
    """Four-decimal fixed formatting; Undefined becomes an empty field."""
    return "" if value is None else f"{value:.4f}"


def feature_row(stream_id: str, m: MeasuredFeatures, d: DerivedFeatures) -> list[str]:
    return [
        stream_id, fmt(m.duration_s), str(m.word_count), str(m.alphabet_count),
        str(m.active_count), str(m.inactive_count), str(m.separator_count),
        fmt(d.awl), fmt(d.aps), fmt(d.wps), fmt(d.inactive_aps), fmt(d.active_awl),
    ]


def write_feature_csv(rows: Iterable[tuple[str, MeasuredFeatures, DerivedFeatures]], fh: TextIO) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(FEATURE_COLUMNS)
    for stream_id, m, d in rows:
        writer.writerow(feature_row(stream_id, m, d))

