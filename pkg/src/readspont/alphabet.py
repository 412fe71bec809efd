"""
Frame-level alphabet streams and word segmentation.

A stream is the raw, uncollapsed per-frame output of a speech-to-alphabet
engine: one symbol per fixed-stride frame, drawn from 29 symbols (26 letters,
unknown, separator, apostrophe). Symbols are held in their canonical file
encoding:

    'a'..'z'  letters
    '-'       unknown (the blank / pause frame)
    ' '       separator (word boundary)
    "'"       apostrophe
"""

from __future__ import annotations

import enum
import string
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

UNKNOWN = "-"
SEPARATOR = " "
APOSTROPHE = "'"
LETTERS = string.ascii_lowercase

ALPHABET: tuple[str, ...] = tuple(LETTERS) + (UNKNOWN, SEPARATOR, APOSTROPHE)

# pretty forms for display only; never written to files
DISPLAY = {UNKNOWN: "◇", SEPARATOR: "␣", APOSTROPHE: "′"}


class SymbolClass(enum.Enum):
    LETTER = "letter"
    APOSTROPHE = "apostrophe"
    SEPARATOR = "separator"
    UNKNOWN = "unknown"

    @property
    def is_active(self) -> bool:
        return self in (SymbolClass.LETTER, SymbolClass.APOSTROPHE)

    @property
    def is_inactive(self) -> bool:
        return self is SymbolClass.UNKNOWN


_CLASS_OF = {ch: SymbolClass.LETTER for ch in LETTERS}
_CLASS_OF.update(
    {
        UNKNOWN: SymbolClass.UNKNOWN,
        SEPARATOR: SymbolClass.SEPARATOR,
        APOSTROPHE: SymbolClass.APOSTROPHE,
    }
)


def symbol_class(ch: str) -> SymbolClass:
    """Class of a single canonical symbol; KeyError for anything else."""
    return _CLASS_OF[ch]


class Label(str, enum.Enum):
    READ = "read"
    SPONTANEOUS = "spontaneous"
    UNDETERMINED = "undetermined"

    @classmethod
    def parse_truth(cls, text: Optional[str]) -> Optional["Label"]:
        """Parse a ground-truth cell; blank means unlabeled."""
        if text is None or not text.strip():
            return None
        value = text.strip().lower()
        if value not in (cls.READ.value, cls.SPONTANEOUS.value):
            raise ValueError(f"ground truth must be 'read', 'spontaneous' or empty, got {text!r}")
        return cls(value)


class WordPolicy(str, enum.Enum):
    """Which separator-delimited runs count as words."""

    ANY_SYMBOL = "any"  # every non-empty run, including all-unknown runs
    ACTIVE_ONLY = "active"  # runs holding at least one active symbol


class StreamFormatError(ValueError):
    pass


class IllegalCharacter(StreamFormatError):
    def __init__(self, position: int, char: str):
        self.position = position
        self.char = char
        super().__init__(f"illegal character {char!r} at position {position}")


class NonPositiveStride(StreamFormatError):
    def __init__(self, stride_ms):
        self.stride_ms = stride_ms
        super().__init__(f"stride_ms must be positive, got {stride_ms!r}")


@dataclass(frozen=True)
class AlphabetStream:
    symbols: str
    stride_ms: float = 20.0
    id: str = ""
    speaker: Optional[str] = None
    ground_truth: Optional[Label] = None

    def __post_init__(self):
        if not self.stride_ms > 0:
            raise NonPositiveStride(self.stride_ms)

    def __len__(self) -> int:
        return len(self.symbols)

    @property
    def n_frames(self) -> int:
        return len(self.symbols)

    @property
    def duration_s(self) -> float:
        return len(self.symbols) * self.stride_ms / 1000

    def counts(self) -> dict[SymbolClass, int]:
        tally = Counter(_CLASS_OF[ch] for ch in self.symbols)
        return {cls: tally.get(cls, 0) for cls in SymbolClass}

    def pretty(self) -> str:
        return "".join(DISPLAY.get(ch, ch) for ch in self.symbols)


@dataclass(frozen=True)
class WordSegment:
    total_len: int
    active_len: int
    inactive_len: int
    start_frame: int

    @property
    def inactive_ratio(self) -> float:
        return self.inactive_len / self.total_len


def parse_stream(
    text: str,
    stride_ms: float = 20.0,
    *,
    ignore_newlines: bool = False,
    **meta,
) -> AlphabetStream:
    """Build a stream from its canonical encoding.

    Positions in IllegalCharacter refer to offsets in ``text``. With
    ``ignore_newlines`` line breaks are skipped (files may be wrapped).
    """
    if not stride_ms > 0:
        raise NonPositiveStride(stride_ms)
    if ignore_newlines:
        symbols = []
        for pos, ch in enumerate(text):
            if ch in _CLASS_OF:
                symbols.append(ch)
            elif ch not in "\r\n":
                raise IllegalCharacter(pos, ch)
        body = "".join(symbols)
    else:
        for pos, ch in enumerate(text):
            if ch not in _CLASS_OF:
                raise IllegalCharacter(pos, ch)
        body = text
    return AlphabetStream(body, stride_ms, **meta)


def encode(stream: AlphabetStream) -> str:
    return stream.symbols


def segment_words(
    stream: AlphabetStream | str, policy: WordPolicy = WordPolicy.ANY_SYMBOL
) -> list[WordSegment]:
    symbols = stream if isinstance(stream, str) else stream.symbols
    words = []
    start = 0
    # trailing separator flushes the last run
    for pos, ch in enumerate(symbols + SEPARATOR):
        if ch != SEPARATOR:
            continue
        if pos > start:
            run = symbols[start:pos]
            inactive = run.count(UNKNOWN)
            active = len(run) - inactive
            if active or policy is WordPolicy.ANY_SYMBOL:
                words.append(WordSegment(len(run), active, inactive, start))
        start = pos + 1
    return words


def word_length_histogram(
    words: Iterable[WordSegment], normalize: bool = False
) -> dict[int, float]:
    """Histogram of word lengths (frames per word), keys ascending."""
    tally = Counter(w.total_len for w in words)
    total = sum(tally.values())
    if normalize and total:
        return {k: tally[k] / total for k in sorted(tally)}
    return {k: tally[k] for k in sorted(tally)}


def inactive_ratio_curve(words: Sequence[WordSegment]) -> tuple[list[float], Optional[float]]:
    """Per-word unknown-frame ratios sorted ascending, and their mean.

    The mean is None when there are no words.
    """
    ratios = sorted(w.inactive_ratio for w in words)
    mean = sum(ratios) / len(ratios) if ratios else None
    return ratios, mean


STRIDE_HEADER = "#stride_ms="


def loads_als(text: str, stride_ms: float = 20.0, **meta) -> AlphabetStream:
    """Parse the contents of an .als file.

    An optional first line ``#stride_ms=<real>`` overrides ``stride_ms``.
    Error positions are offsets into the body that follows the header.
    """
    if text.startswith("\ufeff"):
        text = text[1:]
    if text.startswith(STRIDE_HEADER):
        header, _, text = text.partition("\n")
        raw = header[len(STRIDE_HEADER):].strip()
        try:
            stride_ms = float(raw)
        except ValueError:
            raise StreamFormatError(f"bad stride header {header.strip()!r}") from None
    return parse_stream(text, stride_ms, ignore_newlines=True, **meta)


def dumps_als(stream: AlphabetStream, width: int = 100) -> str:
    lines = [f"{STRIDE_HEADER}{float(stream.stride_ms)!r}"]
    s = stream.symbols
    lines += [s[i:i + width] for i in range(0, len(s), width)]
    return "\n".join(lines) + "\n"


def read_als(path, stride_ms: float = 20.0, **meta) -> AlphabetStream:
    with open(path, encoding="utf-8", newline="") as fh:
        return loads_als(fh.read(), stride_ms, **meta)


def write_als(stream: AlphabetStream, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(dumps_als(stream))
