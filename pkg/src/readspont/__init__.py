"""Read vs spontaneous speech classification from frame-level alphabet streams."""

from .alphabet import (
    AlphabetStream,
    IllegalCharacter,
    Label,
    NonPositiveStride,
    StreamFormatError,
    WordPolicy,
    WordSegment,
    encode,
    inactive_ratio_curve,
    parse_stream,
    read_als,
    segment_words,
    word_length_histogram,
    write_als,
)
from .features import DerivedFeatures, MeasuredFeatures, derive, extract, measure
from .scoring import DEFAULT_PARAMS, Decision, RulePolarity, ScoreParams, classify, score

__version__ = "0.1.0"
