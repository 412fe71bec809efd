"""
Three-sigmoid readability score and the threshold / borderline decision.

    R = s(l1 (f1 - t1)) + s(-l2 (f2 - t2)) + s(l3 (f3 - t3)),   s(z) = 1 / (1 + e^-z)

with f1 = active frames per word, f2 = unknown frames per second and
f3 = words per second. R lies in (0, 3); a segment is labeled by comparing
R with tau_r, and flagged borderline when R falls in [tau_r - delta, tau_r + delta].
"""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Mapping, Optional

from .alphabet import Label
from .features import DerivedFeatures


class ConfigError(ValueError):
    pass


class NonFiniteInput(ValueError):
    pass


class RulePolarity(str, enum.Enum):
    # scores at or above tau_r are spontaneous; separates the reference read/spontaneous profiles
    SPONTANEOUS_ABOVE = "spontaneous-above"
    # scores at or above tau_r are read, as the threshold rule is printed
    READ_ABOVE = "paper-literal"

    @classmethod
    def parse(cls, text: str) -> "RulePolarity":
        aliases = {"read-above": cls.READ_ABOVE, "default": cls.SPONTANEOUS_ABOVE}
        key = text.strip().lower()
        if key in aliases:
            return aliases[key]
        try:
            return cls(key)
        except ValueError:
            choices = ", ".join([p.value for p in cls] + list(aliases))
            raise ConfigError(f"unknown rule polarity {text!r} (choose from {choices})") from None


@dataclass(frozen=True)
class ScoreParams:
    lambda1: float = 1.0
    lambda2: float = 1.0
    lambda3: float = 1.0
    tau1: float = 6.0
    tau2: float = 10.0
    tau3: float = 1.75
    tau_r: float = 1.75
    delta: float = 0.05
    rule_polarity: RulePolarity = RulePolarity.SPONTANEOUS_ABOVE

    def __post_init__(self):
        for f in fields(self):
            if f.name == "rule_polarity":
                continue
            value = getattr(self, f.name)
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise ConfigError(f"{f.name} must be a finite number, got {value!r}")
        for name in ("lambda1", "lambda2", "lambda3"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be > 0")
        if self.delta < 0:
            raise ConfigError("delta must be >= 0")
        if not 0 <= self.tau_r <= 3:
            raise ConfigError("tau_r must lie in [0, 3]")
        if not isinstance(self.rule_polarity, RulePolarity):
            object.__setattr__(self, "rule_polarity", RulePolarity.parse(str(self.rule_polarity)))

    @classmethod
    def from_mapping(cls, values: Mapping[str, object], base: Optional["ScoreParams"] = None) -> "ScoreParams":
        """Override ``base`` (defaults if omitted) with string or numeric values.

        Keys may use dashes or underscores (``tau-r`` == ``tau_r``).
        """
        known = {f.name for f in fields(cls)}
        updates = {}
        for raw_key, raw in values.items():
            key = raw_key.strip().lower().replace("-", "_")
            if key not in known:
                raise ConfigError(f"unknown parameter {raw_key!r}")
            if key == "rule_polarity":
                updates[key] = raw if isinstance(raw, RulePolarity) else RulePolarity.parse(str(raw))
                continue
            try:
                updates[key] = float(raw)
            except (TypeError, ValueError):
                raise ConfigError(f"parameter {raw_key!r} is not a number: {raw!r}") from None
        return replace(base or cls(), **updates)

    @classmethod
    def from_file(cls, path, base: Optional["ScoreParams"] = None) -> "ScoreParams":
        """Read a flat ``key=value`` file; blank lines and '#' comments ignored."""
        values = {}
        for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, value = line.split("=", 1)
            values[key.strip()] = value.strip()
        return cls.from_mapping(values, base)

    def to_text(self) -> str:
        return "".join(f"{k}={v}\n" for k, v in self.as_dict().items())

    def as_dict(self) -> dict:
        d = asdict(self)
        d["rule_polarity"] = self.rule_polarity.value
        return d


DEFAULT_PARAMS = ScoreParams()


def sigmoid(z: float) -> float:
    # branch on sign so exp() never overflows; saturates to exactly 0.0 / 1.0
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    ez = math.exp(z)
    return ez / (1.0 + ez)


def score(f1: float, f2: float, f3: float, p: ScoreParams = DEFAULT_PARAMS) -> float:
    for name, v in (("f1", f1), ("f2", f2), ("f3", f3)):
        if v is None or not math.isfinite(v):
            raise NonFiniteInput(f"{name} must be finite, got {v!r}")
    return (
        sigmoid(p.lambda1 * (f1 - p.tau1))
        + sigmoid(-p.lambda2 * (f2 - p.tau2))
        + sigmoid(p.lambda3 * (f3 - p.tau3))
    )


def is_borderline(r: float, p: ScoreParams = DEFAULT_PARAMS) -> bool:
    return p.tau_r - p.delta <= r <= p.tau_r + p.delta


def label_for(r: float, p: ScoreParams = DEFAULT_PARAMS) -> Label:
    above = r >= p.tau_r
    if p.rule_polarity is RulePolarity.READ_ABOVE:
        return Label.READ if above else Label.SPONTANEOUS
    return Label.SPONTANEOUS if above else Label.READ


@dataclass(frozen=True)
class Decision:
    score: Optional[float]  # None when undetermined
    label: Label
    borderline: bool


def classify(f: DerivedFeatures, p: ScoreParams = DEFAULT_PARAMS) -> Decision:
    if not f.defined:
        return Decision(None, Label.UNDETERMINED, False)
    r = score(f.active_awl, f.inactive_aps, f.wps, p)
    return Decision(r, label_for(r, p), is_borderline(r, p))
