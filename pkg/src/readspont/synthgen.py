"""
Synthetic alphabet streams with known feature targets.

A generated stream is laid out as words separated by single separators,
padded with extra separators (which never create words) so that the frame
count matches the requested duration exactly. Unknown frames are placed
partly between letters of a word and partly at word edges; both stay inside
the separator-delimited run, so every word keeps at least one letter.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional, Sequence

from .alphabet import LETTERS, SEPARATOR, UNKNOWN, AlphabetStream, Label, write_als
from .corpus import ManifestEntry, write_manifest


class InfeasibleProfile(ValueError):
    pass


@dataclass(frozen=True)
class GenProfile:
    wps_target: float
    active_awl_target: float
    inactive_aps_target: float
    duration_s: float = 30.0
    stride_ms: float = 20.0
    seed: int = 0

    @property
    def frame_rate(self) -> float:
        return 1000 / self.stride_ms

    @property
    def frames_per_second_needed(self) -> float:
        return self.wps_target * (self.active_awl_target + 1) + self.inactive_aps_target

    @property
    def feasible(self) -> bool:
        try:
            self.check()
        except InfeasibleProfile:
            return False
        return True

    def check(self) -> None:
        for name in ("wps_target", "active_awl_target", "inactive_aps_target", "duration_s", "stride_ms"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise InfeasibleProfile(f"{name} must be positive, got {v!r}")
        if self.active_awl_target < 1:
            raise InfeasibleProfile("active_awl_target must be >= 1 (every word holds a letter)")
        if self.frames_per_second_needed > self.frame_rate:
            raise InfeasibleProfile(
                f"needs {self.frames_per_second_needed:.3f} frames/s but the stride allows {self.frame_rate:.3f}"
            )

    def jittered(self, rng: random.Random, jitter: float) -> "GenProfile":
        return replace(
            self,
            wps_target=self.wps_target * rng.uniform(1 - jitter, 1 + jitter),
            active_awl_target=self.active_awl_target * rng.uniform(1 - jitter, 1 + jitter),
            inactive_aps_target=self.inactive_aps_target * rng.uniform(1 - jitter, 1 + jitter),
        )


# reference profiles at the read / spontaneous feature columns of the measured passage
READ_PROFILE = GenProfile(wps_target=2.43, active_awl_target=13.21, inactive_aps_target=13.92, duration_s=30.0, seed=7)
SPONT_PROFILE = GenProfile(wps_target=1.45, active_awl_target=27.75, inactive_aps_target=7.63, duration_s=48.0, seed=7)


def apportion(total: int, weights: Sequence[float]) -> list[int]:
    """Split ``total`` into integers proportional to ``weights`` (largest remainder).

    Ties go to the lower index. Zero total weight splits evenly.
    """
    n = len(weights)
    if n == 0:
        if total:
            raise ValueError("cannot apportion a non-zero total over no slots")
        return []
    wsum = float(sum(weights))
    if wsum <= 0:
        weights, wsum = [1.0] * n, float(n)
    quotas = [total * w / wsum for w in weights]
    parts = [int(math.floor(q)) for q in quotas]
    short = total - sum(parts)
    order = sorted(range(n), key=lambda i: (-(quotas[i] - parts[i]), i))
    for i in order[:short]:
        parts[i] += 1
    return parts


def _geometric(rng: random.Random, mean: float) -> int:
    """Integer >= 1 with the given mean (geometric on {1, 2, ...})."""
    if mean <= 1:
        return 1
    p = 1.0 / mean
    u = 1.0 - rng.random()  # (0, 1]
    return 1 + int(math.log(u) / math.log1p(-p))


def _spread(rng: random.Random, count: int, slots: int) -> list[int]:
    out = [0] * slots
    for _ in range(count):
        out[rng.randrange(slots)] += 1
    return out


def generate(profile: GenProfile, intra_fraction: float = 0.7, stream_id: Optional[str] = None,
             **meta) -> AlphabetStream:
    """Build a stream whose derived features match the profile's targets.

    ``intra_fraction`` of the unknown frames go between letters of a word,
    the rest at word edges.
    """
    profile.check()
    if not 0 <= intra_fraction <= 1:
        raise ValueError("intra_fraction must lie in [0, 1]")
    rng = random.Random(profile.seed)

    n_frames = round(profile.duration_s * profile.frame_rate)
    duration = n_frames * profile.stride_ms / 1000
    n_words = round(profile.wps_target * duration)
    if n_words < 1:
        raise InfeasibleProfile("duration too short for a single word at this word rate")
    n_active = max(round(profile.active_awl_target * n_words), n_words)
    n_inactive = round(profile.inactive_aps_target * duration)
    padding = n_frames - (n_active + n_inactive + n_words - 1)
    if padding < 0:
        raise InfeasibleProfile("frame budget exceeded after rounding to whole frames")

    draws = [_geometric(rng, profile.active_awl_target) - 1 for _ in range(n_words)]
    lengths = [1 + k for k in apportion(n_active - n_words, draws)]

    gaps = [n - 1 for n in lengths]
    n_intra = round(intra_fraction * n_inactive) if sum(gaps) else 0
    n_edge = n_inactive - n_intra

    intra = [0] * n_words
    if n_intra:
        # each unknown frame lands in a uniformly chosen letter gap
        owner = [w for w, g in enumerate(gaps) for _ in range(g)]
        for w in rng.choices(owner, k=n_intra):
            intra[w] += 1
    edges = _spread(rng, n_edge, 2 * n_words)  # (before, after) per word
    pads = _spread(rng, padding, n_words + 1)

    parts = [SEPARATOR * pads[0]]
    for w, n in enumerate(lengths):
        letters = [rng.choice(LETTERS) for _ in range(n)]
        in_gap = _spread(rng, intra[w], n - 1) if n > 1 else []
        body = letters[0] + "".join(UNKNOWN * g + ch for g, ch in zip(in_gap, letters[1:]))
        parts.append(UNKNOWN * edges[2 * w] + body + UNKNOWN * edges[2 * w + 1])
        if w < n_words - 1:
            parts.append(SEPARATOR)
        parts.append(SEPARATOR * pads[w + 1])
    symbols = "".join(parts)
    assert len(symbols) == n_frames

    return AlphabetStream(symbols, profile.stride_ms, id=stream_id or f"synth-{profile.seed}", **meta)


def generate_corpus(
    n_read: int,
    n_spont: int,
    read_profile: GenProfile = READ_PROFILE,
    spont_profile: GenProfile = SPONT_PROFILE,
    jitter: float = 0.1,
    seed: int = 1,
    out_dir=None,
    n_speakers: int = 10,
    intra_fraction: float = 0.7,
    max_redraws: int = 1000,
) -> tuple[list[ManifestEntry], list[AlphabetStream]]:
    """Generate labeled streams with per-stream uniform jitter on every target.

    A jittered draw that breaks the frame budget is redrawn, so targets follow
    the uniform jitter box restricted to the feasible region. With ``out_dir``
    the .als files and ``manifest.csv`` are written there.
    """
    if not 0 <= jitter < 1:
        raise ValueError("jitter must lie in [0, 1)")
    read_profile.check()
    spont_profile.check()
    rng = random.Random(seed)

    entries, streams = [], []
    plan = [(Label.READ, read_profile, i) for i in range(n_read)]
    plan += [(Label.SPONTANEOUS, spont_profile, i) for i in range(n_spont)]
    for label, base, i in plan:
        sid = f"{'read' if label is Label.READ else 'spont'}-{i:03d}"
        speaker = f"spk{i % n_speakers:02d}" if n_speakers else None
        for _ in range(max_redraws):
            prof = replace(base.jittered(rng, jitter), seed=rng.randrange(2**32))
            try:
                stream = generate(prof, intra_fraction, stream_id=sid, speaker=speaker, ground_truth=label)
            except InfeasibleProfile:
                continue
            break
        else:
            raise InfeasibleProfile(f"no feasible {label.value} draw in {max_redraws} tries at jitter {jitter}")
        streams.append(stream)

    if out_dir is None:
        return [ManifestEntry(f"{s.id}.als", s.id, s.speaker, s.ground_truth) for s in streams], streams

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for s in streams:
        path = out / f"{s.id}.als"
        write_als(s, path)
        entries.append(ManifestEntry(str(path), s.id, s.speaker, s.ground_truth))
    write_manifest(entries, out / "manifest.csv", relative_to=out)
    return entries, streams
