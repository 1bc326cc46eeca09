"""Reading, concatenating and writing 16-bit mono PCM WAV clips.

Only canonical RIFF/WAVE with PCM format 1, one channel, 16 bits per sample
is supported; anything else is rejected with the offending header field
named, rather than resampled or converted behind the caller's back.
Concatenation inserts digital-zero gaps between clips and can apply linear
fades at clip edges. All length arithmetic is in integer samples.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import CorpusForgeError


class AudioError(CorpusForgeError):
    """Audio processing failure."""


class WavParseError(AudioError):
    """Structurally broken WAV file (truncated, missing chunks...)."""


class UnsupportedWavError(AudioError):
    """Well-formed WAV with an unsupported format field."""


@dataclass(frozen=True)
class AudioClip:
    """Mono 16-bit PCM samples at a fixed rate."""

    samples: np.ndarray  # dtype int16, 1-D
    sample_rate: int
    source_path: str = ""

    def __post_init__(self):
        if self.samples.dtype != np.int16 or self.samples.ndim != 1:
            raise AudioError("samples must be a 1-D int16 array")
        if self.sample_rate <= 0:
            raise AudioError(f"sample rate must be positive, got {self.sample_rate}")

    @property
    def duration_samples(self) -> int:
        return int(self.samples.shape[0])


@dataclass(frozen=True)
class ConcatSpec:
    """Concatenation parameters: inter-word silence and per-edge fade."""

    gap_ms: int = 150
    fade_ms: int = 0

    def __post_init__(self):
        if self.gap_ms < 0 or self.fade_ms < 0:
            raise AudioError("gap_ms and fade_ms must be >= 0")


def _ms_to_samples(ms: int, rate: int) -> int:
    return (ms * rate + 500) // 1000


def read_wav(path: str | Path) -> AudioClip:
    """Parse a canonical WAV file into an :class:`AudioClip`.

    Walks the RIFF chunk list, so extra chunks (LIST, fact, ...) are fine.
    Raises :class:`UnsupportedWavError` for non-PCM, multi-channel or
    non-16-bit files and :class:`WavParseError` for structural damage.
    """
    data = Path(path).read_bytes()
    if len(data) < 12:
        raise WavParseError(f"{path}: too short to be a WAV file")
    if data[0:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise WavParseError(f"{path}: missing RIFF/WAVE signature")

    fmt = None
    pcm_bytes = None
    offset = 12
    while offset + 8 <= len(data):
        chunk_id = data[offset : offset + 4]
        (chunk_size,) = struct.unpack_from("<I", data, offset + 4)
        body = data[offset + 8 : offset + 8 + chunk_size]
        if chunk_id == b"fmt ":
            if len(body) < 16:
                raise WavParseError(f"{path}: fmt chunk truncated")
            fmt = struct.unpack_from("<HHIIHH", body, 0)
        elif chunk_id == b"data":
            if len(body) < chunk_size:
                raise WavParseError(
                    f"{path}: data chunk declares {chunk_size} bytes, "
                    f"only {len(body)} present"
                )
            pcm_bytes = body
        offset += 8 + chunk_size + (chunk_size & 1)  # chunks are word-aligned

    if fmt is None:
        raise WavParseError(f"{path}: no fmt chunk")
    if pcm_bytes is None:
        raise WavParseError(f"{path}: no data chunk")
    audio_format, channels, sample_rate, _, _, bits = fmt
    if audio_format != 1:
        raise UnsupportedWavError(f"{path}: audio_format={audio_format}, want PCM (1)")
    if channels != 1:
        raise UnsupportedWavError(f"{path}: channels={channels}, want mono (1)")
    if bits != 16:
        raise UnsupportedWavError(f"{path}: bits_per_sample={bits}, want 16")
    if len(pcm_bytes) % 2:
        raise WavParseError(f"{path}: odd data size for 16-bit samples")
    samples = np.frombuffer(pcm_bytes, dtype="<i2").astype(np.int16)
    return AudioClip(samples=samples, sample_rate=sample_rate, source_path=str(path))


def write_wav(clip: AudioClip, path: str | Path) -> None:
    """Write a clip as canonical 16-bit mono PCM WAV. Round-trips bit-exactly."""
    pcm = clip.samples.astype("<i2").tobytes()
    rate = clip.sample_rate
    header = b"RIFF" + struct.pack("<I", 36 + len(pcm)) + b"WAVE"
    header += b"fmt " + struct.pack("<IHHIIHH", 16, 1, 1, rate, rate * 2, 2, 16)
    header += b"data" + struct.pack("<I", len(pcm))
    with open(path, "wb") as f:
        f.write(header + pcm)


def _fade(samples: np.ndarray, fade_samples: int) -> np.ndarray:
    if fade_samples == 0:
        return samples
    out = samples.astype(np.float64)
    ramp = np.arange(fade_samples, dtype=np.float64) / fade_samples
    out[:fade_samples] *= ramp
    out[-fade_samples:] *= ramp[::-1]
    return np.round(out).astype(np.int16)


def concat(clips: Sequence[AudioClip], spec: ConcatSpec) -> AudioClip:
    """Join clips in order with silence gaps, returning one clip.

    Output length is exactly ``sum(clip lengths) + (n - 1) * gap_samples``.
    With gap 0 and fade 0 this is plain sample-buffer concatenation. Clips
    must share one sample rate; mixing rates is an error, never an implicit
    resample.
    """
    if not clips:
        raise AudioError("nothing to concatenate")
    rates = sorted({c.sample_rate for c in clips})
    if len(rates) > 1:
        raise AudioError(f"mixed sample rates: {rates}")
    rate = rates[0]
    gap = _ms_to_samples(spec.gap_ms, rate)
    fade = _ms_to_samples(spec.fade_ms, rate)
    shortest = min(c.duration_samples for c in clips)
    if fade > shortest // 2:
        raise AudioError(
            f"fade of {fade} samples exceeds half the shortest clip ({shortest})"
        )
    silence = np.zeros(gap, dtype=np.int16)
    pieces: list[np.ndarray] = []
    for i, clip in enumerate(clips):
        if i:
            pieces.append(silence)
        pieces.append(_fade(clip.samples, fade))
    return AudioClip(samples=np.concatenate(pieces), sample_rate=rate)


def load_plan_clips(plan, audio_root: str | Path) -> list[AudioClip]:
    """Resolve a sentence plan's recording references under `audio_root`."""
    root = Path(audio_root)
    clips = []
    for _, ref in plan.words:
        path = root / ref
        if not path.is_file():
            raise AudioError(f"recording not found: {path}")
        clips.append(read_wav(path))
    return clips
