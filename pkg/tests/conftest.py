import numpy as np
import pytest

from corpusforge.audio import AudioClip, write_wav
from corpusforge.lexicon import load_lexicon

from pathlib import Path

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def toy_lexicon():
    return load_lexicon(FIXTURES / "lexicon.tsv")


def tone_clip(freq: float, duration_s: float, rate: int = 16000) -> AudioClip:
    """Deterministic sine-tone clip used as a stand-in for word recordings."""
    n = int(round(duration_s * rate))
    t = np.arange(n, dtype=np.float64) / rate
    samples = np.round(0.3 * 32767 * np.sin(2 * np.pi * freq * t)).astype(np.int16)
    return AudioClip(samples=samples, sample_rate=rate)


RECORDED_WORDS = ("der", "hund", "bellt", "die", "katze", "schläft")


@pytest.fixture
def toy_corpus(tmp_path: Path) -> Path:
    """Materialize the bundled toy fixture: 6 tone WAVs plus a manifest.

    Layout: <dir>/audio/<word>.wav, <dir>/manifest.csv, plus copies of the
    text fixtures so a whole pipeline can run against one directory.
    """
    root = tmp_path / "toy"
    audio_dir = root / "audio"
    audio_dir.mkdir(parents=True)
    rows = ["speaker_id,session_id,block_id,microphone_id,word,"
            "repetition_index,audio_path,transcript"]
    for i, word in enumerate(RECORDED_WORDS):
        write_wav(tone_clip(220.0 + 55.0 * i, 0.25), audio_dir / f"{word}.wav")
        rows.append(f"spk1,s1,b1,m1,{word},0,{word}.wav,{word}")
    (root / "manifest.csv").write_text("\n".join(rows) + "\n", encoding="utf-8")
    for name in ("lexicon.tsv", "corpus.txt", "sentences.txt", "weights.json",
                 "pairs.jsonl"):
        (root / name).write_bytes((FIXTURES / name).read_bytes())
    return root
