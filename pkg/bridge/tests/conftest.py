import json
import math
import wave
from pathlib import Path

import pytest


def write_wav(path: Path, duration_s: float, sr: int = 16_000, freq: float = 440.0) -> None:
    """A little sine-burst wav so the encoders have something real to chew on."""
    n = int(duration_s * sr)
    with wave.open(str(path), "wb") as wf:
        wf.setnchannels(1)
        wf.setsampwidth(2)
        wf.setframerate(sr)
        frames = bytearray()
        for i in range(n):
            v = 0.4 * math.sin(2 * math.pi * freq * i / sr)
            v += 0.1 * math.sin(2 * math.pi * 3.7 * freq * i / sr)
            frames += int(v * 32767).to_bytes(2, "little", signed=True)
        wf.writeframes(bytes(frames))


@pytest.fixture
def wav_dir(tmp_path):
    out = tmp_path / "wavs"
    out.mkdir()
    write_wav(out / "a.wav", 1.0, freq=440.0)
    write_wav(out / "b.wav", 0.5, freq=660.0)
    write_wav(out / "c.wav", 10.0, freq=220.0)
    return out


@pytest.fixture
def audio_manifest(tmp_path, wav_dir):
    path = tmp_path / "audio_manifest.jsonl"
    rows = [
        {"pair_id": "a", "audio": str(wav_dir / "a.wav")},
        {"pair_id": "b", "audio": str(wav_dir / "b.wav")},
        {"pair_id": "c", "audio": str(wav_dir / "c.wav")},
    ]
    path.write_text("".join(json.dumps(r) + "\n" for r in rows))
    return path


@pytest.fixture
def clap_manifest(tmp_path, wav_dir):
    path = tmp_path / "clap_manifest.jsonl"
    rows = [
        {"pair_id": "a", "audio": str(wav_dir / "a.wav"), "text": "a bell ringing brightly"},
        {"pair_id": "b", "audio": str(wav_dir / "b.wav"), "text": "a higher bell chiming"},
    ]
    path.write_text("".join(json.dumps(r) + "\n" for r in rows))
    return path
