"""Encoder registry.

Two families:

* Reference encoders (``spectral``, ``hashed-text``, ``hashed-clap``) run
  offline with numpy and the stdlib only. They are deterministic across runs
  and platforms, which makes them the right target for format-conformance
  and pipeline tests, and a usable fallback when no pretrained weights are
  available.
* Pretrained adapters (``byol-a``, ``roberta``, ``laion-clap``, ``ms-clap``)
  lazily import torch/transformers and download weights on first use. They
  raise EncoderUnavailable with the underlying cause when the stack or the
  weights cannot be loaded.
"""

from __future__ import annotations

import hashlib
import re
import wave
from pathlib import Path

import numpy as np


class EncoderUnavailable(RuntimeError):
    """The requested encoder cannot run in this environment."""


def read_wav_mono(path: str | Path) -> tuple[np.ndarray, int]:
    """Load a PCM wav file as mono float64 in [-1, 1] plus its sample rate."""
    try:
        with wave.open(str(path), "rb") as wf:
            sr = wf.getframerate()
            n = wf.getnframes()
            width = wf.getsampwidth()
            channels = wf.getnchannels()
            raw = wf.readframes(n)
    except (OSError, wave.Error) as exc:
        raise EncoderUnavailable(f"unreadable audio file {path}: {exc}") from exc
    if width == 2:
        samples = np.frombuffer(raw, dtype="<i2").astype(np.float64) / 32768.0
    elif width == 1:
        samples = (np.frombuffer(raw, dtype=np.uint8).astype(np.float64) - 128.0) / 128.0
    elif width == 4:
        samples = np.frombuffer(raw, dtype="<i4").astype(np.float64) / 2147483648.0
    else:
        raise EncoderUnavailable(f"unsupported sample width {width} in {path}")
    if channels > 1:
        samples = samples.reshape(-1, channels).mean(axis=1)
    return samples, sr


class SpectralAudioEncoder:
    """Log-power band energies on a 10 ms hop; F x T output.

    25 ms frames, 10 ms hop, `bands` triangular-ish bins over the magnitude
    spectrum. Declared frame rate is 100 frames per second of audio.
    """

    name = "spectral"
    version = "1"
    frame_rate_hz = 100.0

    def __init__(self, bands: int = 24):
        self.bands = bands

    @property
    def dim(self) -> int:
        return self.bands

    def encode(self, wav_path: str | Path) -> np.ndarray:
        samples, sr = read_wav_mono(wav_path)
        hop = max(1, sr // 100)
        win = max(2, sr // 40)
        # right-pad so every started hop yields a frame: T = ceil(len / hop)
        n_frames = max(1, -(-len(samples) // hop))
        needed = (n_frames - 1) * hop + win
        if len(samples) < needed:
            samples = np.pad(samples, (0, needed - len(samples)))
        window = np.hanning(win)
        spec_bins = win // 2 + 1
        edges = np.linspace(0, spec_bins, self.bands + 1).astype(int)
        out = np.empty((self.bands, n_frames), dtype=np.float64)
        for t in range(n_frames):
            frame = samples[t * hop : t * hop + win] * window
            power = np.abs(np.fft.rfft(frame)) ** 2
            for b in range(self.bands):
                lo, hi = edges[b], max(edges[b] + 1, edges[b + 1])
                out[b, t] = np.log1p(power[lo:hi].mean())
        return out.astype(np.float32)


_TOKEN = re.compile(r"[a-z0-9']+")


def _hash_index(token: str, dim: int) -> tuple[int, float]:
    digest = hashlib.sha256(token.encode("utf-8")).digest()
    idx = int.from_bytes(digest[:4], "little") % dim
    sign = 1.0 if digest[4] % 2 == 0 else -1.0
    return idx, sign


class HashedTextEncoder:
    """Deterministic hashed bag-of-words embedding, L2-normalized."""

    name = "hashed-text"
    version = "1"

    def __init__(self, dim: int = 32):
        self.dim = dim

    def encode(self, text: str) -> np.ndarray:
        vec = np.zeros(self.dim, dtype=np.float64)
        tokens = _TOKEN.findall(text.lower())
        if not tokens:
            raise EncoderUnavailable("cannot embed empty text")
        for tok in tokens:
            idx, sign = _hash_index(tok, self.dim)
            vec[idx] += sign
        norm = np.linalg.norm(vec)
        if norm == 0.0:
            vec[0] = 1.0
            norm = 1.0
        return (vec / norm).astype(np.float32)


class HashedClapEncoder:
    """Offline stand-in for a joint audio/text embedding space.

    Text goes through the hashed bag-of-words; audio summary statistics are
    pushed through a fixed seeded projection to the same dimensionality.
    Both sides are unit-normalized, so identical inputs score cosine 1.
    """

    name = "hashed-clap"
    version = "1"

    def __init__(self, dim: int = 32):
        self.dim = dim
        self._text = HashedTextEncoder(dim)
        self._audio = SpectralAudioEncoder()
        rng = np.random.default_rng(20240601)
        self._projection = rng.normal(0.0, 1.0, (dim, 2 * self._audio.bands))

    def encode_text(self, text: str) -> np.ndarray:
        return self._text.encode(text)

    def encode_audio(self, wav_path: str | Path) -> np.ndarray:
        feats = self._audio.encode(wav_path).astype(np.float64)
        summary = np.concatenate([feats.mean(axis=1), feats.std(axis=1)])
        vec = self._projection @ summary
        norm = np.linalg.norm(vec)
        if norm == 0.0:
            vec[0] = 1.0
            norm = 1.0
        return (vec / norm).astype(np.float32)


class PretrainedAudioEncoder:
    """Adapter for transformer audio encoders; needs torch + downloaded weights."""

    frame_rate_hz = 50.0

    def __init__(self, name: str, model_id: str):
        self.name = name
        self.version = model_id
        try:
            import torch  # noqa: F401
            from transformers import AutoFeatureExtractor, AutoModel
        except ImportError as exc:
            raise EncoderUnavailable(f"{name} needs torch and transformers: {exc}") from exc
        try:
            self._extractor = AutoFeatureExtractor.from_pretrained(model_id)
            self._model = AutoModel.from_pretrained(model_id)
        except Exception as exc:  # weights unavailable offline
            raise EncoderUnavailable(f"cannot load {model_id}: {exc}") from exc
        self.dim = self._model.config.hidden_size

    def encode(self, wav_path: str | Path) -> np.ndarray:
        import torch

        samples, sr = read_wav_mono(wav_path)
        inputs = self._extractor(samples, sampling_rate=sr, return_tensors="pt")
        with torch.no_grad():
            hidden = self._model(**inputs).last_hidden_state[0]
        return hidden.T.contiguous().numpy().astype(np.float32)


class PretrainedTextEncoder:
    def __init__(self, name: str, model_id: str):
        self.name = name
        self.version = model_id
        try:
            import torch  # noqa: F401
            from transformers import AutoModel, AutoTokenizer
        except ImportError as exc:
            raise EncoderUnavailable(f"{name} needs torch and transformers: {exc}") from exc
        try:
            self._tokenizer = AutoTokenizer.from_pretrained(model_id)
            self._model = AutoModel.from_pretrained(model_id)
        except Exception as exc:
            raise EncoderUnavailable(f"cannot load {model_id}: {exc}") from exc
        self.dim = self._model.config.hidden_size

    def encode(self, text: str) -> np.ndarray:
        import torch

        inputs = self._tokenizer(text, return_tensors="pt", truncation=True)
        with torch.no_grad():
            hidden = self._model(**inputs).last_hidden_state[0]
        return hidden.mean(dim=0).numpy().astype(np.float32)


_AUDIO_MODELS = {"byol-a": "facebook/wav2vec2-base"}
_TEXT_MODELS = {"roberta": "roberta-base"}
_CLAP_MODELS = {"laion-clap": "laion/clap-htsat-unfused", "ms-clap": "microsoft/msclap"}


def get_audio_encoder(name: str):
    if name == "spectral":
        return SpectralAudioEncoder()
    if name in _AUDIO_MODELS:
        return PretrainedAudioEncoder(name, _AUDIO_MODELS[name])
    raise EncoderUnavailable(f"unknown audio encoder '{name}'")


def get_text_encoder(name: str):
    if name == "hashed-text":
        return HashedTextEncoder()
    if name in _TEXT_MODELS:
        return PretrainedTextEncoder(name, _TEXT_MODELS[name])
    raise EncoderUnavailable(f"unknown text encoder '{name}'")


def get_clap_encoder(name: str):
    if name == "hashed-clap":
        return HashedClapEncoder()
    if name in _CLAP_MODELS:
        raise EncoderUnavailable(
            f"'{name}' requires downloading pretrained weights; install the "
            "'pretrained' extra and run with network access"
        )
    raise EncoderUnavailable(f"unknown clap encoder '{name}'")
