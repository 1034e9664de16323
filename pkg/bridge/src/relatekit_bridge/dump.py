"""Dump scripts: run an encoder over a manifest and emit RFB1 files.

Each run writes a ``bridge_manifest.json`` beside the outputs recording the
encoder name and version, the emitted dimensionality, and (for audio) the
frame rate, so downstream consumers know exactly what produced the files.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .encoders import (
    EncoderUnavailable,
    get_audio_encoder,
    get_clap_encoder,
    get_text_encoder,
)
from .manifest import read_manifest
from .rfb import write_rfb1


def _write_run_manifest(out_dir: Path, payload: dict) -> None:
    with open(out_dir / "bridge_manifest.json", "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def dump_audio_features(manifest_path: str, out_dir: str, encoder_name: str) -> dict:
    encoder = get_audio_encoder(encoder_name)
    rows = read_manifest(manifest_path)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    dims = set()
    written = 0
    for row in rows:
        if row.audio is None:
            raise ValueError(f"manifest row '{row.pair_id}' has no audio path")
        feats = encoder.encode(row.audio)
        dims.add(feats.shape[0])
        write_rfb1(out / f"{row.pair_id}.rfb", feats)
        written += 1
    if len(dims) > 1:
        raise RuntimeError(f"feature dim changed mid-run: {sorted(dims)}")
    payload = {
        "kind": "audio",
        "encoder": encoder.name,
        "version": encoder.version,
        "feature_dim": dims.pop() if dims else encoder.dim,
        "frame_rate_hz": getattr(encoder, "frame_rate_hz", None),
        "files": written,
    }
    _write_run_manifest(out, payload)
    return payload


def dump_text_embeddings(manifest_path: str, out_dir: str, encoder_name: str) -> dict:
    encoder = get_text_encoder(encoder_name)
    rows = read_manifest(manifest_path)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    dims = set()
    written = 0
    for row in rows:
        if row.text is None:
            raise ValueError(f"manifest row '{row.pair_id}' has no text")
        emb = encoder.encode(row.text)
        dims.add(emb.shape[0])
        write_rfb1(out / f"{row.pair_id}.rfb", emb)
        written += 1
    if len(dims) > 1:
        raise RuntimeError(f"embedding dim changed mid-run: {sorted(dims)}")
    payload = {
        "kind": "text",
        "encoder": encoder.name,
        "version": encoder.version,
        "embedding_dim": dims.pop() if dims else encoder.dim,
        "files": written,
    }
    _write_run_manifest(out, payload)
    return payload


def dump_clap_embeddings(manifest_path: str, out_dir: str, encoder_name: str) -> dict:
    encoder = get_clap_encoder(encoder_name)
    rows = read_manifest(manifest_path)
    out = Path(out_dir)
    audio_dir = out / "audio"
    text_dir = out / "text"
    audio_dir.mkdir(parents=True, exist_ok=True)
    text_dir.mkdir(parents=True, exist_ok=True)
    written = 0
    for row in rows:
        if row.audio is None or row.text is None:
            raise ValueError(f"manifest row '{row.pair_id}' needs both audio and text")
        a = encoder.encode_audio(row.audio)
        t = encoder.encode_text(row.text)
        if a.shape != t.shape:
            raise RuntimeError(f"paired embedding dims differ: {a.shape} vs {t.shape}")
        write_rfb1(audio_dir / f"{row.pair_id}.rfb", a)
        write_rfb1(text_dir / f"{row.pair_id}.rfb", t)
        written += 1
    payload = {
        "kind": "clap",
        "encoder": encoder.name,
        "version": encoder.version,
        "embedding_dim": encoder.dim,
        "files": written,
    }
    _write_run_manifest(out, payload)
    return payload


def _run(kind: str, default_encoder: str, fn, argv) -> int:
    parser = argparse.ArgumentParser(description=f"dump {kind} features to RFB1 files")
    parser.add_argument("--manifest", required=True)
    parser.add_argument("--out", required=True)
    parser.add_argument("--encoder", default=default_encoder)
    args = parser.parse_args(argv)
    try:
        payload = fn(args.manifest, args.out, args.encoder)
    except EncoderUnavailable as exc:
        print(f"encoder unavailable: {exc}", file=sys.stderr)
        return 3
    except (ValueError, FileNotFoundError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {payload['files']} file(s) with {payload['encoder']} v{payload['version']}")
    return 0


def main_audio(argv=None) -> int:
    return _run("audio", "spectral", dump_audio_features, argv)


def main_text(argv=None) -> int:
    return _run("text", "hashed-text", dump_text_embeddings, argv)


def main_clap(argv=None) -> int:
    return _run("clap", "hashed-clap", dump_clap_embeddings, argv)


if __name__ == "__main__":
    sys.exit(main_audio())
