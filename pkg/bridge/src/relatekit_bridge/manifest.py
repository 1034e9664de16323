"""Input manifests: one JSON object per line, pair_id plus audio path or text."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path


@dataclass(frozen=True)
class ManifestRow:
    pair_id: str
    audio: str | None = None
    text: str | None = None


def read_manifest(path: str | Path) -> list[ManifestRow]:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"manifest not found: {path}")
    rows: list[ManifestRow] = []
    seen: set[str] = set()
    base = path.parent
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path.name}:{lineno}: malformed JSON: {exc.msg}") from exc
        pid = str(obj.get("pair_id", ""))
        if not pid:
            raise ValueError(f"{path.name}:{lineno}: missing pair_id")
        if pid in seen:
            raise ValueError(f"{path.name}:{lineno}: duplicate pair_id '{pid}'")
        seen.add(pid)
        audio = obj.get("audio")
        if audio is not None and not Path(audio).is_absolute():
            audio = str(base / audio)
        rows.append(ManifestRow(pair_id=pid, audio=audio, text=obj.get("text")))
    return rows
