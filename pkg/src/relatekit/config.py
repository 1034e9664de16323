"""Flat ``key = value`` config files and CLI overrides for the dataclass configs."""

from __future__ import annotations

from dataclasses import fields
from pathlib import Path

from .errors import DataError
from .model.config import ModelConfig, TrainConfig


def parse_kv_file(path: str | Path) -> dict[str, str]:
    """Parse a flat key = value file; '#' starts a comment, blank lines skipped."""
    out: dict[str, str] = {}
    path = Path(path)
    if not path.is_file():
        raise DataError(f"config file not found: {path}")
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DataError(f"{path.name}:{lineno}: expected 'key = value'")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def _coerce(raw: str, typ):
    if typ is int or typ == "int":
        return int(raw)
    if typ is float or typ == "float":
        return float(raw)
    if typ is bool or typ == "bool":
        return raw.lower() in ("1", "true", "yes")
    return raw


def apply_fields(instance, values: dict[str, str], context: str = "config"):
    """Assign matching keys onto a dataclass instance with type coercion."""
    by_name = {f.name: f for f in fields(instance)}
    for key, raw in values.items():
        if key not in by_name:
            continue
        f = by_name[key]
        typ = f.type
        if isinstance(typ, str):
            typ = typ.replace(" ", "")
            if typ in ("int|None", "Optional[int]"):
                typ = "int"
        try:
            setattr(instance, key, _coerce(raw, typ))
        except ValueError as exc:
            raise DataError(f"{context}: cannot parse {key}={raw!r}: {exc}") from None
    return instance


def known_keys(instance) -> set[str]:
    return {f.name for f in fields(instance)}


def build_model_config(
    defaults: ModelConfig, file_path: str | Path | None, overrides: dict[str, str]
) -> ModelConfig:
    if file_path:
        apply_fields(defaults, parse_kv_file(file_path), context=str(file_path))
    apply_fields(defaults, overrides, context="override")
    return defaults


def build_train_config(
    defaults: TrainConfig, file_path: str | Path | None, overrides: dict[str, str]
) -> TrainConfig:
    if file_path:
        apply_fields(defaults, parse_kv_file(file_path), context=str(file_path))
    apply_fields(defaults, overrides, context="override")
    defaults.validate()
    return defaults
