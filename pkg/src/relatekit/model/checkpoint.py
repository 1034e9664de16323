"""Single-file checkpoint format (RKP1).

Layout: magic ``RKP1``, uint32-LE version, six uint32-LE dimension fields
(F, D, C, H, H2, num_listeners), then every parameter tensor in declaration
order as float64-LE values.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from ..errors import FormatError
from .config import ModelConfig
from .network import param_shapes

MAGIC = b"RKP1"
VERSION = 1


def save_checkpoint(path: str | Path, cfg: ModelConfig, params: dict[str, np.ndarray]) -> None:
    if cfg.num_listeners is None:
        raise FormatError("cannot checkpoint a model with undetermined num_listeners")
    shapes = param_shapes(cfg)
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<7I", VERSION, cfg.F, cfg.D, cfg.C, cfg.H, cfg.H2, cfg.num_listeners))
        for name, shape in shapes.items():
            arr = params[name]
            if arr.shape != shape:
                raise FormatError(f"parameter '{name}' has shape {arr.shape}, expected {shape}")
            fh.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())


def load_checkpoint(path: str | Path) -> tuple[ModelConfig, dict[str, np.ndarray]]:
    path = Path(path)
    data = path.read_bytes()
    if len(data) < 4 + 28 or data[:4] != MAGIC:
        raise FormatError(f"{path.name}: not an RKP1 checkpoint")
    version, f, d, c, h, h2, num_listeners = struct.unpack_from("<7I", data, 4)
    if version != VERSION:
        raise FormatError(f"{path.name}: unsupported checkpoint version {version}")
    cfg = ModelConfig(F=f, D=d, C=c, H=h, H2=h2, num_listeners=num_listeners)
    offset = 4 + 28
    params: dict[str, np.ndarray] = {}
    for name, shape in param_shapes(cfg).items():
        count = int(np.prod(shape))
        end = offset + 8 * count
        if end > len(data):
            raise FormatError(f"{path.name}: truncated at parameter '{name}'")
        params[name] = (
            np.frombuffer(data, dtype="<f8", count=count, offset=offset).reshape(shape).copy()
        )
        offset = end
    if offset != len(data):
        raise FormatError(f"{path.name}: trailing bytes after parameters")
    return cfg, params
