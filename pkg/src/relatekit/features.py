"""RFB1 binary tensor files: the carrier for audio feature matrices and text vectors.

Layout: 4-byte magic ``RFB1``, uint32-LE rank (1 or 2), one uint32-LE per
dimension, then the payload as float32-LE values in row-major order.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import FormatError

MAGIC = b"RFB1"
_MAX_ELEMENTS = 2**31  # guard against absurd headers before allocating


@dataclass(frozen=True)
class FeatureBundle:
    """Audio feature matrix (F x T) and text vector (length D) for one pair."""

    audio: np.ndarray  # shape (F, T), float32
    text: np.ndarray  # shape (D,), float32


def write_feature(path: str | Path, array: np.ndarray) -> None:
    """Write a rank-1 or rank-2 float array; non-finite values are rejected."""
    arr = np.asarray(array, dtype=np.float32)
    if arr.ndim not in (1, 2):
        raise FormatError(f"only rank 1 or 2 supported, got rank {arr.ndim}")
    if any(dim == 0 for dim in arr.shape):
        raise FormatError(f"zero-sized dimension in shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise FormatError("refusing to write non-finite values")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", arr.ndim))
        fh.write(struct.pack(f"<{arr.ndim}I", *arr.shape))
        fh.write(np.ascontiguousarray(arr).astype("<f4", copy=False).tobytes())


def read_feature(path: str | Path) -> np.ndarray:
    """Read an RFB1 file back into a float32 array, validating the header."""
    path = Path(path)
    data = path.read_bytes()
    if len(data) < 8:
        raise FormatError(f"{path.name}: truncated header")
    if data[:4] != MAGIC:
        raise FormatError(f"{path.name}: bad magic {data[:4]!r}")
    (rank,) = struct.unpack_from("<I", data, 4)
    if rank not in (1, 2):
        raise FormatError(f"{path.name}: unsupported rank {rank}")
    header_end = 8 + 4 * rank
    if len(data) < header_end:
        raise FormatError(f"{path.name}: truncated dimension list")
    dims = struct.unpack_from(f"<{rank}I", data, 8)
    if any(dim == 0 for dim in dims):
        raise FormatError(f"{path.name}: zero-sized dimension in {dims}")
    n_elem = 1
    for dim in dims:
        n_elem *= dim
    if n_elem > _MAX_ELEMENTS:
        raise FormatError(f"{path.name}: dimension overflow ({dims})")
    expected = header_end + 4 * n_elem
    if len(data) < expected:
        raise FormatError(
            f"{path.name}: truncated payload (expected {expected} bytes, got {len(data)})"
        )
    if len(data) > expected:
        raise FormatError(f"{path.name}: trailing bytes after payload")
    arr = np.frombuffer(data, dtype="<f4", count=n_elem, offset=header_end)
    return arr.reshape(dims).copy()


def read_bundle(features_dir: str | Path, pair_id: str) -> FeatureBundle:
    """Load the (audio, text) feature pair stored under a features directory.

    Expected layout: ``<dir>/audio/<pair_id>.rfb`` (rank 2) and
    ``<dir>/text/<pair_id>.rfb`` (rank 1).
    """
    root = Path(features_dir)
    audio = read_feature(root / "audio" / f"{pair_id}.rfb")
    text = read_feature(root / "text" / f"{pair_id}.rfb")
    if audio.ndim != 2:
        raise FormatError(f"audio features for '{pair_id}' must be rank 2, got {audio.ndim}")
    if text.ndim != 1:
        raise FormatError(f"text features for '{pair_id}' must be rank 1, got {text.ndim}")
    return FeatureBundle(audio=audio, text=text)
