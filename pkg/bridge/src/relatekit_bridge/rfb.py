"""Writer for the RFB1 tensor file format consumed by the benchmark toolkit.

Independent implementation of the published layout: magic ``RFB1``, uint32-LE
rank, uint32-LE dims, float32-LE row-major payload. Byte-level conformance
against the consumer's reader is covered by the test suite.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np


def write_rfb1(path: str | Path, array: np.ndarray) -> None:
    arr = np.asarray(array, dtype=np.float32)
    if arr.ndim not in (1, 2):
        raise ValueError(f"RFB1 carries rank 1 or 2 tensors, got rank {arr.ndim}")
    if any(d == 0 for d in arr.shape):
        raise ValueError(f"zero-sized dimension in {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("refusing to write non-finite values")
    payload = arr.astype("<f4", copy=False).tobytes(order="C")
    header = b"RFB1" + struct.pack("<I", arr.ndim) + struct.pack(f"<{arr.ndim}I", *arr.shape)
    Path(path).write_bytes(header + payload)
