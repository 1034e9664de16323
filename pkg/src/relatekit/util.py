"""Small shared helpers."""

from __future__ import annotations

import os


def worker_count(requested: int | None = None) -> int:
    """Worker-pool size, capped by the RELATE_KIT_THREADS environment variable.

    Defaults to 1; every stage is correct single-threaded and parallelism is
    purely an I/O throughput knob.
    """
    cap = os.environ.get("RELATE_KIT_THREADS")
    try:
        cap_val = max(1, int(cap)) if cap else 1
    except ValueError:
        cap_val = 1
    if requested is None:
        return cap_val
    return max(1, min(requested, cap_val))
