"""One-directional feature dumps: encoders in, RFB1 files out.

The benchmark toolkit never calls into this package; it only reads the files
these scripts emit. That process boundary keeps the benchmark's own test
suite free of any pretrained-model dependency.
"""

from .encoders import EncoderUnavailable, get_audio_encoder, get_clap_encoder, get_text_encoder
from .manifest import read_manifest
from .rfb import write_rfb1

__version__ = "0.1.0"

__all__ = [
    "EncoderUnavailable",
    "get_audio_encoder",
    "get_clap_encoder",
    "get_text_encoder",
    "read_manifest",
    "write_rfb1",
]
