"""Reading and writing of the 16-bit PCM WAV recordings the capture chain
produces.

Only integer PCM at 16 bits is supported, mono or stereo (stereo keeps
channel 0 -- the sensor is single-channel). The parser walks RIFF chunks
explicitly so that malformed files fail with the offending field and byte
offset instead of a generic error, and so that LIST/INFO chunks inserted
by capture software are skipped rather than rejected.
"""

from __future__ import annotations

import struct
import warnings
from dataclasses import dataclass

import numpy as np

WAVE_FORMAT_PCM = 1
_HEADER_BYTES = 44  # RIFF header + fmt chunk + data chunk header


class WavFormatError(ValueError):
    """Raised for malformed or unsupported WAV input.

    ``field`` names the offending structure, ``offset`` is the byte
    position where it was read.
    """

    def __init__(self, message: str, *, field: str, offset: int):
        super().__init__(f"{message} (field {field!r} at byte offset {offset})")
        self.field = field
        self.offset = offset


@dataclass(frozen=True)
class Recording:
    """Mono 16-bit sample buffer plus its sample rate."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self) -> None:
        samples = np.asarray(self.samples)
        if samples.dtype != np.int16:
            if not np.issubdtype(samples.dtype, np.integer):
                raise ValueError(f"samples must be integers, got dtype {samples.dtype}")
            if samples.size and (samples.min() < -32768 or samples.max() > 32767):
                raise ValueError("sample values outside the 16-bit range [-32768, 32767]")
            samples = samples.astype(np.int16)
        if samples.ndim != 1:
            raise ValueError(f"samples must be 1-D (mono), got shape {samples.shape}")
        object.__setattr__(self, "samples", samples)
        if not (isinstance(self.sample_rate, (int, np.integer)) and self.sample_rate > 0):
            raise ValueError(f"sample_rate must be a positive integer, got {self.sample_rate}")
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    @property
    def duration_s(self) -> float:
        return len(self.samples) / self.sample_rate

    def to_float(self) -> np.ndarray:
        """Samples scaled to [-1, 1) float64."""
        return self.samples.astype(np.float64) / 32768.0

    def __eq__(self, other) -> bool:
        if not isinstance(other, Recording):
            return NotImplemented
        return self.sample_rate == other.sample_rate and np.array_equal(
            self.samples, other.samples
        )


def _require(data: bytes, offset: int, size: int, fld: str) -> bytes:
    if offset + size > len(data):
        raise WavFormatError(
            f"file truncated: need {size} bytes, have {len(data) - offset}",
            field=fld,
            offset=offset,
        )
    return data[offset : offset + size]


def read_wav(data: bytes) -> Recording:
    """Parse a RIFF/WAVE byte buffer into a mono :class:`Recording`.

    Accepts PCM, 16-bit, 1 or 2 channels; stereo is downmixed by taking
    channel 0. Unknown chunks are skipped; anything after the data chunk
    that is not a well-formed chunk is ignored with a warning.
    """
    if _require(data, 0, 4, "riff_magic") != b"RIFF":
        raise WavFormatError("not a RIFF file", field="riff_magic", offset=0)
    _require(data, 4, 4, "riff_size")
    if _require(data, 8, 4, "wave_magic") != b"WAVE":
        raise WavFormatError("RIFF container is not WAVE", field="wave_magic", offset=8)

    fmt: dict[str, int] | None = None
    samples: np.ndarray | None = None
    pos = 12
    while pos + 8 <= len(data):
        chunk_id = data[pos : pos + 4]
        (chunk_size,) = struct.unpack_from("<I", data, pos + 4)
        body_start = pos + 8
        if body_start + chunk_size > len(data):
            if samples is not None:
                warnings.warn(
                    f"ignoring truncated trailing chunk {chunk_id!r} at byte offset {pos}"
                )
                break
            raise WavFormatError(
                f"chunk {chunk_id!r} declares {chunk_size} bytes past end of file",
                field="chunk_size",
                offset=pos + 4,
            )

        if chunk_id == b"fmt ":
            if chunk_size < 16:
                raise WavFormatError(
                    f"fmt chunk too short ({chunk_size} bytes, need 16)",
                    field="fmt_chunk",
                    offset=pos + 4,
                )
            body = _require(data, body_start, 16, "fmt_chunk")
            (audio_format, n_channels, sample_rate, _byte_rate, _block_align,
             bits_per_sample) = struct.unpack("<HHIIHH", body)
            if audio_format != WAVE_FORMAT_PCM:
                raise WavFormatError(
                    f"unsupported format code {audio_format} (only PCM=1)",
                    field="audio_format",
                    offset=body_start,
                )
            if n_channels not in (1, 2):
                raise WavFormatError(
                    f"unsupported channel count {n_channels} (only mono/stereo)",
                    field="n_channels",
                    offset=body_start + 2,
                )
            if bits_per_sample != 16:
                raise WavFormatError(
                    f"unsupported bit depth {bits_per_sample} (only 16)",
                    field="bits_per_sample",
                    offset=body_start + 14,
                )
            if sample_rate == 0:
                raise WavFormatError(
                    "sample rate must be positive", field="sample_rate", offset=body_start + 4
                )
            fmt = {"n_channels": n_channels, "sample_rate": sample_rate}
        elif chunk_id == b"data":
            if fmt is None:
                raise WavFormatError(
                    "data chunk before fmt chunk", field="data_chunk", offset=pos
                )
            n_frames = chunk_size // (2 * fmt["n_channels"])
            raw = np.frombuffer(
                data, dtype="<i2", count=n_frames * fmt["n_channels"], offset=body_start
            )
            samples = raw[:: fmt["n_channels"]].astype(np.int16)
        # all other chunk ids (LIST, INFO, fact, ...) are skipped

        pos = body_start + chunk_size + (chunk_size & 1)  # chunks are word-aligned

    if pos < len(data) and samples is not None:
        warnings.warn(f"ignoring {len(data) - pos} trailing bytes after last chunk")

    if fmt is None:
        raise WavFormatError("missing fmt chunk", field="fmt_chunk", offset=len(data))
    if samples is None:
        raise WavFormatError("missing data chunk", field="data_chunk", offset=len(data))
    return Recording(samples=samples, sample_rate=fmt["sample_rate"])


def write_wav(rec: Recording) -> bytes:
    """Serialize to a canonical minimal PCM WAV: 44-byte header + data,
    little-endian, mono, 16-bit."""
    payload = rec.samples.astype("<i2").tobytes()
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF",
        36 + len(payload),
        b"WAVE",
        b"fmt ",
        16,
        WAVE_FORMAT_PCM,
        1,
        rec.sample_rate,
        rec.sample_rate * 2,
        2,
        16,
        b"data",
        len(payload),
    )
    return header + payload


def read_wav_file(path) -> Recording:
    with open(path, "rb") as fh:
        return read_wav(fh.read())


def write_wav_file(path, rec: Recording) -> None:
    with open(path, "wb") as fh:
        fh.write(write_wav(rec))
