"""One-call helpers: serialize to bytes or a stream, and parse back."""

from __future__ import annotations

from wirepack.buffers import InputBuffer, OutputBuffer, StreamInputBuffer, StreamOutputBuffer
from wirepack.errors import TrailingBytesError
from wirepack.serializer import as_shape, infer_shape


def _shape_for(value, shape):
    return infer_shape(value) if shape is None else as_shape(shape)


def to_bytes(value, shape=None) -> bytes:
    """Serialize ``value`` into a new byte string.

    Without ``shape`` the shape is inferred from the value (``int`` becomes a
    signed 64-bit integer); pass one to get unsigned or narrower encodings.
    """
    out = OutputBuffer()
    _shape_for(value, shape).encode(value, out)
    return out.getvalue()


def from_bytes(shape, data) -> object:
    """Parse exactly one value of ``shape`` from ``data``.

    Leftover bytes after the value raise :class:`TrailingBytesError`.
    """
    inp = InputBuffer(data)
    value = as_shape(shape).decode(inp)
    if not inp.at_end():
        raise TrailingBytesError(f"{inp.remaining()} bytes after the message", offset=inp.tell())
    return value


def to_stream(value, stream, shape=None) -> int:
    """Serialize ``value`` onto a writable binary stream; returns the byte count."""
    out = StreamOutputBuffer(stream)
    _shape_for(value, shape).encode(value, out)
    out.flush()
    return len(out)


def from_stream(shape, stream) -> object:
    """Parse one value of ``shape`` from a readable binary stream.

    The stream is left positioned right after the value, so several messages
    written back to back can be read with repeated calls.
    """
    inp = StreamInputBuffer(stream)
    try:
        return as_shape(shape).decode(inp)
    finally:
        inp.release()
