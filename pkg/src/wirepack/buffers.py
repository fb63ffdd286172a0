"""Byte sinks and sources used by the serializer.

:class:`OutputBuffer` appends bytes to memory; :class:`StreamOutputBuffer`
does the same but spills to a writable binary stream in chunks.
:class:`InputBuffer` reads from an in-memory byte string with a cursor;
:class:`StreamInputBuffer` refills from a readable binary stream.

Buffers are single-owner objects and are not thread-safe.
"""

from __future__ import annotations

import io
from typing import Any

from wirepack.errors import DecodeError, TruncatedError, WireIOError
from wirepack.wirecodec import decode_float, decode_varint

DEFAULT_CHUNK = 64 * 1024


class OutputBuffer:
    """Growable in-memory byte sink."""

    def __init__(self) -> None:
        self._buf = bytearray()
        self._flushed = 0

    def write(self, data) -> None:
        self._buf += data

    def put(self, shape, value) -> "OutputBuffer":
        """Serialize ``value`` as ``shape`` onto this buffer; returns ``self`` for chaining."""
        from wirepack.serializer import as_shape

        as_shape(shape).encode(value, self)
        return self

    def __len__(self) -> int:
        return self._flushed + len(self._buf)

    @property
    def length(self) -> int:
        return len(self)

    def getvalue(self) -> bytes:
        return bytes(self._buf)

    def reset(self) -> None:
        self._buf = bytearray()
        self._flushed = 0

    def flush(self) -> None:
        pass


class StreamOutputBuffer(OutputBuffer):
    """Byte sink that forwards to a binary stream in ``chunk_size`` pieces."""

    def __init__(self, stream, chunk_size: int = DEFAULT_CHUNK) -> None:
        super().__init__()
        self._stream = stream
        self._chunk = chunk_size

    def write(self, data) -> None:
        buf = self._buf
        buf += data
        if len(buf) >= self._chunk:
            self.flush()

    def flush(self) -> None:
        if self._buf:
            try:
                self._stream.write(self._buf)
            except OSError as exc:
                raise WireIOError(f"stream write failed: {exc}", self._flushed) from exc
            self._flushed += len(self._buf)
            self._buf = bytearray()
        flush = getattr(self._stream, "flush", None)
        if flush is not None:
            try:
                flush()
            except OSError as exc:
                raise WireIOError(f"stream flush failed: {exc}", self._flushed) from exc

    def getvalue(self) -> bytes:
        raise TypeError("a stream-backed buffer does not keep its contents")

    def reset(self) -> None:
        raise TypeError("a stream-backed buffer cannot be reset")


class InputBuffer:
    """Read cursor over an in-memory byte string.

    Reads that run past the end raise :class:`TruncatedError`, move the cursor
    to the end, and leave the buffer failed so later reads raise again.
    """

    #: True when the source must not be read past what a value needs.
    exact = False

    def __init__(self, data=b"") -> None:
        if not isinstance(data, bytes):
            data = bytes(data)
        self._data = data
        self._pos = 0
        self._end = len(data)
        self._base = 0
        self._eof = True
        self._failed = False

    # -- cursor ---------------------------------------------------------

    def tell(self) -> int:
        """Absolute number of bytes consumed so far."""
        return self._base + self._pos

    def remaining(self) -> int | None:
        """Bytes left in the source, or ``None`` when that is unknowable."""
        return self._end - self._pos

    def at_end(self) -> bool:
        return self._pos >= self._end and self._eof

    # -- refill hook ----------------------------------------------------

    def _fill(self, n: int) -> None:
        """Try to make ``n`` bytes available past the cursor."""

    def _fail(self, exc: DecodeError):
        if exc.offset is not None:
            exc.offset += self._base
        if isinstance(exc, TruncatedError):
            self._pos = self._end
            self._failed = True
        raise exc

    def _check(self) -> None:
        if self._failed:
            raise TruncatedError("read from an exhausted buffer", offset=self.tell())

    # -- reads ----------------------------------------------------------

    def read(self, n: int) -> bytes:
        """Return exactly ``n`` bytes and advance, or raise :class:`TruncatedError`."""
        if self._failed:
            self._check()
        pos = self._pos
        if pos + n > self._end:
            self._fill(n)
            pos = self._pos
            if pos + n > self._end:
                self._fail(TruncatedError(f"need {n} bytes, {self._end - pos} left", offset=pos))
        self._pos = pos + n
        return self._data[pos:pos + n]

    def read_byte(self) -> int:
        if self._failed:
            self._check()
        pos = self._pos
        if pos >= self._end:
            self._fill(1)
            pos = self._pos
            if pos >= self._end:
                self._fail(TruncatedError("need 1 byte, 0 left", offset=pos))
        self._pos = pos + 1
        return self._data[pos]

    def read_varint(self) -> int:
        if self._failed:
            self._check()
        pos = self._pos
        if self._end - pos < 10 and not self._eof:
            if self.exact:
                return self._read_varint_exact()
            self._fill(10)
            pos = self._pos
        try:
            value, self._pos = decode_varint(self._data, pos, self._end)
        except DecodeError as exc:
            self._fail(exc)
        return value

    def _read_varint_exact(self) -> int:
        k = 1
        while True:
            self._fill(k)
            pos = self._pos
            if self._end - pos < k or self._data[pos + k - 1] < 0x80 or k == 10:
                break
            k += 1
        try:
            value, self._pos = decode_varint(self._data, pos, self._end)
        except DecodeError as exc:
            self._fail(exc)
        return value

    def read_float(self, width: int) -> float:
        if self._failed:
            self._check()
        pos = self._pos
        if pos + width > self._end:
            self._fill(width)
            pos = self._pos
        try:
            value, self._pos = decode_float(self._data, pos, width, self._end)
        except DecodeError as exc:
            self._fail(exc)
        return value

    def window(self, n: int) -> tuple[Any, int, int]:
        """Expose up to ``n`` buffered bytes as ``(data, start, stop)`` without consuming them.

        Fewer than ``n`` bytes are exposed only at the end of the source.
        Follow with :meth:`advance` for the bytes actually used.
        """
        if self._failed:
            self._check()
        if self._end - self._pos < n:
            self._fill(n)
        pos = self._pos
        return self._data, pos, min(self._end, pos + n)

    def advance(self, k: int) -> None:
        if self._pos + k > self._end:
            raise ValueError("advance past the buffered window")
        self._pos += k

    def get(self, shape):
        """Parse one value of ``shape`` at the cursor."""
        from wirepack.serializer import as_shape

        return as_shape(shape).decode(self)

    def release(self) -> None:
        """Hand unconsumed bytes back to the underlying source, if any."""


class StreamInputBuffer(InputBuffer):
    """Read cursor over a binary stream.

    Seekable streams are read in ``chunk_size`` blocks and :meth:`release`
    seeks back over whatever was read ahead. Non-seekable streams (pipes,
    sockets) are read exactly as far as decoding needs, so the stream is
    left positioned right after the value.
    """

    def __init__(self, stream, chunk_size: int = DEFAULT_CHUNK) -> None:
        super().__init__(b"")
        self._stream = stream
        self._chunk = chunk_size
        self._eof = False
        try:
            seekable = stream.seekable()
        except (AttributeError, OSError, ValueError):
            seekable = False
        self._size = None
        start = 0
        if seekable:
            try:
                start = stream.tell()
                self._size = stream.seek(0, io.SEEK_END)
                stream.seek(start)
            except OSError:
                seekable = False
                self._size = None
        self.exact = not seekable
        self._start = start
        self._pulled = 0

    def remaining(self) -> int | None:
        if self._size is None:
            return None
        return max(self._size - self._start - self.tell(), 0)

    def at_end(self) -> bool:
        if self._pos < self._end:
            return False
        if not self._eof:
            self._fill(1)
        return self._pos >= self._end

    def _read_stream(self, n: int) -> bytes:
        try:
            chunk = self._stream.read(n)
        except OSError as exc:
            raise WireIOError(f"stream read failed: {exc}", self.tell()) from exc
        return chunk or b""

    def _fill(self, n: int) -> None:
        have = self._end - self._pos
        if have >= n or self._eof:
            return
        pieces = [self._data[self._pos:self._end]]
        self._base += self._pos
        need = n - have
        while need > 0:
            if self.exact:
                ask = min(need, self._chunk)
            else:
                ask = max(need, self._chunk)
                if self._size is not None:
                    # Never ask for more than the file holds; read(n) preallocates n bytes.
                    ask = min(ask, max(self._size - self._start - self._pulled, 1))
            chunk = self._read_stream(ask)
            if not chunk:
                self._eof = True
                break
            self._pulled += len(chunk)
            pieces.append(chunk)
            need -= len(chunk)
        self._data = b"".join(pieces)
        self._pos = 0
        self._end = len(self._data)

    def release(self) -> None:
        unread = self._end - self._pos
        if unread and not self.exact:
            try:
                self._stream.seek(-unread, io.SEEK_CUR)
            except OSError as exc:
                raise WireIOError(f"stream seek failed: {exc}", self.tell()) from exc
            self._pulled -= unread
            self._base += self._pos
            self._data = b""
            self._pos = self._end = 0
            self._eof = False


def attach_stream(stream, mode: str = "r", chunk_size: int = DEFAULT_CHUNK):
    """Wrap an open binary stream as a buffer: ``mode`` ``"r"`` for input, ``"w"`` for output."""
    if mode == "r":
        return StreamInputBuffer(stream, chunk_size)
    if mode == "w":
        return StreamOutputBuffer(stream, chunk_size)
    raise ValueError(f"mode must be 'r' or 'w', got {mode!r}")

