"""Exception hierarchy for encoding and decoding.

Every problem found while decoding is a :class:`DecodeError` subclass, so a
caller can catch one type for "bad input" and still tell the cases apart.
"""

from __future__ import annotations


class WireError(Exception):
    """Base class for all errors raised by wirepack."""


class EncodeError(WireError, ValueError):
    """A value does not fit the shape it is being serialized as."""


class DecodeError(WireError, ValueError):
    """Malformed or incomplete wire bytes.

    ``offset`` is the absolute byte position where the problem was detected
    and ``path`` (set by the inspector) locates it in the schema tree.
    """

    def __init__(self, message: str, offset: int | None = None, path: str | None = None):
        super().__init__(message)
        self.message = message
        self.offset = offset
        self.path = path

    def __str__(self) -> str:
        parts = [self.message]
        if self.offset is not None:
            parts.append(f"at offset {self.offset}")
        if self.path is not None:
            parts.append(f"path {self.path}")
        return ", ".join(parts)

    def __reduce__(self):
        return (type(self), (self.message, self.offset, self.path))


class TruncatedError(DecodeError):
    """The source ran out before the value was complete."""


class ValueOverflowError(DecodeError):
    """A varint is longer than 10 bytes, exceeds 64 bits, or does not fit the target width."""


class MalformedBoolError(DecodeError):
    """A boolean byte other than 0x00 or 0x01."""


class MalformedStringError(DecodeError):
    """String bytes that are not valid UTF-8."""


class SizeSanityError(TruncatedError):
    """A container count that cannot possibly be backed by the remaining bytes.

    Raised before anything is allocated for the elements. It subclasses
    :class:`TruncatedError` because the message is necessarily too short.
    """


class TrailingBytesError(DecodeError):
    """Bytes left over after a complete message."""


class WireIOError(WireError, OSError):
    """An I/O failure in an attached stream, with the byte offset it happened at."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset
