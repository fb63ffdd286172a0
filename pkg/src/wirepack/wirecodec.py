"""Byte-level primitives: base-128 varints, ZigZag, and raw little-endian floats.

These functions work on plain ``bytes``-like objects and positions. They keep
no state and never read outside the slice they are given.
"""

from __future__ import annotations

import struct

import numpy as np

from wirepack.errors import TruncatedError, ValueOverflowError

U64_MAX = (1 << 64) - 1
I64_MIN = -(1 << 63)
I64_MAX = (1 << 63) - 1
MAX_VARINT_LEN = 10

_F32 = struct.Struct("<f")
_F64 = struct.Struct("<d")
_U32 = struct.Struct("<I")
_U64 = struct.Struct("<Q")

# Precomputed one-byte encodings; most lengths and small values hit this table.
_SMALL = [bytes((i,)) for i in range(128)]


def varint_len(value: int) -> int:
    """Number of bytes the canonical varint encoding of ``value`` takes."""
    return max(1, (value.bit_length() + 6) // 7)


def encode_varint(value: int) -> bytes:
    """Encode an unsigned 64-bit integer as a base-128 varint.

    Seven payload bits per byte, least significant group first, with the high
    bit set on every byte except the last.
    """
    if value < 128:
        if value < 0:
            raise ValueError(f"varint value must be non-negative, got {value}")
        return _SMALL[value]
    if value > U64_MAX:
        raise ValueError(f"varint value exceeds 64 bits: {value}")
    out = bytearray()
    while value >= 0x80:
        out.append((value & 0x7F) | 0x80)
        value >>= 7
    out.append(value)
    return bytes(out)


def decode_varint(data, pos: int = 0, end: int | None = None) -> tuple[int, int]:
    """Decode one varint from ``data[pos:end]``.

    Returns ``(value, next_pos)``. Non-canonical (zero padded) encodings are
    accepted. Raises :class:`TruncatedError` if the bytes end before a byte
    with a clear high bit, and :class:`ValueOverflowError` if the varint runs
    past 10 bytes or carries bits above bit 63.
    """
    if end is None:
        end = len(data)
    if pos < end:
        b = data[pos]
        if b < 0x80:
            return b, pos + 1
    result = 0
    shift = 0
    i = pos
    while True:
        if i >= end:
            raise TruncatedError("varint truncated", offset=pos)
        b = data[i]
        if shift == 63:
            # 10th byte: only bit 0 still fits under 2**64, and it must terminate.
            if b > 0x01:
                raise ValueOverflowError("varint exceeds 64 bits", offset=pos)
            return result | (b << 63), i + 1
        result |= (b & 0x7F) << shift
        i += 1
        if b < 0x80:
            return result, i
        shift += 7


def zigzag_encode(value: int) -> int:
    """Map a signed 64-bit integer onto an unsigned one: 0, -1, 1, -2 -> 0, 1, 2, 3."""
    if value >= 0:
        return value << 1
    return ((-value) << 1) - 1


def zigzag_decode(mapped: int) -> int:
    """Inverse of :func:`zigzag_encode`."""
    if mapped & 1:
        return -((mapped + 1) >> 1)
    return mapped >> 1


def _f32_nan_from_bits(bits: int) -> float:
    # Widen a float32 NaN by hand; the C conversion would set the quiet bit.
    sign = bits >> 31
    mantissa = bits & 0x7FFFFF
    wide = (sign << 63) | (0x7FF << 52) | (mantissa << 29)
    return _F64.unpack(_U64.pack(wide))[0]


def _f32_bits_from_nan(value: float) -> int:
    wide = _U64.unpack(_F64.pack(value))[0]
    sign = wide >> 63
    mantissa = (wide >> 29) & 0x7FFFFF
    if mantissa == 0:
        # Payload lived only in the low bits that float32 cannot hold.
        mantissa = 0x400000
    return (sign << 31) | (0xFF << 23) | mantissa


def encode_float(value: float, width: int = 8) -> bytes:
    """Raw IEEE-754 bytes of ``value`` in little-endian order, ``width`` 4 or 8."""
    if width == 8:
        return _F64.pack(value)
    if width == 4:
        if value != value:
            return _U32.pack(_f32_bits_from_nan(value))
        return _F32.pack(value)
    raise ValueError(f"float width must be 4 or 8, got {width}")


def decode_float(data, pos: int = 0, width: int = 8, end: int | None = None) -> tuple[float, int]:
    """Decode ``width`` raw little-endian bytes at ``pos``; returns ``(value, next_pos)``."""
    if end is None:
        end = len(data)
    if width not in (4, 8):
        raise ValueError(f"float width must be 4 or 8, got {width}")
    if pos + width > end:
        raise TruncatedError(f"need {width} bytes for a float, {max(end - pos, 0)} left", offset=pos)
    if width == 8:
        return _F64.unpack_from(data, pos)[0], pos + 8
    bits = _U32.unpack_from(data, pos)[0]
    if (bits & 0x7F800000) == 0x7F800000 and bits & 0x7FFFFF:
        return _f32_nan_from_bits(bits), pos + 4
    return _F32.unpack_from(data, pos)[0], pos + 4


# -- vectorized varints ------------------------------------------------------
#
# Bulk variants for long integer sequences. They produce exactly the bytes of
# the scalar functions above; the decoder returns None instead of raising so
# the caller can rerun the scalar path to get the precise error.

_SEVEN = [np.uint64(7 * k) for k in range(10)]
_THRESHOLDS = [np.uint64(1 << (7 * k)) for k in range(1, 10)]


def encode_varints(values: np.ndarray) -> bytes:
    """Concatenated canonical varints of a 1-D unsigned 64-bit array."""
    v = np.ascontiguousarray(values, dtype=np.uint64)
    n = v.size
    if n == 0:
        return b""
    lengths = np.ones(n, dtype=np.int64)
    for t in _THRESHOLDS:
        lengths += v >= t
    offsets = np.zeros(n, dtype=np.int64)
    np.cumsum(lengths[:-1], out=offsets[1:])
    out = np.empty(int(offsets[-1] + lengths[-1]), dtype=np.uint8)
    longest = int(lengths.max())
    if longest == 1:
        return v.astype(np.uint8).tobytes()
    for k in range(longest):
        live = lengths > k
        if k == 0:
            idx, vk, more = offsets, v, lengths > 1
        else:
            idx, vk, more = offsets[live] + k, v[live], lengths[live] > k + 1
        byte = ((vk >> _SEVEN[k]) & np.uint64(0x7F)).astype(np.uint8)
        byte |= more.astype(np.uint8) << np.uint8(7)
        out[idx] = byte
    return out.tobytes()


def decode_varints(data, pos: int, end: int, count: int):
    """Decode ``count`` varints from ``data[pos:end]``.

    Returns ``(uint64 array, next_pos)``, or ``None`` if the bytes run out,
    a varint is too long, or a value exceeds 64 bits.
    """
    if count == 0:
        return np.zeros(0, dtype=np.uint64), pos
    arr = np.frombuffer(data, dtype=np.uint8, count=end - pos, offset=pos)
    ends = np.flatnonzero(arr < 0x80)
    if ends.size < count:
        return None
    ends = ends[:count]
    if ends[-1] == count - 1:
        # Every varint is a single byte.
        return arr[:count].astype(np.uint64), pos + count
    starts = np.zeros(count, dtype=np.int64)
    starts[1:] = ends[:-1] + 1
    lengths = ends - starts + 1
    longest = int(lengths.max())
    if longest > MAX_VARINT_LEN:
        return None
    if longest == MAX_VARINT_LEN and (arr[ends[lengths == MAX_VARINT_LEN]] > 1).any():
        return None
    vals = arr[starts].astype(np.uint64) & np.uint64(0x7F)
    for k in range(1, longest):
        live = lengths > k
        vals[live] |= (arr[starts[live] + k].astype(np.uint64) & np.uint64(0x7F)) << _SEVEN[k]
    return vals, pos + int(ends[-1]) + 1


def zigzag_encode_array(values: np.ndarray) -> np.ndarray:
    v = np.ascontiguousarray(values, dtype=np.int64)
    return ((v << np.int64(1)) ^ (v >> np.int64(63))).view(np.uint64)


def zigzag_decode_array(mapped: np.ndarray) -> np.ndarray:
    m = np.ascontiguousarray(mapped, dtype=np.uint64)
    return ((m >> np.uint64(1)) ^ (np.uint64(0) - (m & np.uint64(1)))).view(np.int64)
