"""Type-directed encode/decode rules.

A *shape* describes what a value is on the wire. Shapes are built once, pick
their encode/decode strategy at construction, and are then applied to any
number of values without inspecting the shape again:

>>> out = OutputBuffer()
>>> Seq(u32).encode([22, 333], out)
>>> out.getvalue().hex()
'0216cd02'

Wire rules: unsigned integers are varints, signed integers are ZigZag
varints, booleans are one byte, floats are raw little-endian bytes, strings
and byte strings are a varint length plus the raw bytes, sequences/sets/maps
are a varint count plus their elements, tuples are their fields back to back,
and user records write whatever their ``serialize`` hook writes.
"""

from __future__ import annotations

import inspect
import struct
import sys
import typing
from array import array
from operator import index

import numpy as np

from wirepack.buffers import InputBuffer, OutputBuffer
from wirepack.errors import (
    EncodeError,
    MalformedBoolError,
    MalformedStringError,
    SizeSanityError,
    ValueOverflowError,
)
from wirepack.wirecodec import (
    decode_varints,
    encode_float,
    encode_varint,
    encode_varints,
    zigzag_decode,
    zigzag_decode_array,
    zigzag_encode,
    zigzag_encode_array,
)

_BIG_ENDIAN_HOST = sys.byteorder == "big"

# Cap on zero-size elements when the source length is unknown.
ZERO_SIZE_LIMIT = 1 << 16

# Integer sequences at least this long go through the vectorized varint codec.
NUMPY_MIN_LEN = 64


class Shape:
    """Base class for wire shapes.

    Subclasses implement :meth:`encode` and :meth:`decode`. ``min_size`` is
    the fewest bytes any value of the shape occupies and ``hashable`` says
    whether decoded values can go in a set or be map keys.
    """

    min_size = 0
    hashable = True

    def encode(self, value, out: OutputBuffer) -> None:
        raise NotImplementedError

    def decode(self, inp: InputBuffer):
        raise NotImplementedError

    def _key(self) -> tuple:
        return (type(self),)

    def __eq__(self, other) -> bool:
        return isinstance(other, Shape) and self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def __repr__(self) -> str:
        return f"<shape {self}>"


# -- scalars -----------------------------------------------------------------


class UInt(Shape):
    """Unsigned integer of ``bits`` width, encoded as a varint."""

    min_size = 1

    def __init__(self, bits: int = 64) -> None:
        if bits not in (8, 16, 32, 64):
            raise ValueError(f"unsupported integer width {bits}")
        self.bits = bits
        self.max = (1 << bits) - 1

    def _key(self):
        return (UInt, self.bits)

    def __str__(self) -> str:
        return f"u{self.bits}"

    def check(self, value) -> int:
        try:
            v = index(value)
        except TypeError:
            raise EncodeError(f"{self} expects an integer, got {type(value).__name__}") from None
        if v < 0 or v > self.max:
            raise EncodeError(f"{v} out of range for {self}")
        return v

    def encode(self, value, out) -> None:
        out.write(encode_varint(self.check(value)))

    def decode(self, inp):
        start = inp.tell()
        v = inp.read_varint()
        if v > self.max:
            raise ValueOverflowError(f"{v} does not fit {self}", offset=start)
        return v

    def to_wire(self, values) -> np.ndarray | None:
        arr = _int_array(values)
        if arr is None:
            return None
        if arr.dtype.kind == "i":
            if arr.size and arr.min() < 0:
                return None
            arr = arr.astype(np.uint64)
        if arr.size and int(arr.max()) > self.max:
            return None
        return arr

    def from_wire(self, arr: np.ndarray) -> list | None:
        if self.bits < 64 and arr.size and int(arr.max()) > self.max:
            return None
        return arr.tolist()


class SInt(Shape):
    """Signed integer of ``bits`` width, ZigZag mapped then varint encoded."""

    min_size = 1

    def __init__(self, bits: int = 64) -> None:
        if bits not in (8, 16, 32, 64):
            raise ValueError(f"unsupported integer width {bits}")
        self.bits = bits
        self.min = -(1 << (bits - 1))
        self.max = (1 << (bits - 1)) - 1

    def _key(self):
        return (SInt, self.bits)

    def __str__(self) -> str:
        return f"i{self.bits}"

    def check(self, value) -> int:
        try:
            v = index(value)
        except TypeError:
            raise EncodeError(f"{self} expects an integer, got {type(value).__name__}") from None
        if v < self.min or v > self.max:
            raise EncodeError(f"{v} out of range for {self}")
        return v

    def encode(self, value, out) -> None:
        out.write(encode_varint(zigzag_encode(self.check(value))))

    def decode(self, inp):
        start = inp.tell()
        v = zigzag_decode(inp.read_varint())
        if v < self.min or v > self.max:
            raise ValueOverflowError(f"{v} does not fit {self}", offset=start)
        return v

    def to_wire(self, values) -> np.ndarray | None:
        arr = _int_array(values)
        if arr is None:
            return None
        if arr.dtype.kind == "u":
            if arr.size and int(arr.max()) > self.max:
                return None
            arr = arr.astype(np.int64)
        if arr.size and (int(arr.min()) < self.min or int(arr.max()) > self.max):
            return None
        return zigzag_encode_array(arr)

    def from_wire(self, arr: np.ndarray) -> list | None:
        vals = zigzag_decode_array(arr)
        if self.bits < 64 and vals.size and (int(vals.min()) < self.min or int(vals.max()) > self.max):
            return None
        return vals.tolist()


def _int_array(values) -> np.ndarray | None:
    try:
        arr = np.asarray(values)
    except (OverflowError, ValueError, TypeError):
        return None
    if arr.ndim != 1 or arr.dtype.kind not in "iub":
        return None
    if arr.dtype.kind == "b":
        arr = arr.astype(np.uint8)
    return arr


class Bool(Shape):
    """One byte, 0x00 or 0x01."""

    min_size = 1

    def __str__(self) -> str:
        return "bool"

    def encode(self, value, out) -> None:
        if value is True or value is False or value in (0, 1):
            out.write(b"\x01" if value else b"\x00")
        else:
            raise EncodeError(f"bool expects True/False, got {value!r}")

    def decode(self, inp):
        start = inp.tell()
        b = inp.read_byte()
        if b > 1:
            raise MalformedBoolError(f"bool byte must be 0 or 1, got 0x{b:02x}", offset=start)
        return b == 1


class Float(Shape):
    """IEEE-754 float copied as ``width`` little-endian bytes."""

    def __init__(self, width: int = 8) -> None:
        if width not in (4, 8):
            raise ValueError(f"float width must be 4 or 8, got {width}")
        self.width = width
        self.min_size = width

    def _key(self):
        return (Float, self.width)

    def __str__(self) -> str:
        return f"f{self.width * 8}"

    def encode(self, value, out) -> None:
        try:
            out.write(encode_float(value, self.width))
        except (TypeError, OverflowError, ValueError, struct.error) as exc:
            raise EncodeError(f"{self} cannot encode {value!r}: {exc}") from None

    def decode(self, inp):
        return inp.read_float(self.width)

    def pack_many(self, values) -> bytes:
        if self.width == 8:
            if isinstance(values, np.ndarray):
                try:
                    return np.ascontiguousarray(values, dtype="<f8").tobytes()
                except (TypeError, ValueError) as exc:
                    raise EncodeError(f"f64 cannot encode array: {exc}") from None
            try:
                a = array("d", values)
            except TypeError as exc:
                raise EncodeError(f"f64 expects numbers: {exc}") from None
            if _BIG_ENDIAN_HOST:
                a.byteswap()
            return a.tobytes()
        try:
            wide = np.asarray(values, dtype=np.float64)
        except (TypeError, ValueError) as exc:
            raise EncodeError(f"f32 expects numbers: {exc}") from None
        with np.errstate(over="ignore", invalid="ignore"):
            narrow = wide.astype("<f4")
        bad = np.isfinite(wide) & ~np.isfinite(narrow)
        if bad.any():
            raise EncodeError(f"{wide[bad][0]!r} out of range for f32")
        nan = np.isnan(wide)
        if nan.any():
            bits = wide[nan].view(np.uint64)
            mant = ((bits >> np.uint64(29)) & np.uint64(0x7FFFFF)).astype(np.uint32)
            mant[mant == 0] = 0x400000
            sign = (bits >> np.uint64(63)).astype(np.uint32) << np.uint32(31)
            narrow.view(np.uint32)[nan] = sign | np.uint32(0x7F800000) | mant
        return narrow.tobytes()

    def unpack_many(self, data, pos: int, count: int) -> list:
        if self.width == 8:
            a = array("d")
            a.frombytes(data[pos:pos + 8 * count])
            if _BIG_ENDIAN_HOST:
                a.byteswap()
            return a.tolist()
        bits = np.frombuffer(data, dtype="<u4", count=count, offset=pos)
        with np.errstate(invalid="ignore"):
            wide = bits.view("<f4").astype(np.float64)
        nan = ((bits & np.uint32(0x7F800000)) == np.uint32(0x7F800000)) & ((bits & np.uint32(0x7FFFFF)) != 0)
        if nan.any():
            b = bits[nan].astype(np.uint64)
            wide_bits = ((b >> np.uint64(31)) << np.uint64(63)) | (np.uint64(0x7FF) << np.uint64(52)) | (
                (b & np.uint64(0x7FFFFF)) << np.uint64(29)
            )
            wide[nan] = wide_bits.view(np.float64)
        return wide.tolist()


class Str(Shape):
    """UTF-8 text: varint byte length, then the bytes."""

    min_size = 1

    def __str__(self) -> str:
        return "str"

    def encode(self, value, out) -> None:
        if not isinstance(value, str):
            raise EncodeError(f"str expects a str, got {type(value).__name__}")
        try:
            raw = value.encode("utf-8")
        except UnicodeEncodeError as exc:
            raise EncodeError(f"str is not encodable as UTF-8: {exc}") from None
        out.write(encode_varint(len(raw)))
        out.write(raw)

    def decode(self, inp):
        n = inp.read_varint()
        start = inp.tell()
        raw = inp.read(n)
        try:
            return raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedStringError(f"invalid UTF-8: {exc.reason}", offset=start + exc.start) from None


class Bytes(Shape):
    """Opaque byte string: varint length, then the bytes."""

    min_size = 1

    def __str__(self) -> str:
        return "bytes"

    def encode(self, value, out) -> None:
        if not isinstance(value, (bytes, bytearray, memoryview)):
            raise EncodeError(f"bytes expects a bytes-like object, got {type(value).__name__}")
        out.write(encode_varint(len(value)))
        out.write(value)

    def decode(self, inp):
        return inp.read(inp.read_varint())


u8, u16, u32, u64 = UInt(8), UInt(16), UInt(32), UInt(64)
i8, i16, i32, i64 = SInt(8), SInt(16), SInt(32), SInt(64)
f32, f64 = Float(4), Float(8)
boolean = Bool()
string = Str()
blob = Bytes()


# -- containers --------------------------------------------------------------


def read_count(inp: InputBuffer, min_elem_size: int) -> int:
    """Read a container count and reject it if the remaining bytes cannot hold that many elements.

    Elements that may occupy zero bytes are budgeted at one byte each so the
    element loop is always bounded by the input length.
    """
    start = inp.tell()
    n = inp.read_varint()
    left = inp.remaining()
    if left is None:
        if min_elem_size == 0 and n > ZERO_SIZE_LIMIT:
            raise SizeSanityError(f"count {n} of zero-size elements on an unbounded stream", offset=start)
        return n
    if n * max(min_elem_size, 1) > left:
        raise SizeSanityError(
            f"count {n} needs at least {n * max(min_elem_size, 1)} bytes, {left} left", offset=start
        )
    return n


def _sized(value) -> int:
    try:
        return len(value)
    except TypeError:
        raise EncodeError(f"expected a sized collection, got {type(value).__name__}") from None


class _Items(Shape):
    """Shared machinery for count-prefixed element lists (sequences and sets)."""

    min_size = 1

    def __init__(self, elem) -> None:
        self.elem = as_shape(elem)
        e = self.elem
        if isinstance(e, Float):
            self._enc, self._dec = self._enc_float, self._dec_float
        elif isinstance(e, Bool):
            self._enc, self._dec = self._enc_bool, self._dec_bool
        elif isinstance(e, (UInt, SInt)):
            self._enc, self._dec = self._enc_int, self._dec_int
        else:
            self._enc, self._dec = self._enc_any, self._dec_any

    def _key(self):
        return (type(self), self.elem)

    def encode(self, value, out) -> None:
        self._enc(value, out)

    def decode(self, inp):
        return self._dec(inp)

    # encoders

    def _enc_any(self, value, out) -> None:
        out.write(encode_varint(_sized(value)))
        enc = self.elem.encode
        for v in value:
            enc(v, out)

    def _enc_float(self, value, out) -> None:
        out.write(encode_varint(_sized(value)))
        out.write(self.elem.pack_many(value if isinstance(value, (list, tuple, np.ndarray)) else list(value)))

    def _enc_bool(self, value, out) -> None:
        n = _sized(value)
        try:
            raw = bytes(value if isinstance(value, (list, tuple)) else list(value))
        except (TypeError, ValueError):
            raw = None
        if raw is None or len(raw) != n or raw.translate(None, b"\x00\x01"):
            out.write(encode_varint(n))
            for v in value:
                self.elem.encode(v, out)
            return
        out.write(encode_varint(n))
        out.write(raw)

    def _enc_int(self, value, out) -> None:
        n = _sized(value)
        if n >= NUMPY_MIN_LEN:
            arr = self.elem.to_wire(value if isinstance(value, (list, tuple, np.ndarray)) else list(value))
            if arr is not None:
                out.write(encode_varint(n))
                out.write(encode_varints(arr))
                return
        # Short input, or something the vectorized path refused: go value by value
        # so the first offending element produces the error.
        self._enc_any(value, out)

    # decoders (return lists; sets convert)

    def _dec_any(self, inp) -> list:
        n = read_count(inp, self.elem.min_size)
        dec = self.elem.decode
        return [dec(inp) for _ in range(n)]

    def _dec_float(self, inp) -> list:
        n = read_count(inp, self.elem.min_size)
        width = self.elem.width
        data, pos, stop = inp.window(n * width)
        if stop - pos < n * width:
            inp.read(n * width)  # raises TruncatedError with the right offset
        inp.advance(n * width)
        return self.elem.unpack_many(data, pos, n)

    def _dec_bool(self, inp) -> list:
        n = read_count(inp, 1)
        start = inp.tell()
        raw = inp.read(n)
        bad = raw.translate(None, b"\x00\x01")
        if bad:
            i = next(i for i, b in enumerate(raw) if b > 1)
            raise MalformedBoolError(f"bool byte must be 0 or 1, got 0x{raw[i]:02x}", offset=start + i)
        return list(map(bool, raw))

    def _dec_int(self, inp) -> list:
        n = read_count(inp, 1)
        if n >= NUMPY_MIN_LEN and not inp.exact:
            data, pos, stop = inp.window(10 * n)
            got = decode_varints(data, pos, stop, n)
            if got is not None:
                vals = self.elem.from_wire(got[0])
                if vals is not None:
                    inp.advance(got[1] - pos)
                    return vals
        dec = self.elem.decode
        return [dec(inp) for _ in range(n)]


class Seq(_Items):
    """Ordered sequence: varint count, then each element. Decodes to a ``list``."""

    hashable = False

    def __str__(self) -> str:
        return f"seq<{self.elem}>"


class Set(_Items):
    """Unordered set: varint count, then elements in iteration order. Decodes to a ``set``."""

    hashable = False

    def __init__(self, elem) -> None:
        super().__init__(elem)
        if not self.elem.hashable:
            raise TypeError(f"set element {self.elem} does not decode to a hashable value")

    def __str__(self) -> str:
        return f"set<{self.elem}>"

    def decode(self, inp):
        return set(self._dec(inp))


class Map(Shape):
    """Key/value mapping: varint count, then key, value, key, value, ..."""

    min_size = 1
    hashable = False

    def __init__(self, key, value) -> None:
        self.key = as_shape(key)
        self.value = as_shape(value)
        if not self.key.hashable:
            raise TypeError(f"map key {self.key} does not decode to a hashable value")

    def _key(self):
        return (Map, self.key, self.value)

    def __str__(self) -> str:
        return f"map<{self.key},{self.value}>"

    def encode(self, value, out) -> None:
        try:
            items = value.items()
        except AttributeError:
            raise EncodeError(f"map expects a mapping, got {type(value).__name__}") from None
        out.write(encode_varint(len(value)))
        kenc, venc = self.key.encode, self.value.encode
        for k, v in items:
            kenc(k, out)
            venc(v, out)

    def decode(self, inp):
        n = read_count(inp, self.key.min_size + self.value.min_size)
        kdec, vdec = self.key.decode, self.value.decode
        result = {}
        for _ in range(n):
            k = kdec(inp)
            result[k] = vdec(inp)
        return result


class Tuple(Shape):
    """Fixed-length heterogeneous tuple: fields back to back, no count."""

    def __init__(self, *fields) -> None:
        self.fields = tuple(as_shape(f) for f in fields)
        self.min_size = sum(f.min_size for f in self.fields)
        self.hashable = all(f.hashable for f in self.fields)

    def _key(self):
        return (Tuple, self.fields)

    def __str__(self) -> str:
        if len(self.fields) == 2:
            return f"pair<{self.fields[0]},{self.fields[1]}>"
        return "tuple<" + ",".join(map(str, self.fields)) + ">"

    def encode(self, value, out) -> None:
        if _sized(value) != len(self.fields):
            raise EncodeError(f"{self} expects {len(self.fields)} items, got {len(value)}")
        for shape, v in zip(self.fields, value):
            shape.encode(v, out)

    def decode(self, inp):
        return tuple(shape.decode(inp) for shape in self.fields)


def Pair(first, second) -> Tuple:
    return Tuple(first, second)


class Struct(Shape):
    """Named fields written in declaration order; values are ``dict`` objects."""

    hashable = False

    def __init__(self, fields) -> None:
        items = list(fields.items()) if isinstance(fields, dict) else list(fields)
        names = [name for name, _ in items]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate field names in {names}")
        self.fields = tuple((name, as_shape(shape)) for name, shape in items)
        self.min_size = sum(s.min_size for _, s in self.fields)

    def _key(self):
        return (Struct, self.fields)

    def __str__(self) -> str:
        return "record{" + ", ".join(f"{n}:{s}" for n, s in self.fields) + "}"

    def encode(self, value, out) -> None:
        for name, shape in self.fields:
            try:
                v = value[name]
            except (KeyError, TypeError):
                raise EncodeError(f"record value is missing field {name!r}") from None
            shape.encode(v, out)

    def decode(self, inp):
        return {name: shape.decode(inp) for name, shape in self.fields}


# -- user records ------------------------------------------------------------


class RecordShape(Shape):
    """A user class that serializes itself through ``serialize`` / ``parse`` hooks."""

    def __init__(self, cls: type) -> None:
        _check_hooks(cls)
        self.cls = cls
        self.min_size = getattr(cls, "wire_min_size", 0)
        parse = inspect.getattr_static(cls, "parse")
        self._returns = isinstance(parse, (classmethod, staticmethod))

    @property
    def hashable(self) -> bool:
        # Looked up lazily: decorators such as @dataclass may set __hash__ after registration.
        return getattr(self.cls, "__hash__", None) is not None

    def _key(self):
        return (RecordShape, self.cls)

    def __str__(self) -> str:
        return self.cls.__name__

    def encode(self, value, out) -> None:
        if not isinstance(value, self.cls):
            raise EncodeError(f"expected {self.cls.__name__}, got {type(value).__name__}")
        value.serialize(out)

    def decode(self, inp):
        if self._returns:
            return self.cls.parse(inp)
        obj = self.cls.__new__(self.cls)
        obj.parse(inp)
        return obj


def _check_hooks(cls: type) -> None:
    missing = [name for name in ("serialize", "parse") if not callable(getattr(cls, name, None))]
    if missing:
        raise TypeError(f"{cls.__name__} must define both serialize and parse; missing {', '.join(missing)}")


_RECORDS: dict[type, RecordShape] = {}


def register_record(cls: type) -> type:
    """Validate a record class's hooks and make it usable as a shape. Works as a decorator.

    ``serialize(self, out)`` must write the fields onto ``out`` (see
    :meth:`OutputBuffer.put`) and ``parse`` must read them back in the same
    order, either as a classmethod returning a new instance or as an
    instance method filling in a blank object.
    """
    _RECORDS[cls] = RecordShape(cls)
    return cls


class Serializable:
    """Mixin that registers subclasses when they are defined.

    A subclass missing either hook fails with ``TypeError`` at class
    creation time rather than at first use.
    """

    def __init_subclass__(cls, **kwargs) -> None:
        super().__init_subclass__(**kwargs)
        register_record(cls)


# -- shape resolution --------------------------------------------------------

_SIMPLE = {bool: boolean, int: i64, float: f64, str: string, bytes: blob}


_CACHE: dict = {}


def as_shape(tp) -> Shape:
    """Resolve a shape from a :class:`Shape`, a Python type, or a type hint.

    ``int`` maps to a signed 64-bit integer and ``float`` to a 64-bit float;
    use the explicit shapes (``u32``, ``f32``...) for anything else.
    ``list[T]``, ``set[T]``/``frozenset[T]``, ``dict[K, V]`` and
    ``tuple[A, B, ...]`` map to the container shapes, and classes with
    serialize/parse hooks map to :class:`RecordShape`.
    """
    if isinstance(tp, Shape):
        return tp
    try:
        return _CACHE[tp]
    except (KeyError, TypeError):
        pass
    shape = _resolve(tp)
    try:
        _CACHE[tp] = shape
    except TypeError:
        pass
    return shape


def _resolve(tp) -> Shape:
    origin = typing.get_origin(tp)
    if origin is None:
        simple = _SIMPLE.get(tp) if isinstance(tp, type) else None
        if simple is not None:
            return simple
        if isinstance(tp, type):
            rec = _RECORDS.get(tp)
            if rec is None:
                register_record(tp)
                rec = _RECORDS[tp]
            return rec
        raise TypeError(f"cannot derive a wire shape from {tp!r}")
    args = typing.get_args(tp)
    if origin is list and len(args) == 1:
        return Seq(args[0])
    if origin in (set, frozenset) and len(args) == 1:
        return Set(args[0])
    if origin is dict and len(args) == 2:
        return Map(*args)
    if origin is tuple and args and Ellipsis not in args:
        return Tuple(*args)
    raise TypeError(f"cannot derive a wire shape from {tp!r}")


def infer_shape(value) -> Shape:
    """Guess a shape from a Python value.

    Integers become ``i64``; containers take their element shape from the
    first element. Pass an explicit shape whenever unsigned or narrower
    widths matter.
    """
    if isinstance(value, bool):
        return boolean
    if isinstance(value, int):
        return i64
    if isinstance(value, float):
        return f64
    if isinstance(value, str):
        return string
    if isinstance(value, (bytes, bytearray, memoryview)):
        return blob
    if isinstance(value, list):
        return Seq(infer_shape(value[0]) if value else i64)
    if isinstance(value, (set, frozenset)):
        return Set(infer_shape(next(iter(value))) if value else i64)
    if isinstance(value, dict):
        if not value:
            return Map(i64, i64)
        k, v = next(iter(value.items()))
        return Map(infer_shape(k), infer_shape(v))
    if isinstance(value, tuple):
        return Tuple(*(infer_shape(v) for v in value))
    if isinstance(value, np.ndarray) and value.ndim == 1:
        if value.dtype.kind == "f":
            return Seq(f32 if value.dtype.itemsize == 4 else f64)
        if value.dtype.kind == "u":
            return Seq(u64)
        if value.dtype.kind == "i":
            return Seq(i64)
    return as_shape(type(value))


def serialize_value(value, out: OutputBuffer, shape=None) -> None:
    """Append the wire bytes of ``value`` to ``out``."""
    (infer_shape(value) if shape is None else as_shape(shape)).encode(value, out)


def parse_value(shape, inp: InputBuffer):
    """Parse one value of ``shape`` from ``inp``, consuming exactly its bytes."""
    return as_shape(shape).decode(inp)


__all__ = [
    "Shape", "UInt", "SInt", "Bool", "Float", "Str", "Bytes", "Seq", "Set", "Map", "Tuple", "Pair",
    "Struct", "RecordShape", "Serializable", "register_record", "as_shape", "infer_shape",
    "serialize_value", "parse_value", "read_count",
    "u8", "u16", "u32", "u64", "i8", "i16", "i32", "i64", "f32", "f64", "boolean", "string", "blob",
]
