"""Compact, tag-free binary serialization.

Integers are base-128 varints (ZigZag first when signed), floats are raw
little-endian bytes, containers are a count followed by their elements, and
user classes plug in through ``serialize``/``parse`` hooks.
"""

from wirepack.api import from_bytes, from_stream, to_bytes, to_stream
from wirepack.buffers import InputBuffer, OutputBuffer, attach_stream
from wirepack.errors import (
    DecodeError,
    EncodeError,
    MalformedBoolError,
    MalformedStringError,
    SizeSanityError,
    TrailingBytesError,
    TruncatedError,
    ValueOverflowError,
    WireError,
    WireIOError,
)
from wirepack.serializer import (
    Bool,
    Bytes,
    Float,
    Map,
    Pair,
    RecordShape,
    Seq,
    Serializable,
    Set,
    SInt,
    Str,
    Struct,
    Tuple,
    UInt,
    as_shape,
    blob,
    boolean,
    f32,
    f64,
    i8,
    i16,
    i32,
    i64,
    parse_value,
    register_record,
    serialize_value,
    string,
    u8,
    u16,
    u32,
    u64,
)

__version__ = "0.1.0"
