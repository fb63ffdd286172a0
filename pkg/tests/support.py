"""Oracles, equality helpers and random (shape, value) generators shared by the tests.

The oracles here deliberately avoid the library's own arithmetic: varints are
built from binary digit strings and floats from ``math.frexp``.
"""

from __future__ import annotations

import math
import random
import struct

from wirepack import serializer as S

# -- oracles -------------------------------------------------------------------


def varint_oracle(value: int) -> bytes:
    """Split the binary digit string into 7-character groups, low group first."""
    digits = bin(value)[2:]
    groups = []
    while digits:
        groups.append(digits[-7:])
        digits = digits[:-7]
    if not groups:
        groups = ["0"]
    out = [int(g, 2) | 0x80 for g in groups[:-1]] + [int(groups[-1], 2)]
    return bytes(out)


def varint_oracle_decode(data: bytes) -> int:
    total = 0
    for i, b in enumerate(data):
        total += (b % 128) * (128 ** i)
    return total


def zigzag_oracle_table(limit: int) -> dict[int, int]:
    """Enumerate 0, -1, 1, -2, 2, ... and number them 0, 1, 2, 3, 4, ..."""
    table = {}
    k = 0
    for m in range(limit):
        for s in ((m,) if m == 0 else (-m, m)):
            table[s] = k
            k += 1
    return table


def double_bits_oracle(x: float) -> int:
    """IEEE-754 binary64 bit pattern of a finite, normal or zero ``x`` from frexp."""
    sign = 1 if math.copysign(1.0, x) < 0 else 0
    if x == 0:
        return sign << 63
    m, e = math.frexp(abs(x))  # abs(x) = m * 2**e, 0.5 <= m < 1
    exponent = e - 1 + 1023
    assert 0 < exponent < 2047, "oracle only covers normal numbers"
    mantissa = int((m * 2 - 1) * (1 << 52))
    return (sign << 63) | (exponent << 52) | mantissa


# -- equality ------------------------------------------------------------------


def float_bits(x: float) -> int:
    return struct.unpack("<Q", struct.pack("<d", x))[0]


def wire_equal(a, b) -> bool:
    """Structural equality where floats compare by bit pattern (so NaN == NaN)."""
    if isinstance(a, float) and isinstance(b, float):
        return float_bits(a) == float_bits(b)
    if type(a) is not type(b):
        return False
    if isinstance(a, (list, tuple)):
        return len(a) == len(b) and all(wire_equal(x, y) for x, y in zip(a, b))
    if isinstance(a, dict):
        if a.keys() != b.keys():
            return False
        return all(wire_equal(a[k], b[k]) for k in a)
    return a == b


# -- random generation ----------------------------------------------------------

SCALARS = [S.u8, S.u16, S.u32, S.u64, S.i8, S.i16, S.i32, S.i64, S.f32, S.f64, S.boolean, S.string]
HASHABLE_SCALARS = [s for s in SCALARS if not isinstance(s, S.Float)]

_POOL_RNG = random.Random(20240601)
_ALPHABET = (
    [chr(c) for c in range(0x20, 0x7F)] * 8
    + [chr(c) for c in range(0xA1, 0x17F)]
    + [chr(c) for c in range(0x3040, 0x30FF)]
    + ["\U0001F600", "\U0001F680", "\U00010348", "\x00", "\n"]
)
TEXT_POOL = "".join(_POOL_RNG.choices(_ALPHABET, k=200_000))
STRING_LENGTHS = (0, 1, 127, 128, 129, 16383, 16384, 65535, 65536)


class ValueGen:
    """Seeded random generator of values for a shape, biased toward edge cases."""

    def __init__(self, seed: int, max_items: int = 6, max_text: int = 64, long_text: float = 0.0):
        self.rng = random.Random(seed)
        self.max_items = max_items
        self.max_text = max_text
        self.long_text = long_text

    def int_in(self, lo: int, hi: int) -> int:
        r = self.rng
        roll = r.random()
        if roll < 0.25:
            return r.choice([lo, hi, 0 if lo <= 0 <= hi else lo, min(hi, lo + 1), max(lo, hi - 1)])
        if roll < 0.5:
            # Near a power of two: exercises every varint length boundary.
            bits = r.randint(0, max(hi.bit_length(), 1))
            v = (1 << bits) + r.randint(-2, 1)
            v = -v if lo < 0 and r.random() < 0.5 else v
            return min(max(v, lo), hi)
        return r.randint(lo, hi)

    def float_value(self, width: int) -> float:
        r = self.rng
        roll = r.random()
        if roll < 0.2:
            tiny, huge = (5e-324, 1.7976931348623157e308) if width == 8 else (1.401298464324817e-45, 3.4028234663852886e38)
            return r.choice([0.0, -0.0, math.inf, -math.inf, math.nan, 1.0, -1.0, tiny, -huge, huge])
        if roll < 0.3:
            # NaN with a random payload.
            if width == 8:
                bits = (r.getrandbits(1) << 63) | (0x7FF << 52) | r.randint(1, (1 << 52) - 1)
                return struct.unpack("<d", struct.pack("<Q", bits))[0]
            # float32 NaN payload m sits in the top of the float64 mantissa: m << 29.
            bits = (r.getrandbits(1) << 63) | (0x7FF << 52) | (r.randint(1, (1 << 23) - 1) << 29)
            return struct.unpack("<d", struct.pack("<Q", bits))[0]
        if width == 4:
            bits = (r.getrandbits(1) << 31) | (r.randint(0, 254) << 23) | r.getrandbits(23)
            return struct.unpack("<f", struct.pack("<I", bits))[0]
        return struct.unpack("<d", struct.pack("<Q", r.getrandbits(64)))[0] if roll < 0.6 else r.uniform(-1e6, 1e6)

    def text(self) -> str:
        r = self.rng
        if self.long_text and r.random() < self.long_text:
            n = r.choice(STRING_LENGTHS + (r.randint(0, 65536),))
        else:
            n = r.randint(0, self.max_text)
        start = r.randint(0, len(TEXT_POOL) - n)
        s = TEXT_POOL[start:start + n]
        while len(s.encode("utf-8")) > 65536:
            s = s[: len(s) - 1024]
        return s

    def value(self, shape: S.Shape, hashable_floats: bool = False):
        r = self.rng
        if isinstance(shape, (S.UInt, S.SInt)):
            lo = 0 if isinstance(shape, S.UInt) else shape.min
            return self.int_in(lo, shape.max)
        if isinstance(shape, S.Bool):
            return r.random() < 0.5
        if isinstance(shape, S.Float):
            v = self.float_value(shape.width)
            if hashable_floats and v != v:
                v = 0.5
            return v
        if isinstance(shape, S.Str):
            return self.text()
        if isinstance(shape, S.Bytes):
            return r.randbytes(r.randint(0, self.max_text))
        if isinstance(shape, S.Seq):
            return [self.value(shape.elem) for _ in range(self._count())]
        if isinstance(shape, S.Set):
            return {self.value(shape.elem, True) for _ in range(self._count())}
        if isinstance(shape, S.Map):
            return {self.value(shape.key, True): self.value(shape.value) for _ in range(self._count())}
        if isinstance(shape, S.Tuple):
            return tuple(self.value(f, hashable_floats) for f in shape.fields)
        if isinstance(shape, S.Struct):
            return {name: self.value(s) for name, s in shape.fields}
        if isinstance(shape, S.RecordShape):
            return shape.cls.random(self)
        raise TypeError(shape)

    def _count(self) -> int:
        r = self.rng
        return 0 if r.random() < 0.15 else r.randint(1, self.max_items)


class ShapeGen:
    """Seeded random shapes up to a nesting depth; ``grammar_only`` restricts to inspector-expressible ones."""

    def __init__(self, seed: int, max_depth: int = 4, grammar_only: bool = False, records=()):
        self.rng = random.Random(seed)
        self.max_depth = max_depth
        self.grammar_only = grammar_only
        self.records = list(records)

    def nonempty(self, depth: int) -> S.Shape:
        # Elements that can be zero bytes wide are limited by the count sanity rule.
        while True:
            s = self.shape(depth)
            if s.min_size > 0:
                return s

    def shape(self, depth: int | None = None, hashable: bool = False) -> S.Shape:
        r = self.rng
        depth = self.max_depth if depth is None else depth
        if hashable:
            if depth > 0 and r.random() < 0.2:
                return S.Pair(self.shape(depth - 1, True), self.shape(depth - 1, True))
            return r.choice(HASHABLE_SCALARS)
        if depth == 0 or r.random() < 0.3:
            pool = SCALARS if self.grammar_only else SCALARS + [S.blob]
            return r.choice(pool)
        kinds = ["seq", "set", "map", "pair", "struct"]
        if not self.grammar_only:
            kinds += ["tuple"] + (["record"] if self.records else [])
        kind = r.choice(kinds)
        d = depth - 1
        if kind == "seq":
            return S.Seq(self.nonempty(d))
        if kind == "set":
            return S.Set(self.shape(d, True))
        if kind == "map":
            return S.Map(self.shape(d, True), self.shape(d))
        if kind == "pair":
            return S.Pair(self.shape(d), self.shape(d))
        if kind == "tuple":
            return S.Tuple(*(self.shape(d) for _ in range(r.randint(0, 4))))
        if kind == "record":
            return S.as_shape(r.choice(self.records))
        n = r.randint(0, 4)
        return S.Struct([(f"f{i}", self.shape(d)) for i in range(n)])


# -- hypothesis strategies ------------------------------------------------------

from hypothesis import strategies as st  # noqa: E402

hashable_shapes = st.recursive(
    st.sampled_from(HASHABLE_SCALARS),
    lambda inner: st.builds(S.Pair, inner, inner),
    max_leaves=3,
)

shapes = st.recursive(
    st.sampled_from(SCALARS + [S.blob]),
    lambda inner: st.one_of(
        st.builds(S.Seq, inner.filter(lambda s: s.min_size > 0)),
        st.builds(S.Set, hashable_shapes),
        st.builds(S.Map, hashable_shapes, inner),
        st.builds(S.Pair, inner, inner),
        st.lists(inner, max_size=3).map(lambda fs: S.Struct([(f"f{i}", s) for i, s in enumerate(fs)])),
    ),
    max_leaves=8,
)


def values_for(shape: S.Shape) -> st.SearchStrategy:
    if isinstance(shape, S.UInt):
        return st.integers(0, shape.max)
    if isinstance(shape, S.SInt):
        return st.integers(shape.min, shape.max)
    if isinstance(shape, S.Bool):
        return st.booleans()
    if isinstance(shape, S.Float):
        return st.floats(width=shape.width * 8)
    if isinstance(shape, S.Str):
        return st.text(max_size=40)
    if isinstance(shape, S.Bytes):
        return st.binary(max_size=40)
    if isinstance(shape, S.Seq):
        return st.lists(values_for(shape.elem), max_size=6)
    if isinstance(shape, S.Set):
        return st.sets(values_for(shape.elem), max_size=6)
    if isinstance(shape, S.Map):
        return st.dictionaries(values_for(shape.key), values_for(shape.value), max_size=6)
    if isinstance(shape, S.Tuple):
        return st.tuples(*(values_for(f) for f in shape.fields))
    if isinstance(shape, S.Struct):
        return st.fixed_dictionaries({n: values_for(s) for n, s in shape.fields})
    raise TypeError(shape)


@st.composite
def shaped_values(draw):
    shape = draw(shapes)
    return shape, draw(values_for(shape))
