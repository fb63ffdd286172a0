"""Text schema expressions for the inspector.

Grammar (whitespace allowed between tokens)::

    type   := scalar | seq<type> | set<type> | map<type,type>
            | pair<type,type> | record{name:type, ...}
    scalar := u8 | u16 | u32 | u64 | i8 | i16 | i32 | i64 | f32 | f64 | bool | str
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from wirepack import serializer as S

MAX_DEPTH = 32

SCALARS = {
    "u8": S.u8, "u16": S.u16, "u32": S.u32, "u64": S.u64,
    "i8": S.i8, "i16": S.i16, "i32": S.i32, "i64": S.i64,
    "f32": S.f32, "f64": S.f64, "bool": S.boolean, "str": S.string,
}
_UNARY = ("seq", "set")
_BINARY = ("map", "pair")

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


class SchemaError(ValueError):
    """A schema expression that is malformed or cannot be decoded."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.message = message
        self.offset = offset


class SchemaSyntaxError(SchemaError):
    pass


class DepthExceeded(SchemaError):
    pass


@dataclass(frozen=True)
class SchemaExpr:
    """One node of a parsed schema.

    ``kind`` is a scalar name or one of seq/set/map/pair/record; ``args``
    holds child expressions and ``names`` the record field names.
    """

    kind: str
    args: tuple = ()
    names: tuple = ()
    pos: int = field(default=0, compare=False)

    def __str__(self) -> str:
        if self.kind in SCALARS:
            return self.kind
        if self.kind == "record":
            return "record{" + ", ".join(f"{n}:{a}" for n, a in zip(self.names, self.args)) + "}"
        return f"{self.kind}<" + ",".join(map(str, self.args)) + ">"

    def depth(self) -> int:
        if not self.args:
            return 0 if self.kind in SCALARS else 1
        return 1 + max(a.depth() for a in self.args)


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def _skip(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def _expect(self, ch: str) -> None:
        self._skip()
        if self.pos >= len(self.text):
            raise SchemaSyntaxError(f"expected {ch!r}, found end of input", self.pos)
        if self.text[self.pos] != ch:
            raise SchemaSyntaxError(f"expected {ch!r}, found {self.text[self.pos]!r}", self.pos)
        self.pos += 1

    def _peek(self) -> str:
        self._skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def _ident(self, what: str) -> tuple[str, int]:
        self._skip()
        m = _IDENT.match(self.text, self.pos)
        if m is None:
            found = repr(self.text[self.pos]) if self.pos < len(self.text) else "end of input"
            raise SchemaSyntaxError(f"expected {what}, found {found}", self.pos)
        self.pos = m.end()
        return m.group(), m.start()

    def parse_type(self, depth: int) -> SchemaExpr:
        name, start = self._ident("a type")
        if name in SCALARS:
            return SchemaExpr(name, pos=start)
        if depth >= MAX_DEPTH:
            raise DepthExceeded(f"nesting deeper than {MAX_DEPTH}", start)
        if name in _UNARY:
            self._expect("<")
            elem = self.parse_type(depth + 1)
            self._expect(">")
            return SchemaExpr(name, (elem,), pos=start)
        if name in _BINARY:
            self._expect("<")
            a = self.parse_type(depth + 1)
            self._expect(",")
            b = self.parse_type(depth + 1)
            self._expect(">")
            return SchemaExpr(name, (a, b), pos=start)
        if name == "record":
            return self._record(start, depth)
        raise SchemaSyntaxError(f"unknown type {name!r}", start)

    def _record(self, start: int, depth: int) -> SchemaExpr:
        self._expect("{")
        names: list[str] = []
        args: list[SchemaExpr] = []
        if self._peek() == "}":
            self.pos += 1
            return SchemaExpr("record", pos=start)
        while True:
            fname, fpos = self._ident("a field name")
            if fname in names:
                raise SchemaSyntaxError(f"duplicate field {fname!r}", fpos)
            self._expect(":")
            names.append(fname)
            args.append(self.parse_type(depth + 1))
            if self._peek() == ",":
                self.pos += 1
                continue
            self._expect("}")
            return SchemaExpr("record", tuple(args), tuple(names), pos=start)


def parse_schema(text: str) -> SchemaExpr:
    """Parse a schema expression, raising :class:`SchemaSyntaxError` with the offending offset."""
    p = _Parser(text)
    expr = p.parse_type(0)
    p._skip()
    if p.pos != len(text):
        raise SchemaSyntaxError(f"unexpected {text[p.pos]!r} after the type", p.pos)
    return expr


def to_shape(expr: SchemaExpr) -> S.Shape:
    """Build the library shape that decodes what ``expr`` describes."""
    kind = expr.kind
    if kind in SCALARS:
        return SCALARS[kind]
    args = [to_shape(a) for a in expr.args]
    try:
        if kind == "seq":
            return S.Seq(args[0])
        if kind == "set":
            return S.Set(args[0])
        if kind == "map":
            return S.Map(args[0], args[1])
        if kind == "pair":
            return S.Pair(args[0], args[1])
    except TypeError as exc:
        raise SchemaError(str(exc), expr.args[0].pos) from None
    return S.Struct(list(zip(expr.names, args)))


def from_shape(shape: S.Shape) -> SchemaExpr:
    """Schema expression for a library shape; raises ``TypeError`` for shapes the grammar lacks."""
    for name, scalar in SCALARS.items():
        if shape == scalar:
            return SchemaExpr(name)
    if isinstance(shape, S.Seq):
        return SchemaExpr("seq", (from_shape(shape.elem),))
    if isinstance(shape, S.Set):
        return SchemaExpr("set", (from_shape(shape.elem),))
    if isinstance(shape, S.Map):
        return SchemaExpr("map", (from_shape(shape.key), from_shape(shape.value)))
    if isinstance(shape, S.Tuple) and len(shape.fields) == 2:
        return SchemaExpr("pair", tuple(from_shape(f) for f in shape.fields))
    if isinstance(shape, S.Struct):
        return SchemaExpr(
            "record", tuple(from_shape(s) for _, s in shape.fields), tuple(n for n, _ in shape.fields)
        )
    raise TypeError(f"no schema syntax for {shape}")
