"""Schema-driven decoding of wire bytes into an annotated tree.

The format carries no type tags, so a schema says how to read the bytes.
Every node in the result records the half-open byte range it came from:

    $: seq<u32> @[0,4) count=2 @[0,1)
      [0]: u32 = 22 @[1,2)
      [1]: u32 = 333 @[2,4)

Scalars and container counts are read with the library's own decoders,
so the inspector and :func:`wirepack.from_bytes` cannot disagree.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field

from wirepack import serializer as S
from wirepack.buffers import InputBuffer
from wirepack.errors import DecodeError, TrailingBytesError
from wirepack.schema import SchemaError, SchemaExpr, parse_schema, to_shape

_SCALAR_SHAPES = (S.UInt, S.SInt, S.Bool, S.Float, S.Str, S.Bytes, S.RecordShape)


@dataclass
class Node:
    """A decoded value with its byte range ``[start, end)``.

    Scalars carry ``value``; containers carry ``count`` (with the range of
    the count prefix) and ``children``. Records and pairs have children but
    no count.
    """

    path: str
    type: str
    kind: str
    start: int
    end: int
    value: object = None
    count: int | None = None
    count_range: tuple[int, int] | None = None
    children: list["Node"] = field(default_factory=list)
    label: str = "$"

    def to_value(self):
        """Rebuild the plain Python value this node decoded to."""
        k = self.kind
        if k == "scalar":
            return self.value
        if k == "seq":
            return [c.to_value() for c in self.children]
        if k == "set":
            return {c.to_value() for c in self.children}
        if k == "map":
            return {e.children[0].to_value(): e.children[1].to_value() for e in self.children}
        if k == "pair":
            return tuple(c.to_value() for c in self.children)
        return {c.label: c.to_value() for c in self.children}

    def leaves(self):
        if self.kind == "scalar":
            yield self
        for c in self.children:
            yield from c.leaves()

    def to_json(self) -> dict:
        d = {"path": self.path, "type": self.type, "range": [self.start, self.end]}
        if self.kind == "scalar":
            d["value"] = _json_scalar(self.value)
        if self.count is not None:
            d["count"] = self.count
            d["count_range"] = list(self.count_range)
        if self.kind != "scalar":
            d["children"] = [c.to_json() for c in self.children]
        return d


def _json_scalar(v):
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    if isinstance(v, (bytes, bytearray)):
        return v.hex()
    if isinstance(v, (int, float, str, bool)) or v is None:
        return v
    return repr(v)


def _walk(shape: S.Shape, inp: InputBuffer, path: str, label: str) -> Node:
    start = inp.tell()
    try:
        if isinstance(shape, _SCALAR_SHAPES):
            value = shape.decode(inp)
            return Node(path, str(shape), "scalar", start, inp.tell(), value=value, label=label)
        if isinstance(shape, (S.Seq, S.Set)):
            n = S.read_count(inp, shape.elem.min_size)
            count_end = inp.tell()
            kids = [_walk(shape.elem, inp, f"{path}[{i}]", f"[{i}]") for i in range(n)]
            kind = "seq" if isinstance(shape, S.Seq) else "set"
            return Node(path, str(shape), kind, start, inp.tell(), count=n,
                        count_range=(start, count_end), children=kids, label=label)
        if isinstance(shape, S.Map):
            n = S.read_count(inp, shape.key.min_size + shape.value.min_size)
            count_end = inp.tell()
            entries = []
            for i in range(n):
                e_start = inp.tell()
                key = _walk(shape.key, inp, f"{path}[{i}].key", "key")
                val = _walk(shape.value, inp, f"{path}[{i}].value", "value")
                entries.append(Node(f"{path}[{i}]", f"pair<{shape.key},{shape.value}>", "pair",
                                    e_start, inp.tell(), children=[key, val], label=f"[{i}]"))
            return Node(path, str(shape), "map", start, inp.tell(), count=n,
                        count_range=(start, count_end), children=entries, label=label)
        if isinstance(shape, S.Tuple):
            kids = [_walk(f, inp, f"{path}[{i}]", f"[{i}]") for i, f in enumerate(shape.fields)]
            return Node(path, str(shape), "pair", start, inp.tell(), children=kids, label=label)
        if isinstance(shape, S.Struct):
            kids = [_walk(s, inp, f"{path}.{name}", name) for name, s in shape.fields]
            return Node(path, str(shape), "record", start, inp.tell(), children=kids, label=label)
    except DecodeError as exc:
        if exc.path is None:
            exc.path = path
        raise
    raise TypeError(f"cannot inspect shape {shape}")


def inspect(schema, data) -> Node:
    """Decode ``data`` against ``schema`` (text, :class:`SchemaExpr`, or shape).

    The whole input must be consumed; decode errors carry the byte offset and
    the schema path (``$``, ``$[1]``, ``$.field``...) where they happened.
    """
    if isinstance(schema, str):
        schema = parse_schema(schema)
    shape = to_shape(schema) if isinstance(schema, SchemaExpr) else S.as_shape(schema)
    inp = InputBuffer(data)
    root = _walk(shape, inp, "$", "$")
    if not inp.at_end():
        raise TrailingBytesError(f"{inp.remaining()} bytes after the message", offset=inp.tell(), path="$")
    return root


def render_tree(node: Node, indent: int = 0) -> str:
    lines: list[str] = []
    _render(node, indent, lines)
    return "\n".join(lines)


def _render(node: Node, indent: int, lines: list[str]) -> None:
    pad = "  " * indent
    rng = f"@[{node.start},{node.end})"
    if node.kind == "scalar":
        lines.append(f"{pad}{node.label}: {node.type} = {node.value!r} {rng}")
        return
    head = f"{pad}{node.label}: {node.type} {rng}"
    if node.count is not None:
        head += f" count={node.count} @[{node.count_range[0]},{node.count_range[1]})"
    lines.append(head)
    for c in node.children:
        _render(c, indent + 1, lines)


# -- command line -------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_help(sys.stderr)
        self.exit(2, f"\n{self.prog}: error: {message}\n")


def parse_hex(text: str) -> bytes:
    """Hex digits with any whitespace between them, case-insensitive."""
    return bytes.fromhex("".join(text.split()))


def build_parser(prog: str = "wirepack inspect") -> argparse.ArgumentParser:
    p = _Parser(prog=prog, description="Decode wire bytes against a schema expression.")
    p.add_argument("--schema", required=True, help="type expression, e.g. 'seq<u32>'")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--hex", help="input bytes as hex text (whitespace ignored)")
    src.add_argument("--in", dest="path", help="read input from this file (default: stdin)")
    p.add_argument("--input-encoding", choices=("raw", "hex"), default="raw",
                   help="how --in / stdin content is encoded (default raw)")
    p.add_argument("--format", choices=("tree", "json"), default="tree")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        schema = parse_schema(args.schema)
        shape = to_shape(schema)
    except SchemaError as exc:
        parser.print_help(sys.stderr)
        print(f"\nbad --schema: {exc}", file=sys.stderr)
        return 2
    try:
        if args.hex is not None:
            data = parse_hex(args.hex)
        else:
            if args.path is not None:
                with open(args.path, "rb") as fh:
                    raw = fh.read()
            else:
                raw = sys.stdin.buffer.read()
            data = parse_hex(raw.decode("ascii")) if args.input_encoding == "hex" else raw
    except (ValueError, UnicodeDecodeError) as exc:
        print(f"bad hex input: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"cannot read input: {exc}", file=sys.stderr)
        return 2
    try:
        root = inspect(shape, data)
    except DecodeError as exc:
        print(f"decode error: {type(exc).__name__}: {exc.message} (offset {exc.offset}, path {exc.path})")
        return 1
    if args.format == "json":
        print(json.dumps(root.to_json(), indent=2))
    else:
        print(render_tree(root))
    return 0
