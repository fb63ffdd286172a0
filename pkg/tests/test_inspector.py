import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import wirepack as wp
from support import SCALARS, shaped_values, wire_equal
from wirepack import serializer as S
from wirepack.inspector import inspect, main, parse_hex, render_tree
from wirepack.schema import DepthExceeded, SchemaError, SchemaSyntaxError, from_shape, parse_schema, to_shape

CASE2 = "record{n:u32, from:set<u32>, to:set<u32>}"


# -- schema grammar --------------------------------------------------------------------


def test_parse_seq_u32():
    expr = parse_schema("seq<u32>")
    assert expr.kind == "seq" and expr.args[0].kind == "u32"
    assert to_shape(expr) == S.Seq(S.u32)


def test_parse_case2_record():
    expr = parse_schema(CASE2)
    assert expr.kind == "record"
    assert expr.names == ("n", "from", "to")
    assert to_shape(expr) == S.Struct([("n", S.u32), ("from", S.Set(S.u32)), ("to", S.Set(S.u32))])


@pytest.mark.parametrize(
    "text, offset",
    [
        ("map<str,", 8),
        ("seq<u32", 7),
        ("seq<u33>", 4),
        ("seq u32", 4),
        ("", 0),
        ("u32 u32", 4),
        ("record{a:u8, a:u8}", 13),
        ("record{a u8}", 9),
        ("pair<u8>", 7),
    ],
)
def test_syntax_errors(text, offset):
    with pytest.raises(SchemaSyntaxError) as err:
        parse_schema(text)
    assert err.value.offset == offset


def test_whitespace_and_empty_record():
    assert parse_schema("  map < str , seq<f64> >  ") == parse_schema("map<str,seq<f64>>")
    assert to_shape(parse_schema("record{}")) == S.Struct([])


def test_depth_limit():
    ok = "seq<" * 32 + "u8" + ">" * 32
    assert parse_schema(ok).depth() == 32
    with pytest.raises(DepthExceeded):
        parse_schema("seq<" * 33 + "u8" + ">" * 33)


def test_unhashable_set_element():
    with pytest.raises(SchemaError):
        to_shape(parse_schema("set<seq<u8>>"))


def _grammar_shapes():
    return st.recursive(
        st.sampled_from(SCALARS),
        lambda inner: st.one_of(
            st.builds(S.Seq, inner),
            st.builds(S.Pair, inner, inner),
            st.builds(S.Map, st.sampled_from([S.u8, S.string, S.i64]), inner),
            st.lists(inner, max_size=3).map(lambda fs: S.Struct([(f"x{i}", s) for i, s in enumerate(fs)])),
        ),
        max_leaves=10,
    )


@given(_grammar_shapes())
def test_print_parse_round_trip(shape):
    expr = from_shape(shape)
    again = parse_schema(str(expr))
    assert again == expr
    assert to_shape(again) == shape


# -- inspect ---------------------------------------------------------------------------


def test_case1_tree():
    root = inspect("seq<u32>", bytes.fromhex("0216cd02"))
    assert root.count == 2 and root.count_range == (0, 1)
    assert [(c.value, c.start, c.end) for c in root.children] == [(22, 1, 2), (333, 2, 4)]
    assert (root.start, root.end) == (0, 4)
    assert render_tree(root).splitlines() == [
        "$: seq<u32> @[0,4) count=2 @[0,1)",
        "  [0]: u32 = 22 @[1,2)",
        "  [1]: u32 = 333 @[2,4)",
    ]


def test_case2_tree():
    data = bytes.fromhex("21020b1602422c")
    root = inspect(CASE2, data)
    n, src, dst = root.children
    assert n.value == 33
    assert src.count == 2 and {c.value for c in src.children} == {11, 22}
    assert dst.count == 2 and {c.value for c in dst.children} == {44, 66}
    assert root.end == 7


def test_truncated_report():
    with pytest.raises(wp.TruncatedError) as err:
        inspect("f64", b"\x00\x00\x00")
    assert err.value.offset == 0 and err.value.path == "$"


def test_error_path_points_inside():
    with pytest.raises(wp.MalformedBoolError) as err:
        inspect("record{a:u8, b:seq<bool>}", bytes([1, 2, 1, 9]))
    assert err.value.path == "$.b[1]" and err.value.offset == 3


def test_trailing_bytes():
    with pytest.raises(wp.TrailingBytesError):
        inspect("u8", b"\x01\x02")


def test_empty_container_range():
    root = inspect("seq<f64>", b"\x00")
    assert (root.start, root.end) == (0, 1) and root.children == []


def _check_tiling(node):
    if node.kind == "scalar":
        return
    cursor = node.count_range[1] if node.count is not None else node.start
    if node.count is not None:
        assert node.count_range[0] == node.start
    for c in node.children:
        assert c.start == cursor
        _check_tiling(c)
        cursor = c.end
    assert cursor == node.end


@settings(max_examples=200, deadline=None)
@given(shaped_values())
def test_inspector_agrees_with_library(sv):
    shape, value = sv
    try:
        schema = str(from_shape(shape))
    except TypeError:
        return  # blob / tuple shapes have no schema spelling
    data = wp.to_bytes(value, shape)
    root = inspect(schema, data)
    assert wire_equal(root.to_value(), wp.from_bytes(shape, data))
    assert (root.start, root.end) == (0, len(data))
    _check_tiling(root)


def test_json_output_shape():
    root = inspect("map<str,f64>", wp.to_bytes({"a": float("nan")}, wp.Map(wp.string, wp.f64)))
    doc = root.to_json()
    json.dumps(doc)
    assert doc["count"] == 1
    entry = doc["children"][0]
    assert entry["children"][0]["value"] == "a"
    assert entry["children"][1]["value"] == "nan"


# -- command line ----------------------------------------------------------------------


def test_cli_case1(capsys):
    assert main(["--schema", "seq<u32>", "--hex", "02 16 cd 02"]) == 0
    out = capsys.readouterr().out
    assert "count=2" in out and "= 333 @[2,4)" in out


def test_cli_hex_whitespace_and_case(capsys):
    main(["--schema", "seq<u32>", "--hex", "0216CD02"])
    a = capsys.readouterr().out
    main(["--schema", "seq<u32>", "--hex", " 02 16\n cd\t02 "])
    assert capsys.readouterr().out == a
    assert parse_hex("0216CD02") == parse_hex("02 16 cd 02")


def test_cli_decode_error(capsys):
    assert main(["--schema", "u8", "--hex", ""]) == 1
    assert "TruncatedError" in capsys.readouterr().out


def test_cli_usage_errors(capsys):
    with pytest.raises(SystemExit) as exit_:
        main(["--hex", "00"])
    assert exit_.value.code == 2
    assert "--schema" in capsys.readouterr().err
    assert main(["--schema", "map<str,", "--hex", "00"]) == 2
    assert main(["--schema", "u8", "--hex", "0"]) == 2
    with pytest.raises(SystemExit) as exit_:
        main(["--schema", "u8", "--hex", "00", "--in", "x"])
    assert exit_.value.code == 2


def test_cli_json_and_files(tmp_path, capsys):
    raw = tmp_path / "m.bin"
    raw.write_bytes(bytes.fromhex("0216cd02"))
    assert main(["--schema", "seq<u32>", "--in", str(raw), "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert [c["value"] for c in doc["children"]] == [22, 333]
    hexfile = tmp_path / "m.hex"
    hexfile.write_text("02 16\nCD 02\n")
    assert main(["--schema", "seq<u32>", "--in", str(hexfile), "--input-encoding", "hex"]) == 0
    assert main(["--schema", "u8", "--in", str(tmp_path / "missing")]) == 2
