#!/usr/bin/env python3
"""Measure peak decode allocation per wire byte for dense, valid messages.

Random inputs rarely decode deeply; these hand-built messages pack the most
Python objects into each byte and show where the per-byte cost comes from.
"""

from __future__ import annotations

import argparse
import sys
import tracemalloc

import wirepack as wp
from wirepack import serializer as S


def cases(n: int):
    yield "seq<bool>", S.Seq(S.boolean), [True] * n
    yield "seq<u8>", S.Seq(S.u8), [5] * n
    yield "seq<u32> (2-byte values)", S.Seq(S.u32), list(range(300, 300 + n // 2))
    yield "set<u32>", S.Set(S.u32), set(range(300, 300 + n // 2))
    yield "map<u16,bool>", S.Map(S.u16, S.boolean), {i: True for i in range(200, 200 + n // 3)}
    yield "seq<str> (empty)", S.Seq(S.string), [""] * n
    yield "seq<seq<u8>> (empty)", S.Seq(S.Seq(S.u8)), [[]] * n
    yield "seq<f64>", S.Seq(S.f64), [0.5] * (n // 8)


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--elements", type=int, default=4000, help="approximate message size in bytes")
    args = ap.parse_args(argv)
    print(f"{'shape':28s} {'bytes':>7s} {'peak':>9s} {'peak/byte':>10s}")
    for name, shape, value in cases(args.elements):
        data = wp.to_bytes(value, shape)
        tracemalloc.start()
        wp.from_bytes(shape, data)
        peak = tracemalloc.get_traced_memory()[1]
        tracemalloc.stop()
        print(f"{name:28s} {len(data):7d} {peak:9d} {peak / len(data):10.2f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
