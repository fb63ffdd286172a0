#!/usr/bin/env python3
"""Feed random bytes to the decoder against random shapes and tally the outcomes.

Anything other than a value or a DecodeError is a crash and is printed with a
reproducer (shape text plus hex input).
"""

from __future__ import annotations

import argparse
import collections
import random
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

from support import ShapeGen  # noqa: E402

import wirepack as wp  # noqa: E402
from wirepack.buffers import InputBuffer  # noqa: E402
from wirepack.serializer import parse_value  # noqa: E402


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cases", type=int, default=100_000)
    ap.add_argument("--max-len", type=int, default=4096)
    ap.add_argument("--depth", type=int, default=4)
    ap.add_argument("--shapes", type=int, default=500, help="size of the random shape pool")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    rng = random.Random(args.seed)
    gen = ShapeGen(args.seed + 1, max_depth=args.depth)
    pool = [gen.shape() for _ in range(args.shapes)]
    outcomes: collections.Counter[str] = collections.Counter()
    crashes = 0
    t0 = time.perf_counter()
    for i in range(args.cases):
        shape = pool[i % len(pool)]
        data = rng.randbytes(rng.randint(0, args.max_len))
        inp = InputBuffer(data)
        try:
            parse_value(shape, inp)
            outcomes["value"] += 1
        except wp.DecodeError as exc:
            outcomes[type(exc).__name__] += 1
        except Exception as exc:  # noqa: BLE001
            crashes += 1
            print(f"CRASH {type(exc).__name__}: {exc}\n  shape {shape}\n  input {data[:64].hex()}", file=sys.stderr)
        if inp.tell() > len(data):
            crashes += 1
            print(f"OVER-READ shape {shape} len {len(data)} cursor {inp.tell()}", file=sys.stderr)
    elapsed = time.perf_counter() - t0
    for name, n in outcomes.most_common():
        print(f"{name:22s} {n:8d}")
    print(f"{'crashes':22s} {crashes:8d}")
    print(f"{args.cases} cases in {elapsed:.1f}s")
    return 1 if crashes else 0


if __name__ == "__main__":
    sys.exit(main())
