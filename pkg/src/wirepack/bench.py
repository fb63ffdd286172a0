"""Benchmark harness for three workloads: a double array, a sparse matrix, and a string-to-double hash map.

Each run generates the workload from a seed, checks that it round-trips,
then times serialization and parsing over in-memory buffers and reports the
median of the repetitions together with the message size.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import platform
import random
import statistics
import string as _string
import sys
import time
from dataclasses import asdict, dataclass, field, fields

from wirepack import serializer as S
from wirepack.api import from_bytes, to_bytes

KINDS = ("double_array", "sparse_matrix", "hash_map")

DEFAULT_PARAMS = {
    "double_array": {"n": 1_000_000},
    "sparse_matrix": {"rows": 10_000, "nnz": 100, "cols": 10_000},
    "hash_map": {"entries": 100_000, "key_len": 16},
}

_ALNUM = _string.ascii_letters + _string.digits


class ParameterError(ValueError):
    pass


class CorrectnessError(RuntimeError):
    """The codec failed to reproduce a workload; timing it would be meaningless."""


@dataclass
class SparseRow(S.Serializable):
    """One matrix row: ascending column indices and the matching nonzero values."""

    indices: list
    values: list

    wire_min_size = 2

    def serialize(self, out) -> None:
        out.put(ROW_INDICES, self.indices).put(ROW_VALUES, self.values)

    @classmethod
    def parse(cls, inp) -> "SparseRow":
        return cls(inp.get(ROW_INDICES), inp.get(ROW_VALUES))


ROW_INDICES = S.Seq(S.u64)
ROW_VALUES = S.Seq(S.f64)

SHAPES = {
    "double_array": S.Seq(S.f64),
    "sparse_matrix": S.Seq(SparseRow),
    "hash_map": S.Map(S.string, S.f64),
}

# The same wire layouts spelled as inspector schemas.
SCHEMAS = {
    "double_array": "seq<f64>",
    "sparse_matrix": "seq<record{indices:seq<u64>, values:seq<f64>}>",
    "hash_map": "map<str,f64>",
}


@dataclass(frozen=True)
class Workload:
    kind: str
    params: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ParameterError(f"unknown workload kind {self.kind!r}; choose from {', '.join(KINDS)}")
        merged = dict(DEFAULT_PARAMS[self.kind])
        unknown = set(self.params) - set(merged)
        if unknown:
            raise ParameterError(f"unknown parameters for {self.kind}: {', '.join(sorted(unknown))}")
        merged.update(self.params)
        for k, v in merged.items():
            if not isinstance(v, int) or v < 0:
                raise ParameterError(f"parameter {k} must be a non-negative integer, got {v!r}")
        object.__setattr__(self, "params", merged)

    def describe(self) -> str:
        return ";".join(f"{k}={v}" for k, v in self.params.items())

    @property
    def shape(self) -> S.Shape:
        return SHAPES[self.kind]


def parse_params(text: str) -> dict:
    """``"rows=3,nnz=2"`` (commas or semicolons) to ``{"rows": 3, "nnz": 2}``."""
    out = {}
    for part in text.replace(";", ",").split(","):
        part = part.strip()
        if not part:
            continue
        key, sep, val = part.partition("=")
        if not sep:
            raise ParameterError(f"expected key=value, got {part!r}")
        try:
            out[key.strip()] = int(val.replace("_", ""))
        except ValueError:
            raise ParameterError(f"parameter {key.strip()} needs an integer, got {val!r}") from None
    return out


def generate_workload(workload: Workload):
    """Deterministically build the workload's value from its parameters and seed."""
    rng = random.Random(workload.seed)
    p = workload.params
    if workload.kind == "double_array":
        rand = rng.random
        return [rand() for _ in range(p["n"])]
    if workload.kind == "sparse_matrix":
        rows, nnz, cols = p["rows"], p["nnz"], p["cols"]
        if nnz > cols:
            raise ParameterError(f"nnz={nnz} distinct indices per row cannot fit in cols={cols}")
        columns = range(cols)
        rand = rng.random
        return [
            SparseRow(sorted(rng.sample(columns, nnz)), [rand() for _ in range(nnz)])
            for _ in range(rows)
        ]
    entries, key_len = p["entries"], p["key_len"]
    if entries > len(_ALNUM) ** key_len:
        raise ParameterError(f"cannot make {entries} distinct keys of length {key_len}")
    result: dict[str, float] = {}
    while len(result) < entries:
        key = "".join(rng.choices(_ALNUM, k=key_len))
        if key not in result:
            result[key] = rng.random()
    return result


@dataclass
class BenchRow:
    kind: str
    params: str
    size_bytes: int
    serialize_s: float
    parse_s: float
    reps: int
    host: str = ""


REPORT_COLUMNS = ("kind", "params", "size_bytes", "serialize_s", "parse_s", "reps")


def host_description() -> str:
    return (
        f"{platform.system()} {platform.machine()}, {os.cpu_count()} cpus, "
        f"{platform.python_implementation()} {platform.python_version()}"
    )


def run_benchmark(workload: Workload, repetitions: int = 5, value=None) -> BenchRow:
    """Time serialize and parse of ``workload``; median over ``repetitions``."""
    if repetitions < 1:
        raise ParameterError("repetitions must be at least 1")
    if value is None:
        value = generate_workload(workload)
    shape = workload.shape
    data = to_bytes(value, shape)
    if from_bytes(shape, data) != value:
        raise CorrectnessError(f"{workload.kind} did not round-trip")
    ser, par, sizes = [], [], set()
    clock = time.perf_counter
    for _ in range(repetitions):
        t0 = clock()
        data = to_bytes(value, shape)
        t1 = clock()
        from_bytes(shape, data)
        t2 = clock()
        ser.append(t1 - t0)
        par.append(t2 - t1)
        sizes.add(len(data))
    if len(sizes) != 1:
        raise CorrectnessError(f"{workload.kind} message size varied across repetitions: {sorted(sizes)}")
    return BenchRow(
        kind=workload.kind,
        params=workload.describe(),
        size_bytes=sizes.pop(),
        serialize_s=statistics.median(ser),
        parse_s=statistics.median(par),
        reps=repetitions,
        host=host_description(),
    )


def emit_report(rows, fmt: str = "csv") -> str:
    """Render rows as CSV (fixed columns) or JSON lines (every field)."""
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(REPORT_COLUMNS)
        for r in rows:
            writer.writerow([getattr(r, c) for c in REPORT_COLUMNS])
        return buf.getvalue()
    if fmt == "jsonlines":
        return "".join(json.dumps(asdict(r)) + "\n" for r in rows)
    raise ValueError(f"unknown report format {fmt!r}")


def read_report(text: str, fmt: str = "csv") -> list[BenchRow]:
    """Parse a report produced by :func:`emit_report`."""
    if fmt == "jsonlines":
        return [BenchRow(**json.loads(line)) for line in text.splitlines() if line.strip()]
    reader = csv.DictReader(io.StringIO(text))
    types = {f.name: f.type for f in fields(BenchRow)}
    rows = []
    for rec in reader:
        conv = {k: (int(v) if types[k] == "int" else float(v) if types[k] == "float" else v) for k, v in rec.items()}
        rows.append(BenchRow(**conv))
    return rows


def main(argv=None) -> int:
    p = argparse.ArgumentParser(prog="wirepack bench", description=__doc__.splitlines()[0])
    which = p.add_mutually_exclusive_group(required=True)
    which.add_argument("--kind", choices=KINDS)
    which.add_argument("--all", action="store_true", help="run all three workloads with default params")
    p.add_argument("--params", default="", help="e.g. 'n=1000' or 'rows=100,nnz=10,cols=1000'")
    p.add_argument("--reps", type=int, default=5)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--format", choices=("csv", "jsonlines"), default="csv")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--dump", help="also write the serialized message to this file (needs --kind)")
    args = p.parse_args(argv)
    if args.dump and args.all:
        p.error("--dump needs a single --kind")
    if args.reps < 1:
        p.error("--reps must be at least 1")

    try:
        if args.all:
            workloads = [Workload(k, seed=args.seed) for k in KINDS]
        else:
            workloads = [Workload(args.kind, parse_params(args.params), args.seed)]
        rows = []
        for wl in workloads:
            value = generate_workload(wl)
            rows.append(run_benchmark(wl, args.reps, value))
            if args.dump:
                with open(args.dump, "wb") as fh:
                    fh.write(to_bytes(value, wl.shape))
    except ParameterError as exc:
        p.error(str(exc))

    print(f"# host: {host_description()}", file=sys.stderr)
    report = emit_report(rows, args.format)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(report)
    else:
        sys.stdout.write(report)
    return 0
