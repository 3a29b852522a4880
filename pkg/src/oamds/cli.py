"""Command-line interface.

Exit codes: 0 ok, 1 usage, 2 not enough chunks, 3 verification failed,
4 over budget, 5 I/O or corruption.  Reports go to stdout, diagnostics to
stderr.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import re
import sys
import time

import numpy as np

from . import codec, repair, storage, verify
from .code import CodeParams, ParameterError, make_params
from .field import FieldSpec

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INSUFFICIENT = 2
EXIT_VERIFY = 3
EXIT_BUDGET = 4
EXIT_IO = 5

CHUNK_RE = re.compile(r"^node_(\d+)\.oamc$")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def parse_field(text: str) -> FieldSpec:
    text = text.lower()
    if text == "gf256":
        return FieldSpec.binary(8)
    if text in ("gf2_16", "gf65536"):
        return FieldSpec.binary(16)
    m = re.fullmatch(r"prime:(\d+)|gf(\d+)", text)
    if m:
        return FieldSpec.prime(int(m.group(1) or m.group(2)))
    raise ValueError(f"unknown field {text!r} (gf7, gf256, gf2_16, prime:P)")


def chunk_path(directory, node: int) -> str:
    return os.path.join(directory, f"node_{node}.oamc")


def _add_params(p, default_field):
    p.add_argument("--construction", type=int, choices=(1, 2), default=1)
    p.add_argument("--s", type=int, help="group size (construction 1; defaults to r)")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--rprime", type=int, default=0)
    p.add_argument("--field", default=default_field)


def _params_from(args) -> CodeParams:
    try:
        spec = parse_field(args.field)
        s = args.s if args.s is not None else args.r
        return make_params(args.construction, s, args.r, args.m, args.rprime, spec)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="oamds", description="Optimal-access MDS array codes")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("params", help="show derived code parameters")
    _add_params(p, "gf256")

    p = sub.add_parser("encode", help="encode a file into n chunk files")
    _add_params(p, "gf256")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out-dir", required=True)

    p = sub.add_parser("decode", help="rebuild a file from at least k chunks")
    p.add_argument("--in-dir", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("repair", help="rebuild one chunk reading only the repair coordinates")
    p.add_argument("--in-dir", required=True)
    p.add_argument("--node", type=int, required=True)
    p.add_argument("--group", action="store_true", help="group mode: group mates plus --helpers")
    p.add_argument("--helpers", help="comma-separated helper nodes (group mode)")
    p.add_argument("--batch", type=int, default=4096, help="stripes per report line")

    p = sub.add_parser("verify-mds", help="certify every r-subset block matrix is invertible")
    _add_params(p, "gf7")
    p.add_argument("--budget", type=int, default=verify.DEFAULT_BUDGET)

    p = sub.add_parser("bench", help="deterministic encode/repair throughput run")
    _add_params(p, "gf256")
    p.add_argument("--stripes", type=int, default=256)
    p.add_argument("--seed", type=int, default=0)
    return parser


# subcommands


def cmd_params(args) -> int:
    params = _params_from(args)
    print(f"construction={params.construction}")
    print(f"n={params.n}")
    print(f"k={params.k}")
    print(f"l={params.l}")
    print(f"field={params.field}")
    print(f"lambda_fingerprint={params.lambda_fingerprint()}")
    return EXIT_OK


def cmd_encode(args) -> int:
    params = _params_from(args)
    try:
        bps = storage.bytes_per_symbol(params)
    except storage.FileModeError as exc:
        raise UsageError(str(exc)) from exc
    with open(args.infile, "rb") as fh:
        data = fh.read()
    stripes = storage.stripe_file(params, data)
    cw = codec.encode(params, stripes)
    count = stripes.shape[-1]
    os.makedirs(args.out_dir, exist_ok=True)
    for i in range(1, params.n + 1):
        payload = storage.symbols_to_bytes(params, cw[:, i - 1].T.reshape(-1))
        hdr = storage.ChunkHeader(params, i, count, count * params.l * bps, len(data))
        storage.write_chunk(chunk_path(args.out_dir, i), hdr, payload)
    print(json.dumps({"n": params.n, "k": params.k, "l": params.l, "stripes": count, "file_length": len(data)}))
    return EXIT_OK


def _load_chunks(directory):
    """Valid chunks of a directory keyed by node; corrupt ones are reported and skipped."""
    chunks = {}
    for name in sorted(os.listdir(directory)):
        m = CHUNK_RE.match(name)
        if not m:
            continue
        path = os.path.join(directory, name)
        try:
            hdr, payload = storage.read_chunk(path)
        except storage.ChunkError as exc:
            print(f"skipping {path}: {exc}", file=sys.stderr)
            continue
        if hdr.node != int(m.group(1)):
            print(f"skipping {path}: header says node {hdr.node}", file=sys.stderr)
            continue
        chunks[hdr.node] = (hdr, payload)
    return chunks


def _consistent(headers):
    first = headers[0]
    for h in headers[1:]:
        if (h.params, h.stripe_count, h.file_length) != (first.params, first.stripe_count, first.file_length):
            raise storage.ChunkError("chunk headers disagree on code parameters or file layout")
    return first


def cmd_decode(args) -> int:
    chunks = _load_chunks(args.in_dir)
    if not chunks:
        print("no chunks found", file=sys.stderr)
        return EXIT_INSUFFICIENT
    first = _consistent([h for h, _ in chunks.values()])
    params, count = first.params, first.stripe_count
    if len(chunks) < params.k:
        print(f"only {len(chunks)} chunks present, need k={params.k}", file=sys.stderr)
        return EXIT_INSUFFICIENT
    # fewer known nodes means a smaller map; k suffice
    use = sorted(chunks)[: params.k] if len(chunks) > params.k else sorted(chunks)
    cells = np.zeros((params.l, params.n, count), dtype=np.int64)
    for i in use:
        cells[:, i - 1] = storage.bytes_to_symbols(params, chunks[i][1]).reshape(count, params.l).T
    erased = frozenset(range(1, params.n + 1)) - set(use)
    full = codec.decode(params, codec.ErasurePattern(cells, erased))
    out = storage.unstripe(params, full[:, : params.k], first.file_length)
    with open(args.out, "wb") as fh:
        fh.write(out)
    print(json.dumps({"nodes_used": use, "recovered": sorted(erased), "file_length": len(out)}))
    return EXIT_OK


def cmd_repair(args) -> int:
    directory, node = args.in_dir, args.node
    paths = {}
    for name in os.listdir(directory):
        m = CHUNK_RE.match(name)
        if m and int(m.group(1)) != node:
            paths[int(m.group(1))] = os.path.join(directory, name)
    if not paths:
        print("no helper chunks found", file=sys.stderr)
        return EXIT_INSUFFICIENT
    readers = {}
    try:
        for i, path in sorted(paths.items()):
            try:
                readers[i] = storage.RangeReader(path)
            except storage.ChunkError as exc:
                print(f"skipping {path}: {exc}", file=sys.stderr)
        first = _consistent([rd.header for rd in readers.values()])
        params = first.params
        if not 1 <= node <= params.n:
            raise UsageError(f"node {node} outside [1, {params.n}]")
        if args.group:
            if not args.helpers:
                raise UsageError("--group needs --helpers")
            v, _ = params.position(node)
            mates = set(params.group(v))
            given = {int(x) for x in args.helpers.split(",") if x.strip()}
            try:
                plan = repair.plan_group_repair(params, node, sorted(given - mates))
            except (repair.RepairError, ParameterError) as exc:
                raise UsageError(str(exc)) from exc
        else:
            plan = repair.plan_full_repair(params, node)
        missing = [h for h in plan.helpers if h not in readers]
        if missing:
            print(f"helper chunks missing: {missing}", file=sys.stderr)
            return EXIT_INSUFFICIENT
        column = _run_repair(params, plan, readers, first.stripe_count, max(1, args.batch))
    finally:
        for rd in readers.values():
            rd.close()
    bps = storage.bytes_per_symbol(params)
    payload = storage.symbols_to_bytes(params, column.T.reshape(-1))
    hdr = storage.ChunkHeader(params, node, first.stripe_count, first.stripe_count * params.l * bps, first.file_length)
    storage.write_chunk(chunk_path(directory, node), hdr, payload)
    return EXIT_OK


def _run_repair(params, plan, readers, count, batch):
    bps = storage.bytes_per_symbol(params)
    ranges = storage.coord_ranges(plan.coords, bps)
    stride = params.l * bps
    column = np.zeros((params.l, count), dtype=np.int64)
    run = repair.repair_group if plan.mode == repair.GROUP else repair.repair_full
    for bi, start in enumerate(range(0, count, batch)):
        stop = min(count, start + batch)
        reads = {}
        nbytes = 0
        for h in plan.helpers:
            rd = readers[h]
            before = len(rd.log)
            parts = [rd.read(st * stride + off, ln) for st in range(start, stop) for off, ln in ranges]
            nbytes += sum(ln for _, ln in rd.log[before:])
            syms = storage.bytes_to_symbols(params, b"".join(parts)).reshape(stop - start, len(plan.coords))
            reads[h] = {a: syms[:, j] for j, a in enumerate(plan.coords)}
        trace = repair.ReadTrace(reads)
        column[:, start:stop] = run(params, plan, trace)
        report = repair.audit_access(params, plan, trace).to_json_dict()
        report.update({"batch": bi, "stripes": stop - start, "bytes_read": nbytes})
        print(json.dumps(report))
    return column


def cmd_verify(args) -> int:
    params = _params_from(args)
    try:
        cert = verify.check_mds(params, budget=args.budget)
    except verify.BudgetExceeded as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_BUDGET
    sys.stdout.write(cert.to_text())
    return EXIT_OK if cert.passed else EXIT_VERIFY


def cmd_bench(args) -> int:
    params = _params_from(args)
    rng = np.random.default_rng(args.seed)
    data = params.gf.random(rng, (params.l, params.k, args.stripes))
    t0 = time.perf_counter()
    cw = codec.encode(params, data)
    t1 = time.perf_counter()
    plan = repair.plan_full_repair(params, 1)
    reads = {h: {a: cw[a, h - 1] for a in plan.coords} for h in plan.helpers}
    trace = repair.ReadTrace(reads)
    col = repair.repair_full(params, plan, trace)
    t2 = time.perf_counter()
    if not np.array_equal(col, cw[:, 0]):
        print("repair mismatch", file=sys.stderr)
        return EXIT_VERIFY
    report = repair.audit_access(params, plan, trace)
    digest = hashlib.sha256(np.ascontiguousarray(cw).tobytes()).hexdigest()[:16]
    encoded = params.l * params.n * args.stripes
    print(json.dumps({
        "n": params.n, "k": params.k, "l": params.l, "field": str(params.field),
        "stripes": args.stripes, "seed": args.seed, "codeword_digest": digest,
        "encode_symbols": encoded,
        "repair_symbols_accessed": report.symbols_accessed * args.stripes,
        "encode_symbols_per_sec": round(encoded / max(t1 - t0, 1e-9)),
        "repair_symbols_per_sec": round(params.l * args.stripes / max(t2 - t1, 1e-9)),
    }))
    return EXIT_OK


COMMANDS = {
    "params": cmd_params,
    "encode": cmd_encode,
    "decode": cmd_decode,
    "repair": cmd_repair,
    "verify-mds": cmd_verify,
    "bench": cmd_bench,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"oamds: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, storage.ChunkError, codec.DecodeError) as exc:
        print(f"oamds: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
