"""Command-line interface: ``msrcode {params,encode,decode,repair,verify}``.

Exit status is 0 on success, 1 on user errors (bad parameters, missing or
corrupt shards, I/O problems) and 2 when an internal invariant fails.
"""

import argparse
import logging
import os
import sys

from .codec import MSRCode, repair_from_reads, repair_planes
from .errors import (
    ConstructionError, MSRError, ParameterError, ShardFormatError, UnrecoverableError,
)
from .shards import (
    CountingReader, ShardHeader, pack_data, read_header, read_shard, shard_name,
    unpack_data, write_shard,
)
from .verify import DEFAULT_BUDGET, verify_all

log = logging.getLogger("msrcode")


class InvariantViolation(MSRError):
    pass


def _find_shards(directory):
    """Map node id -> (path, header) for every readable shard in ``directory``."""
    found = {}
    key = None
    for name in sorted(os.listdir(directory)):
        path = os.path.join(directory, name)
        if not name.endswith(".shard") or not os.path.isfile(path):
            continue
        header = read_header(path)
        if key is None:
            key = header.code_key()
        elif header.code_key() != key:
            raise ShardFormatError(f"{path}: header does not match the other shards")
        if header.node_id in found:
            raise ShardFormatError(f"{path}: duplicate shard for node {header.node_id}")
        found[header.node_id] = (path, header)
    return found


def cmd_params(args):
    code = MSRCode(args.n, args.k, args.d)
    p = code.params
    print(f"n={p.n} k={p.k} d={p.d}")
    print(f"q={p.q} t={p.t} r={p.r}")
    print(f"alpha={p.alpha} (q^ceil(n/q) = {p.q}^{p.t})")
    print(f"beta={p.beta}")
    print(f"m={p.m} Q={p.Q} modulus={code.field.modulus:#x}")
    print(f"repair download d*beta={p.d * p.beta} symbols, full decode k*alpha={p.k * p.alpha}")
    if p.delta:
        print(f"shortened: delta={p.delta} virtual zero node(s) appended to a base "
              f"(n={p.n_base}, k={p.n_base - p.r}) code")
    return 0


def cmd_encode(args):
    code = MSRCode(args.n, args.k, args.d)
    p = code.params
    with open(args.input, "rb") as fh:
        data = fh.read()
    messages = pack_data(data, p)
    cube = code.encode_stripes(messages)
    os.makedirs(args.out_dir, exist_ok=True)
    proto = ShardHeader(m=p.m, modulus=code.field.modulus, q=p.q, t=p.t, r=p.r,
                        n=p.n, k=p.k, d=p.d, node_id=0,
                        stripe_count=messages.shape[0], payload_len=len(data))
    for node in p.real_nodes:
        write_shard(os.path.join(args.out_dir, shard_name(node)), proto.for_node(node), cube[:, node])
    print(f"wrote {p.n} shards ({messages.shape[0]} stripe(s), {len(data)} bytes) to {args.out_dir}")
    return 0


def cmd_decode(args):
    shards = _find_shards(args.shards)
    if not shards:
        raise UnrecoverableError(f"no shards found in {args.shards}")
    header = next(iter(shards.values()))[1]
    code = MSRCode(header.n, header.k, header.d)
    p = code.params
    if len(shards) < p.k:
        raise UnrecoverableError(f"{len(shards)} shard(s) present, need at least k={p.k}")
    nodes = {v: read_shard(path, p.alpha)[1] for v, (path, _) in shards.items()}
    cube = code.decode_stripes(nodes)
    messages = cube[:, :p.k].reshape(cube.shape[0], p.k * p.alpha)
    data = unpack_data(messages, p, header.payload_len)
    with open(args.out, "wb") as fh:
        fh.write(data)
    missing = sorted(set(p.real_nodes) - set(shards))
    print(f"decoded {len(data)} bytes from {len(shards)} shard(s); missing nodes {missing}")
    return 0


def cmd_repair(args):
    shards = _find_shards(args.shards)
    shards.pop(args.failed, None)
    if not shards:
        raise UnrecoverableError(f"no helper shards found in {args.shards}")
    header = next(iter(shards.values()))[1]
    code = MSRCode(header.n, header.k, header.d)
    p = code.params
    if not 0 <= args.failed < p.n:
        raise ParameterError(f"--failed {args.failed} is not a node of an n={p.n} code")
    if args.helpers:
        helpers = sorted(set(args.helpers))
        absent = [h for h in helpers if h not in shards]
        if absent:
            raise UnrecoverableError(f"helper shard(s) {absent} not available")
    else:
        helpers = sorted(shards)[:p.d]
    if len(helpers) != p.d:
        raise UnrecoverableError(f"{len(helpers)} helper(s) available, repair needs d={p.d}")

    planes = list(repair_planes(p, args.failed))
    reads = {}
    expected = header.stripe_count * p.beta * header.symbol_width
    for h in helpers:
        reader = CountingReader(shards[h][0])
        reads[h] = reader.read_symbols(p.alpha, planes)
        print(f"helper {h}: read {reader.bytes_read} bytes "
              f"({header.stripe_count} stripe(s) x beta={p.beta} symbols x {header.symbol_width} B)")
        if reader.bytes_read != expected:
            raise InvariantViolation(f"helper {h} read {reader.bytes_read} bytes, expected {expected}")
    rebuilt = repair_from_reads(p, code.table, args.failed, reads)
    write_shard(args.out, header.for_node(args.failed), rebuilt.T)
    total = expected * p.d
    full = header.stripe_count * p.k * p.alpha * header.symbol_width
    ratio = p.d * p.beta / (p.k * p.alpha)
    print(f"repaired node {args.failed} -> {args.out}")
    print(f"total read {total} bytes vs {full} bytes for full reconstruction "
          f"(d*beta/(k*alpha) = {ratio:.3f})")
    return 0


def cmd_verify(args):
    code = MSRCode(args.n, args.k, args.d)
    budget = float("inf") if args.exhaustive else args.budget
    report = verify_all(code.params, code.table, budget=budget, trials=args.trials, seed=args.seed)
    if args.format == "lines":
        print("\n".join(report.lines()))
    else:
        print(report.render())
    return 0 if report.passed else 2


def build_parser():
    parser = argparse.ArgumentParser(
        prog="msrcode",
        description="Optimal-access MSR erasure code for d = k+1, k+2, k+3.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def nkd(sp):
        sp.add_argument("--n", type=int, required=True)
        sp.add_argument("--k", type=int, required=True)
        sp.add_argument("--d", type=int, required=True)

    sp = sub.add_parser("params", help="print derived code parameters")
    nkd(sp)
    sp.set_defaults(func=cmd_params)

    sp = sub.add_parser("encode", help="split a file into n shards")
    nkd(sp)
    sp.add_argument("--input", required=True)
    sp.add_argument("--out-dir", required=True)
    sp.set_defaults(func=cmd_encode)

    sp = sub.add_parser("decode", help="rebuild a file from any k shards")
    sp.add_argument("--shards", required=True, help="directory holding *.shard files")
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_decode)

    sp = sub.add_parser("repair", help="regenerate one lost shard from d helpers")
    sp.add_argument("--failed", type=int, required=True)
    sp.add_argument("--shards", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--helpers", type=int, nargs="+",
                    help="helper node ids (default: the d lowest available)")
    sp.set_defaults(func=cmd_repair)

    sp = sub.add_parser("verify", help="check MDS, repair and θ properties of a code")
    nkd(sp)
    sp.add_argument("--exhaustive", action="store_true", help="never sample, whatever the cost")
    sp.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    sp.add_argument("--trials", type=int, default=100)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--format", choices=("text", "lines"), default="text")
    sp.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ConstructionError, InvariantViolation) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 2
    except (ParameterError, UnrecoverableError, ShardFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except MSRError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
