"""Shard file format and byte <-> symbol packing.

A shard is a 42-byte header followed by ``stripe_count`` blocks of
``alpha`` symbols, each symbol stored big-endian in ``ceil(m/8)`` bytes.

Header layout (big-endian)::

    magic      4s   b"MSRC"
    version    B    1
    m          B
    modulus    I
    q, t       B B
    r          H
    n, k, d    H H H
    node_id    H
    stripes    Q
    payload    Q    original file length in bytes
    crc32      I    over the 38 bytes above
"""

import os
import struct
import zlib
from dataclasses import dataclass

import numpy as np

from .errors import ShardFormatError
from .params import derive_params

MAGIC = b"MSRC"
VERSION = 1
_BODY = struct.Struct(">4sBBIBBHHHHHQQ")
_CRC = struct.Struct(">I")
HEADER_SIZE = _BODY.size + _CRC.size


@dataclass(frozen=True)
class ShardHeader:
    m: int
    modulus: int
    q: int
    t: int
    r: int
    n: int
    k: int
    d: int
    node_id: int
    stripe_count: int
    payload_len: int
    version: int = VERSION

    @property
    def symbol_width(self):
        return (self.m + 7) // 8

    def pack(self):
        body = _BODY.pack(MAGIC, self.version, self.m, self.modulus, self.q, self.t,
                          self.r, self.n, self.k, self.d, self.node_id,
                          self.stripe_count, self.payload_len)
        return body + _CRC.pack(zlib.crc32(body))

    @classmethod
    def unpack(cls, raw):
        if len(raw) < HEADER_SIZE:
            raise ShardFormatError(f"header truncated: {len(raw)} < {HEADER_SIZE} bytes")
        body = raw[:_BODY.size]
        (crc,) = _CRC.unpack(raw[_BODY.size:HEADER_SIZE])
        if zlib.crc32(body) != crc:
            raise ShardFormatError("header CRC mismatch")
        (magic, version, m, modulus, q, t, r, n, k, d,
         node_id, stripes, payload) = _BODY.unpack(body)
        if magic != MAGIC:
            raise ShardFormatError(f"bad magic {magic!r}")
        if version != VERSION:
            raise ShardFormatError(f"unsupported shard version {version}")
        hdr = cls(m=m, modulus=modulus, q=q, t=t, r=r, n=n, k=k, d=d,
                  node_id=node_id, stripe_count=stripes, payload_len=payload, version=version)
        hdr.validate()
        return hdr

    def validate(self):
        p = derive_params(self.n, self.k, self.d)
        if (p.q, p.t, p.r, p.m) != (self.q, self.t, self.r, self.m):
            raise ShardFormatError(
                f"stored (q, t, r, m) = {(self.q, self.t, self.r, self.m)} disagree with "
                f"(n, k, d) = {(self.n, self.k, self.d)}")
        if not 0 <= self.node_id < self.n:
            raise ShardFormatError(f"node id {self.node_id} out of range for n={self.n}")
        return p

    def code_key(self):
        """Fields that must agree between shards of the same file."""
        return (self.m, self.modulus, self.n, self.k, self.d,
                self.stripe_count, self.payload_len)

    def for_node(self, node_id):
        return ShardHeader(self.m, self.modulus, self.q, self.t, self.r, self.n,
                           self.k, self.d, node_id, self.stripe_count, self.payload_len)


def symbols_to_bytes(symbols, m):
    dtype = ">u1" if m <= 8 else ">u2"
    return np.asarray(symbols).astype(dtype).tobytes()


def bytes_to_symbols(raw, m):
    dtype = ">u1" if m <= 8 else ">u2"
    return np.frombuffer(raw, dtype=dtype).astype(np.int64)


def stripe_count(nbytes, params):
    bits = params.k * params.alpha * params.m
    return -(-nbytes * 8 // bits)


def pack_data(data, params):
    """Split ``data`` into stripes of k*alpha m-bit symbols, shape (stripes, k*alpha).

    Bits are taken most-significant first; the final stripe is zero-padded.
    """
    m = params.m
    per_stripe = params.k * params.alpha
    count = stripe_count(len(data), params)
    bits = np.unpackbits(np.frombuffer(bytes(data), dtype=np.uint8))
    total = count * per_stripe * m
    bits = np.concatenate([bits, np.zeros(total - bits.size, dtype=np.uint8)])
    weights = 1 << np.arange(m - 1, -1, -1, dtype=np.int64)
    return (bits.reshape(-1, m).astype(np.int64) @ weights).reshape(count, per_stripe)


def unpack_data(messages, params, length):
    """Inverse of :func:`pack_data`, truncated to ``length`` bytes."""
    m = params.m
    vals = np.asarray(messages, dtype=np.int64).reshape(-1)
    shifts = np.arange(m - 1, -1, -1, dtype=np.int64)
    bits = ((vals[:, None] >> shifts) & 1).astype(np.uint8).reshape(-1)
    return np.packbits(bits).tobytes()[:length]


def shard_name(node_id):
    return f"node{node_id:03d}.shard"


def write_shard(path, header, node_symbols):
    """Write ``node_symbols`` of shape (stripes, alpha) after ``header``."""
    with open(path, "wb") as fh:
        fh.write(header.pack())
        fh.write(symbols_to_bytes(node_symbols, header.m))


def read_header(path):
    with open(path, "rb") as fh:
        return ShardHeader.unpack(fh.read(HEADER_SIZE))


def read_shard(path, alpha):
    """Return ``(header, symbols)`` with symbols of shape (stripes, alpha)."""
    with open(path, "rb") as fh:
        header = ShardHeader.unpack(fh.read(HEADER_SIZE))
        body = fh.read()
    width = header.symbol_width
    expected = header.stripe_count * alpha * width
    if len(body) != expected:
        raise ShardFormatError(f"{path}: payload has {len(body)} bytes, expected {expected}")
    return header, bytes_to_symbols(body, header.m).reshape(header.stripe_count, alpha)


class CountingReader:
    """Reads selected symbols from a shard file and counts payload bytes read."""

    def __init__(self, path):
        self.path = path
        self.bytes_read = 0
        with open(path, "rb") as fh:
            self.header = ShardHeader.unpack(fh.read(HEADER_SIZE))

    def read_symbols(self, alpha, planes):
        """Symbols at ``planes`` of every stripe, shape (len(planes), stripes)."""
        h = self.header
        width = h.symbol_width
        expected = HEADER_SIZE + h.stripe_count * alpha * width
        if os.path.getsize(self.path) != expected:
            raise ShardFormatError(f"{self.path}: unexpected file size")
        out = np.zeros((len(planes), h.stripe_count), dtype=np.int64)
        with open(self.path, "rb") as fh:
            for s in range(h.stripe_count):
                base = HEADER_SIZE + s * alpha * width
                for i, z in enumerate(planes):
                    fh.seek(base + z * width)
                    raw = fh.read(width)
                    self.bytes_read += len(raw)
                    out[i, s] = int.from_bytes(raw, "big")
        return out
