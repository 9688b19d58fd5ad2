"""Arithmetic in GF(2^m) for even m.

Elements are plain Python ints in polynomial basis (bit i is the
coefficient of x^i).  Multiplication goes through log/antilog tables built
once per field; the ``*_array`` variants apply the same tables to numpy
arrays elementwise.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ParameterError

# Primitive polynomials, one per supported even degree.  In every case the
# residue class of x generates the multiplicative group; FieldContext checks
# this again when the tables are built.
PRIMITIVE_POLYS = {
    4: 0x13,       # x^4 + x + 1
    6: 0x43,       # x^6 + x + 1
    8: 0x11D,      # x^8 + x^4 + x^3 + x^2 + 1
    10: 0x409,     # x^10 + x^3 + 1
    12: 0x1053,    # x^12 + x^6 + x^4 + x + 1
    14: 0x4443,    # x^14 + x^10 + x^6 + x + 1
    16: 0x1100B,   # x^16 + x^12 + x^3 + x + 1
}

SUPPORTED_DEGREES = tuple(sorted(PRIMITIVE_POLYS))


class FieldContext:
    """GF(2^m) with the fixed modulus for ``m`` and primitive element ``x``.

    Instances are immutable after construction; obtain them through
    :func:`field_new` so that each degree is built only once.
    """

    def __init__(self, m, modulus=None):
        if m % 2 or m not in PRIMITIVE_POLYS:
            raise ParameterError(
                f"unsupported extension degree m={m}; supported: {SUPPORTED_DEGREES}")
        self.m = m
        self.modulus = PRIMITIVE_POLYS[m] if modulus is None else modulus
        self.size = 1 << m
        self.order = self.size - 1
        self.lam = 0b10
        self.byte_width = (m + 7) // 8

        exp = np.zeros(2 * self.order, dtype=np.int64)
        log = np.zeros(self.size, dtype=np.int64)
        seen = np.zeros(self.size, dtype=bool)
        v = 1
        for i in range(self.order):
            if seen[v]:
                raise ParameterError(
                    f"modulus {self.modulus:#x}: x has order {i} < {self.order}, not primitive")
            seen[v] = True
            exp[i] = v
            log[v] = i
            v <<= 1
            if v & self.size:
                v ^= self.modulus
        if v != 1:
            raise ParameterError(f"modulus {self.modulus:#x} is not primitive")
        exp[self.order:] = exp[:self.order]
        exp.setflags(write=False)
        log.setflags(write=False)
        self.exp = exp
        self.log = log
        self._exp = exp.tolist()
        self._log = log.tolist()

    def __repr__(self):
        return f"FieldContext(m={self.m}, modulus={self.modulus:#x})"

    # scalar arithmetic

    @staticmethod
    def add(a, b):
        return a ^ b

    sub = add

    def mul(self, a, b):
        if a == 0 or b == 0:
            return 0
        return self._exp[self._log[a] + self._log[b]]

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("0 has no inverse in GF(2^m)")
        return self._exp[(self.order - self._log[a]) % self.order]

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, e):
        if a == 0:
            if e < 0:
                raise ZeroDivisionError("0 has no inverse in GF(2^m)")
            return 1 if e == 0 else 0
        return self._exp[(self._log[a] * e) % self.order]

    def lam_pow(self, e):
        """λ^e for any integer e."""
        return self._exp[e % self.order]

    def element(self, value):
        value = int(value)
        if not 0 <= value < self.size:
            raise ParameterError(f"{value} is not an element of GF(2^{self.m})")
        return value

    # array arithmetic

    def mul_array(self, a, b):
        """Elementwise product of two broadcastable integer arrays."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        out = self.exp[self.log[a] + self.log[b]]
        return np.where((a == 0) | (b == 0), 0, out)

    def inv_array(self, a):
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise ZeroDivisionError("0 has no inverse in GF(2^m)")
        return self.exp[(self.order - self.log[a]) % self.order]

    def matvec(self, mat, vec):
        """Matrix times vector (or matrix times matrix) over the field."""
        mat = np.asarray(mat, dtype=np.int64)
        vec = np.asarray(vec, dtype=np.int64)
        if vec.ndim == 1:
            return np.bitwise_xor.reduce(self.mul_array(mat, vec[None, :]), axis=1)
        prod = self.mul_array(mat[:, :, None], vec[None, :, :])
        return np.bitwise_xor.reduce(prod, axis=1)


@lru_cache(maxsize=None)
def field_new(m):
    """Return the shared :class:`FieldContext` for GF(2^m)."""
    return FieldContext(m)


@dataclass(frozen=True)
class CosetTriple:
    """The subgroup G of cubes of λ and its cosets λG, λ²G."""
    g: tuple
    gamma_g: tuple
    gamma2_g: tuple


def cosets(ctx):
    """Split the nonzero elements of ``ctx`` into G = {λ^(3i)}, γG and γ²G with γ = λ."""
    if ctx.order % 3:
        raise ParameterError(f"3 does not divide 2^{ctx.m} - 1")
    size = ctx.order // 3
    g = tuple(ctx.lam_pow(3 * i) for i in range(size))
    gamma = ctx.lam
    gamma2 = ctx.mul(gamma, gamma)
    return CosetTriple(
        g=g,
        gamma_g=tuple(ctx.mul(gamma, v) for v in g),
        gamma2_g=tuple(ctx.mul(gamma2, v) for v in g),
    )
