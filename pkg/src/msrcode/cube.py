"""Indexing of the (q*t) x q^t codeword cube and parity-check evaluation.

A node is a pair ``(x, y)`` with ``x`` in Z_q and ``y`` in Z_t; its integer
id is ``q*y + x``.  A plane is a digit tuple ``(z_0, ..., z_{t-1})`` with
ordinal ``sum(z_y * q**y)``.
"""

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import NamedTuple

import numpy as np


class Node(NamedTuple):
    x: int
    y: int

    def id(self, q):
        return q * self.y + self.x

    @classmethod
    def from_id(cls, node_id, q):
        return cls(node_id % q, node_id // q)


def plane_digits(ordinal, q, t):
    digits = []
    for _ in range(t):
        ordinal, z = divmod(ordinal, q)
        digits.append(z)
    return tuple(digits)


def plane_ordinal(digits, q):
    out = 0
    for z in reversed(digits):
        out = out * q + z
    return out


def plane_sub(z, y, x):
    """z(y, x): the plane ``z`` with digit ``y`` replaced by ``x``."""
    z = list(z)
    z[y] = x
    return tuple(z)


def intersection_score(erased, z):
    """Number of sections y with (z_y, y) in ``erased``."""
    erased = set(erased)
    return sum(1 for y, zy in enumerate(z) if (zy, y) in erased)


@dataclass(frozen=True)
class PlaneGroup:
    """Planes whose parity equations are solved as one system."""
    sections: tuple
    planes: tuple
    score: int

    def __len__(self):
        return len(self.planes)

    def __contains__(self, z):
        return z in self.planes


def plane_group(erased, z):
    """The product set Z_0 x ... x Z_{t-1} generated by plane ``z``.

    Z_y is every erased x of section y when (z_y, y) is erased, else {z_y}.
    """
    erased = set(erased)
    sections = []
    for y, zy in enumerate(z):
        if (zy, y) in erased:
            sections.append(tuple(sorted(x for (x, yy) in erased if yy == y)))
        else:
            sections.append((zy,))
    return PlaneGroup(
        sections=tuple(sections),
        planes=tuple(tuple(p) for p in product(*sections)),
        score=intersection_score(erased, z),
    )


@dataclass(eq=False)
class Codeword:
    """Symbols A(x, y; z) stored as ``symbols[node_id, plane_ordinal]``."""
    symbols: np.ndarray
    params: object

    @classmethod
    def zeros(cls, params):
        return cls(np.zeros((params.n_base, params.alpha), dtype=np.int64), params)

    def node(self, node_id):
        return self.symbols[node_id]

    def copy(self):
        return Codeword(self.symbols.copy(), self.params)

    def __eq__(self, other):
        if not isinstance(other, Codeword):
            return NotImplemented
        return self.params == other.params and np.array_equal(self.symbols, other.symbols)


def h_entry(table, j, a, x, y, z):
    """Entry of H at row (j, a) and column (x, y; z)."""
    f = table.field
    zy = z[y]
    if a == z:
        return f.pow(table.theta(x, y, zy), j)
    if zy != x and a == plane_sub(z, y, x):
        return f.mul(table.gamma_coeff(zy, x), f.pow(table.theta(x, y, zy), j))
    return 0


class Term(NamedTuple):
    """One symbol occurring in the parity equations of a plane.

    The symbol A(node; plane) enters equation j with coefficient
    ``coef * theta**j``.
    """
    node: int
    plane: int
    coef: int
    theta: int


@lru_cache(maxsize=4096)
def _plane_terms(table, ordinal):
    p = table.params
    q, t = p.q, p.t
    z = plane_digits(ordinal, q, t)
    terms = []
    for y in range(t):
        for x in range(q):
            terms.append(Term(q * y + x, ordinal, 1, table.theta(x, y, z[y])))
    for y in range(t):
        zy = z[y]
        for x in range(q):
            if x == zy:
                continue
            terms.append(Term(q * y + zy, plane_ordinal(plane_sub(z, y, x), q),
                              table.gamma_coeff(x, zy), table.theta(zy, y, x)))
    return tuple(terms)


def plane_terms(table, z):
    """In-plane and out-of-plane terms of the parity equations for plane ``z``."""
    if not isinstance(z, int):
        z = plane_ordinal(z, table.params.q)
    return _plane_terms(table, z)


def check_parity(codeword, table):
    """True iff every parity equation of every plane holds."""
    f = table.field
    p = table.params
    a = codeword.symbols
    for ordinal in range(p.alpha):
        terms = plane_terms(table, ordinal)
        for j in range(p.r):
            acc = 0
            for term in terms:
                v = a[term.node, term.plane]
                if v:
                    acc ^= f.mul(f.mul(term.coef, f.pow(term.theta, j)), int(v))
            if acc:
                return False
    return True


def parity_check_matrix(table, nodes=None):
    """Materialize H (rows (j, a) -> a*r + j, columns (node, z) -> i*alpha + z).

    Built entry by entry from :func:`h_entry`; only oracles and the
    verifier use it.  ``nodes`` restricts the columns to those node ids,
    in the given order.
    """
    p = table.params
    q, t, r, alpha = p.q, p.t, p.r, p.alpha
    nodes = list(range(p.n_base)) if nodes is None else list(nodes)
    planes = [plane_digits(o, q, t) for o in range(alpha)]
    h = np.zeros((r * alpha, len(nodes) * alpha), dtype=np.int64)
    for ci, node in enumerate(nodes):
        x, y = Node.from_id(node, q)
        for zo, z in enumerate(planes):
            col = ci * alpha + zo
            # Only rows a = z and a = z(y, x) can be nonzero.
            for a in {z, plane_sub(z, y, x)}:
                ao = plane_ordinal(a, q)
                for j in range(r):
                    h[ao * r + j, col] = h_entry(table, j, a, x, y, z)
    return h
