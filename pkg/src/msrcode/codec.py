"""Systematic encoding, erasure decoding and optimal-access node repair.

Decoding and repair both run the same machinery.  Planes are visited in
order of increasing intersection score with the set of unavailable nodes.
Planes that must be solved together are gathered into a plane group, and
each group's parity equations form one square system.  Everything that
depends only on *which* nodes are missing (group order, system matrices
and their inverses) is compiled once into a plan and cached.  Applying a
plan to data is then a sequence of gathers and matrix-vector products, and
works the same on one stripe or on a batch of stripes.
"""

from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from itertools import combinations

import numpy as np

from .cube import (
    Codeword, Node, intersection_score, parity_check_matrix, plane_digits,
    plane_group, plane_ordinal, plane_sub, plane_terms,
)
from .errors import ConstructionError, ParameterError, SingularMatrixError, UnrecoverableError
from .params import assign_thetas, derive_params
from .solver import inverse, solve_full_rank


@dataclass(frozen=True)
class _Step:
    planes: tuple
    score: int
    cell_node: np.ndarray
    cell_plane: np.ndarray
    inv: np.ndarray
    rhs_row: np.ndarray
    rhs_node: np.ndarray
    rhs_plane: np.ndarray
    rhs_coef: np.ndarray


def _compile_group(table, group, cells, known):
    """Assemble and invert the system for one plane group.

    ``cells`` lists the unknown (node, plane) symbols; every other symbol
    met in the group's equations must already be marked in ``known``.
    """
    p = table.params
    f = table.field
    r = p.r
    index = {cell: i for i, cell in enumerate(cells)}
    ordinals = [plane_ordinal(z, p.q) for z in group.planes]
    nrows = r * len(ordinals)
    if nrows != len(cells):
        raise ConstructionError(
            f"group {group.planes}: {len(cells)} unknowns but {nrows} equations")
    mat = np.zeros((nrows, len(cells)), dtype=np.int64)
    rhs_row, rhs_node, rhs_plane, rhs_coef = [], [], [], []
    for gi, a in enumerate(ordinals):
        terms = plane_terms(table, a)
        for j in range(r):
            row = gi * r + j
            for term in terms:
                coef = f.mul(term.coef, f.pow(term.theta, j))
                cell = (term.node, term.plane)
                col = index.get(cell)
                if col is not None:
                    mat[row, col] ^= coef
                elif term.node >= p.n:
                    continue  # virtual node, always zero
                elif known[cell]:
                    rhs_row.append(row)
                    rhs_node.append(term.node)
                    rhs_plane.append(term.plane)
                    rhs_coef.append(coef)
                else:
                    raise ConstructionError(
                        f"symbol {cell} referenced by plane {a} (score {group.score}) "
                        "is neither known nor part of the current group")
    try:
        inv = inverse(f, mat)
    except SingularMatrixError as exc:
        raise ConstructionError(
            f"group system for planes {group.planes} is singular (column {exc.column})") from exc
    cell_node = np.array([c[0] for c in cells], dtype=np.int64)
    cell_plane = np.array([c[1] for c in cells], dtype=np.int64)
    known[cell_node, cell_plane] = True
    return _Step(
        planes=tuple(ordinals), score=group.score,
        cell_node=cell_node, cell_plane=cell_plane, inv=inv,
        rhs_row=np.array(rhs_row, dtype=np.int64),
        rhs_node=np.array(rhs_node, dtype=np.int64),
        rhs_plane=np.array(rhs_plane, dtype=np.int64),
        rhs_coef=np.array(rhs_coef, dtype=np.int64),
    )


def _groups_by_score(params, erased_xy, planes):
    """Yield plane groups over ``planes`` by increasing score, then by least ordinal."""
    q, t = params.q, params.t
    digits = {o: plane_digits(o, q, t) for o in planes}
    scores = {o: intersection_score(erased_xy, digits[o]) for o in planes}
    done = set()
    for s in range(t + 1):
        for o in sorted(planes):
            if scores[o] != s or o in done:
                continue
            group = plane_group(erased_xy, digits[o])
            members = {plane_ordinal(z, q) for z in group.planes}
            if not members <= set(planes):
                raise ConstructionError(f"plane group of {digits[o]} leaves the plane set")
            done |= members
            yield group


@lru_cache(maxsize=256)
def decode_plan(table, erased):
    """Compiled steps recovering the nodes in ``erased`` (exactly r node ids)."""
    p = table.params
    erased = tuple(sorted(erased))
    if len(erased) != p.r:
        raise ValueError(f"decode plans are built for exactly r={p.r} erasures")
    erased_xy = {Node.from_id(e, p.q) for e in erased}
    known = np.ones((p.n_base, p.alpha), dtype=bool)
    known[list(erased)] = False
    steps = []
    for group in _groups_by_score(p, erased_xy, range(p.alpha)):
        cells = [(e, plane_ordinal(z, p.q)) for z in group.planes for e in erased]
        steps.append(_compile_group(table, group, cells, known))
    if not known.all():
        raise ConstructionError("decode plan left symbols unsolved")
    return tuple(steps)


def repair_planes(params, failed):
    """Ordinals of the planes z with z_{y0} = x0, in increasing order."""
    x0, y0 = Node.from_id(failed, params.q)
    return tuple(o for o in range(params.alpha)
                 if plane_digits(o, params.q, params.t)[y0] == x0)


@lru_cache(maxsize=1024)
def repair_plan(table, failed, helpers):
    p = table.params
    q = p.q
    helpers = tuple(sorted(helpers))
    x0, y0 = Node.from_id(failed, q)
    aloof = tuple(v for v in p.real_nodes if v != failed and v not in helpers)
    if len(aloof) != p.r - q:
        raise ConstructionError(f"{len(aloof)} aloof nodes, expected r-q={p.r - q}")
    planes = repair_planes(p, failed)
    known = np.zeros((p.n_base, p.alpha), dtype=bool)
    known[p.n:] = True
    for h in helpers:
        known[h, list(planes)] = True
    aloof_xy = {Node.from_id(a, q) for a in aloof}
    steps = []
    for group in _groups_by_score(p, aloof_xy, planes):
        cells = [(a, plane_ordinal(z, q)) for z in group.planes for a in aloof]
        cells += [(failed, plane_ordinal(plane_sub(z, y0, x), q))
                  for z in group.planes for x in range(q)]
        steps.append(_compile_group(table, group, cells, known))
    if not known[failed].all():
        raise ConstructionError("repair plan left failed-node symbols unsolved")
    return tuple(steps)


def run_plan(steps, field, symbols):
    """Apply compiled steps in place to ``symbols`` of shape (n_base, alpha[, stripes])."""
    batch = symbols.ndim == 3
    for st in steps:
        vals = symbols[st.rhs_node, st.rhs_plane]
        coef = st.rhs_coef[:, None] if batch else st.rhs_coef
        prods = field.mul_array(coef, vals)
        rhs = np.zeros((st.inv.shape[1],) + symbols.shape[2:], dtype=np.int64)
        np.bitwise_xor.at(rhs, st.rhs_row, prods)
        symbols[st.cell_node, st.cell_plane] = field.matvec(st.inv, rhs)
    return symbols


# public operations

@dataclass
class ErasureState:
    """A codeword with some real nodes missing.

    ``symbols`` has the full (n_base, alpha) shape; entries of erased nodes
    are ignored.  Virtual nodes are always treated as known zeros.
    """
    symbols: np.ndarray
    erased: frozenset

    @classmethod
    def from_codeword(cls, codeword, erased):
        s = codeword.symbols.copy()
        erased = frozenset(int(e) for e in erased)
        s[list(erased)] = 0
        return cls(s, erased)

    def known(self, params):
        mask = np.ones((params.n_base, params.alpha), dtype=bool)
        mask[list(self.erased)] = False
        return mask


@dataclass
class RepairTrace:
    """What each helper transmitted while repairing ``failed``.

    ``payload[h]`` is a tuple of ``(plane_ordinal, symbol)`` pairs read
    verbatim from helper ``h``.
    """
    failed: int
    helpers: tuple
    aloof: tuple
    planes: tuple
    payload: dict = dc_field(default_factory=dict)

    def symbols_from(self, helper):
        return len(self.payload[helper])

    @property
    def total_symbols(self):
        return sum(len(v) for v in self.payload.values())


def _check_erasures(params, erased):
    bad = [e for e in erased if not 0 <= e < params.n]
    if bad:
        raise ParameterError(f"erased ids {bad} are not real nodes of an n={params.n} code")
    if len(erased) > params.r:
        raise UnrecoverableError(
            f"{len(erased)} erasures exceed the r={params.r} the code can recover")


def _pad_erasures(params, erased):
    """Extend ``erased`` to exactly r nodes with the highest-id available real nodes."""
    extra = [v for v in reversed(params.real_nodes) if v not in erased]
    return frozenset(erased) | frozenset(extra[:params.r - len(erased)])


def encode(message, params, table):
    """Place ``message`` (k*alpha symbols) on the systematic nodes and fill in parity."""
    msg = np.asarray(message, dtype=np.int64)
    if msg.shape[0] != params.k * params.alpha:
        raise ParameterError(
            f"message has {msg.shape[0]} symbols, expected k*alpha={params.k * params.alpha}")
    if np.any((msg < 0) | (msg >= params.Q)):
        raise ParameterError(f"message symbols must lie in [0, {params.Q})")
    symbols = np.zeros((params.n_base, params.alpha) + msg.shape[1:], dtype=np.int64)
    symbols[:params.k] = msg.reshape((params.k, params.alpha) + msg.shape[1:])
    run_plan(decode_plan(table, frozenset(params.parity_nodes)), table.field, symbols)
    if msg.ndim == 1:
        return Codeword(symbols, params)
    return symbols


def decode(state, params, table):
    """Recover every erased node of ``state`` and return the full codeword."""
    erased = frozenset(state.erased)
    _check_erasures(params, erased)
    symbols = np.array(state.symbols, dtype=np.int64)
    symbols[params.n:] = 0
    if not erased:
        return Codeword(symbols, params)
    given = symbols.copy()
    padded = _pad_erasures(params, erased)
    run_plan(decode_plan(table, padded), table.field, symbols)
    keep = [v for v in padded if v not in erased]
    symbols[keep] = given[keep]
    return Codeword(symbols, params)


@lru_cache(maxsize=64)
def _full_parity_check(table):
    h = parity_check_matrix(table)
    h.setflags(write=False)
    return h


def decode_naive(state, params, table):
    """Reference decoder: one global system built from the materialized H."""
    erased = sorted(frozenset(state.erased))
    _check_erasures(params, erased)
    symbols = np.array(state.symbols, dtype=np.int64)
    symbols[params.n:] = 0
    if not erased:
        return Codeword(symbols, params)
    alpha = params.alpha
    h = _full_parity_check(table)
    cols = np.array([e * alpha + z for e in erased for z in range(alpha)])
    mask = np.ones(h.shape[1], dtype=bool)
    mask[cols] = False
    flat = symbols.reshape(-1)
    rhs = table.field.matvec(h[:, mask], flat[mask])
    try:
        x = solve_full_rank(table.field, h[:, cols], rhs)
    except SingularMatrixError as exc:
        raise ConstructionError(f"erased columns of H are rank deficient at {exc.column}") from exc
    flat[cols] = x
    return Codeword(flat.reshape(params.n_base, alpha), params)


def _check_helpers(params, failed, helpers):
    if not 0 <= failed < params.n:
        raise ParameterError(f"failed node {failed} is not a real node")
    if failed in helpers:
        raise ParameterError("the failed node cannot be its own helper")
    virtual = [h for h in helpers if h >= params.n]
    if virtual or any(h < 0 for h in helpers):
        raise ParameterError(f"helpers {sorted(helpers)} include non-real nodes")
    if len(helpers) != params.d:
        raise UnrecoverableError(f"repair needs exactly d={params.d} helpers, got {len(helpers)}")


def repair_from_reads(params, table, failed, reads):
    """Rebuild node ``failed`` from helper reads alone.

    ``reads`` maps helper id to an array of its symbols on the repair
    planes (shape (beta,) or (beta, stripes)).  Returns shape (alpha,) or
    (alpha, stripes).
    """
    helpers = frozenset(reads)
    _check_helpers(params, failed, helpers)
    planes = list(repair_planes(params, failed))
    first = np.asarray(next(iter(reads.values())))
    work = np.zeros((params.n_base, params.alpha) + first.shape[1:], dtype=np.int64)
    for h, vals in reads.items():
        vals = np.asarray(vals, dtype=np.int64)
        if vals.shape[0] != params.beta:
            raise ParameterError(f"helper {h} sent {vals.shape[0]} symbols, expected beta={params.beta}")
        work[h, planes] = vals
    run_plan(repair_plan(table, failed, helpers), table.field, work)
    return work[failed].copy()


def repair(c_lost, failed, helpers, params, table):
    """Repair node ``failed`` by downloading beta symbols from each of d helpers.

    Only the helper symbols on planes {z : z_{y0} = x0} are read from
    ``c_lost``; they are copied verbatim into the trace.
    """
    helpers = frozenset(int(h) for h in helpers)
    _check_helpers(params, failed, helpers)
    planes = repair_planes(params, failed)
    stored = c_lost.symbols if isinstance(c_lost, Codeword) else np.asarray(c_lost)
    payload = {h: tuple((z, int(stored[h, z])) for z in planes) for h in sorted(helpers)}
    reads = {h: np.array([v for _, v in pl], dtype=np.int64) for h, pl in payload.items()}
    rebuilt = repair_from_reads(params, table, failed, reads)
    trace = RepairTrace(
        failed=failed,
        helpers=tuple(sorted(helpers)),
        aloof=tuple(v for v in params.real_nodes if v != failed and v not in helpers),
        planes=planes,
        payload=payload,
    )
    return rebuilt, trace


class MSRCode:
    """Convenience bundle of parameters, θ table and the codec operations."""

    def __init__(self, n, k, d):
        self.params = derive_params(n, k, d)
        self.table = assign_thetas(self.params)
        self.field = self.table.field

    def __repr__(self):
        p = self.params
        return f"MSRCode(n={p.n}, k={p.k}, d={p.d})"

    def encode(self, message):
        return encode(message, self.params, self.table)

    def decode(self, codeword, erased):
        return decode(ErasureState.from_codeword(codeword, erased), self.params, self.table)

    def repair(self, codeword, failed, helpers):
        return repair(codeword, failed, helpers, self.params, self.table)

    def encode_stripes(self, messages):
        """Encode an array of shape (stripes, k*alpha); returns (stripes, n, alpha)."""
        msgs = np.asarray(messages, dtype=np.int64)
        if msgs.shape[0] == 0:
            return np.zeros((0, self.params.n, self.params.alpha), dtype=np.int64)
        cube = encode(msgs.T, self.params, self.table)
        return np.moveaxis(cube, 2, 0)[:, :self.params.n]

    def decode_stripes(self, nodes):
        """Rebuild all real nodes from ``{node_id: array (stripes, alpha)}``."""
        p = self.params
        present = {int(v): np.asarray(a, dtype=np.int64) for v, a in nodes.items()}
        erased = frozenset(v for v in p.real_nodes if v not in present)
        _check_erasures(p, erased)
        stripes = next(iter(present.values())).shape[0]
        symbols = np.zeros((p.n_base, p.alpha, stripes), dtype=np.int64)
        for v, a in present.items():
            symbols[v] = a.T
        if erased and stripes:
            padded = _pad_erasures(p, erased)
            given = symbols.copy()
            run_plan(decode_plan(self.table, padded), self.field, symbols)
            keep = [v for v in padded if v not in erased]
            symbols[keep] = given[keep]
        return np.moveaxis(symbols, 2, 0)[:, :p.n]

    def erasure_patterns(self, size=None):
        return combinations(self.params.real_nodes, self.params.r if size is None else size)
