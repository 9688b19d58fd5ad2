"""Code parameters, field selection and the θ coefficient table."""

from dataclasses import dataclass

from .errors import ConstructionError, ParameterError, UnsupportedParameters
from .gf2m import PRIMITIVE_POLYS, cosets, field_new


@dataclass(frozen=True)
class CodeParams:
    """Parameters of an (n, k, d) code obtained by shortening a base (q*t, q*t - r) code.

    Node ids ``0 .. n-1`` are real nodes (``0 .. k-1`` systematic,
    ``k .. n-1`` parity); ids ``n .. n_base-1`` are the ``delta`` virtual
    nodes that always hold zeros.
    """
    n: int
    k: int
    d: int
    q: int
    t: int
    r: int
    n_base: int
    delta: int
    alpha: int
    beta: int
    m: int
    w: int

    @property
    def Q(self):
        return 1 << self.m

    @property
    def real_nodes(self):
        return range(self.n)

    @property
    def virtual_nodes(self):
        return range(self.n, self.n_base)

    @property
    def systematic_nodes(self):
        return range(self.k)

    @property
    def parity_nodes(self):
        return range(self.k, self.n)

    @property
    def file_size(self):
        """Message symbols per stripe, B = k * alpha."""
        return self.k * self.alpha

    @property
    def repair_bandwidth(self):
        return self.d * self.beta


def select_field(q, t):
    """Smallest supported even m with 2^m large enough for the coset θ assignment."""
    if q not in (2, 3, 4):
        raise UnsupportedParameters(f"q={q} not in {{2, 3, 4}}")
    if t < 2:
        raise ParameterError(f"t={t} must be at least 2")
    w = 1 if q == 2 else 3
    bound = 6 * t + 2 if q == 2 else 18 * t + 2
    for m in sorted(PRIMITIVE_POLYS):
        if (1 << m) >= bound and ((1 << m) - 1) // 3 > w * t:
            return m
    raise UnsupportedParameters(
        f"q={q}, t={t} needs a field larger than GF(2^{max(PRIMITIVE_POLYS)})")


def derive_params(n, k, d):
    if k < 1 or k >= n:
        raise ParameterError(f"need 1 <= k < n, got n={n}, k={k}")
    if d < k + 1 or d > k + 3:
        raise UnsupportedParameters(f"d={d} outside [k+1, k+3] = [{k + 1}, {k + 3}]")
    if d > n - 1:
        raise ParameterError(f"d={d} exceeds n-1={n - 1}")
    q = d - k + 1
    r = n - k
    t = -(-n // q)
    if t < 2:
        raise ParameterError(f"t=ceil(n/q)={t} must be at least 2")
    if r < q:
        raise ParameterError(f"r={r} < q={q}")
    m = select_field(q, t)
    alpha = q ** t
    return CodeParams(
        n=n, k=k, d=d, q=q, t=t, r=r,
        n_base=q * t, delta=q * t - n,
        alpha=alpha, beta=alpha // q,
        m=m, w=1 if q == 2 else 3,
    )


def gamma_coeff(gamma, x, x2):
    """Coefficient γ_{x,x'}: γ if x < x', 0 if x == x', 1 if x > x'."""
    if x < x2:
        return gamma
    if x == x2:
        return 0
    return 1


def _theta_matrix(q, base, gamma, field):
    """Θ_y as a q×q list of lists, rows indexed by z_y and columns by x."""
    t0 = base[0]
    t = base
    g = lambda v: field.mul(gamma, v)  # noqa: E731
    if q == 2:
        return [[t0, g(t[1])],
                [t[1], t0]]
    if q == 3:
        return [[t0, g(t[1]), g(t[2])],
                [t[1], t0, g(t[3])],
                [t[2], t[3], t0]]
    if q == 4:
        return [[t0, g(t[1]), g(t[2]), g(t[3])],
                [t[1], t0, g(t[3]), g(t[2])],
                [t[2], t[3], t0, g(t[1])],
                [t[3], t[2], t[1], t0]]
    raise UnsupportedParameters(f"q={q} not in {{2, 3, 4}}")


class ThetaTable:
    """All coefficients θ_{x,y;z} of the parity-check matrix.

    ``base[(i, y)]`` holds θ_{i,y} for ``i in 0..w`` and ``theta(x, y, z)``
    returns θ_{x,y;z} = Θ_y(z, x).  Construction asserts the four table
    invariants unless ``check=False`` (used to build deliberately broken
    tables for negative tests).
    """

    def __init__(self, params, field, gamma, base, check=True):
        self.params = params
        self.field = field
        self.gamma = gamma
        self.base = dict(base)
        q, t = params.q, params.t
        # matrices[y][z][x] = θ_{x,y;z}
        self.matrices = []
        for y in range(t):
            vals = [self.base[(i, y)] for i in range(params.w + 1)]
            self.matrices.append(_theta_matrix(q, vals, gamma, field))
        if check:
            problems = self.invariant_violations()
            if problems:
                raise ConstructionError("θ table invariants violated: " + "; ".join(problems))

    def theta(self, x, y, z):
        return self.matrices[y][z][x]

    def diagonal(self, y):
        return self.base[(0, y)]

    def gamma_coeff(self, x, x2):
        return gamma_coeff(self.gamma, x, x2)

    def with_base(self, overrides, check=False):
        """Copy of this table with some θ_{i,y} replaced."""
        base = dict(self.base)
        base.update(overrides)
        return ThetaTable(self.params, self.field, self.gamma, base, check=check)

    def invariant_violations(self):
        """Return a list of human-readable invariant failures (empty if none)."""
        p, f, gamma = self.params, self.field, self.gamma
        q, t = p.q, p.t
        out = []
        if gamma in (0, 1):
            out.append(f"gamma={gamma} must not be 0 or 1")
        for y in range(t):
            for x in range(q):
                if self.theta(x, y, x) != self.base[(0, y)]:
                    out.append(f"diagonal rule fails at x={x}, y={y}")
                for z in range(x):
                    if self.theta(x, y, z) != f.mul(gamma, self.theta(z, y, x)):
                        out.append(f"reciprocity fails at x={x}, y={y}, z={z}")
                coll = [self.theta(x, y, x)]
                for i in range(q):
                    if i != x:
                        coll += [self.theta(x, y, i), self.theta(i, y, x)]
                if len(set(coll)) != len(coll):
                    out.append(f"per-node collection not distinct at x={x}, y={y}")
        glob = []
        for y in range(t):
            glob.append(self.base[(0, y)])
            for i in range(1, p.w + 1):
                glob += [self.base[(i, y)], f.mul(gamma, self.base[(i, y)])]
        if len(set(glob)) != len(glob):
            out.append("global θ collection not distinct")
        if 0 in glob:
            out.append("zero θ value")
        return out


def assign_thetas(params, ctx=None):
    """θ_{i,y} = G[w*y + i - 1] for i >= 1, θ_{0,y} = γ²·G[y], γ = λ."""
    ctx = ctx or field_new(params.m)
    w, t = params.w, params.t
    cos = cosets(ctx)
    if len(cos.g) <= w * t:
        raise ConstructionError(
            f"|G|={len(cos.g)} must exceed w*t={w * t}; field GF(2^{ctx.m}) too small")
    base = {}
    for y in range(t):
        base[(0, y)] = cos.gamma2_g[y]
        for i in range(1, w + 1):
            base[(i, y)] = cos.g[w * y + i - 1]
    return ThetaTable(params, ctx, ctx.lam, base)
