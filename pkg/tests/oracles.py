"""Slow, independent reference implementations used only by the tests."""

from itertools import product


def clmul_mod(a, b, modulus, m):
    """Schoolbook carry-less multiply reduced by ``modulus`` (degree m)."""
    out = 0
    while b:
        if b & 1:
            out ^= a
        b >>= 1
        a <<= 1
        if a >> m:
            a ^= modulus
    return out


def brute_subgroup(modulus, m):
    """Powers λ^{3i} of λ = x, generated by repeated multiplication."""
    order = (1 << m) - 1
    lam3 = clmul_mod(clmul_mod(2, 2, modulus, m), 2, modulus, m)
    out, v = [], 1
    for _ in range(order // 3):
        out.append(v)
        v = clmul_mod(v, lam3, modulus, m)
    return out


def h_from_equations(table):
    """H assembled row by row from the written-out parity equation of each plane.

    For plane z and exponent j the equation is
        sum_{x,y} θ_{x,y;z_y}^j A(x,y;z)
      + sum_{y} sum_{x != z_y} γ_{x,z_y} θ_{z_y,y;x}^j A(z_y,y; z(y,x)) = 0.
    """
    import numpy as np

    p, f = table.params, table.field
    q, t, r, alpha = p.q, p.t, p.r, p.alpha
    planes = list(product(range(q), repeat=t))
    # product() varies the last digit fastest; ordinals are little-endian
    planes = [tuple(reversed(z)) for z in planes]

    def ordinal(z):
        return sum(d * q ** y for y, d in enumerate(z))

    def gcoef(x, x2):
        return table.gamma if x < x2 else (0 if x == x2 else 1)

    h = np.zeros((r * alpha, p.n_base * alpha), dtype=np.int64)
    for z in planes:
        a = ordinal(z)
        for j in range(r):
            row = a * r + j
            for y in range(t):
                for x in range(q):
                    col = (q * y + x) * alpha + a
                    h[row, col] ^= f.pow(table.theta(x, y, z[y]), j)
                zy = z[y]
                for x in range(q):
                    if x == zy:
                        continue
                    zz = list(z)
                    zz[y] = x
                    col = (q * y + zy) * alpha + ordinal(zz)
                    h[row, col] ^= f.mul(gcoef(x, zy), f.pow(table.theta(zy, y, x), j))
    return h


def gf_rank(rows, f):
    """Rank by a plain-Python elimination independent of the solver module."""
    rows = [list(map(int, r)) for r in rows]
    rk = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((i for i in range(rk, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[rk], rows[piv] = rows[piv], rows[rk]
        inv = f.inv(rows[rk][c])
        rows[rk] = [f.mul(inv, v) for v in rows[rk]]
        for i in range(len(rows)):
            if i != rk and rows[i][c]:
                fac = rows[i][c]
                rows[i] = [u ^ f.mul(fac, v) for u, v in zip(rows[i], rows[rk])]
        rk += 1
    return rk
