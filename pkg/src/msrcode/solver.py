"""Dense linear algebra over GF(2^m).

Matrices are 2-D integer numpy arrays holding field elements; every
function takes the :class:`~msrcode.gf2m.FieldContext` explicitly.
Elimination pivots on the first nonzero entry scanning down a column.
"""

import numpy as np

from .errors import SingularMatrixError


def as_matrix(rows):
    return np.array(rows, dtype=np.int64, ndmin=2)


def _eliminate(field, a, ncols, full=True):
    """Row-reduce ``a`` in place over its first ``ncols`` columns.

    Returns ``(pivot_cols, det)`` where ``det`` is the product of the
    pivots met before normalisation (meaningful only for square input).
    With ``full`` the result is in reduced row echelon form.
    """
    nrows = a.shape[0]
    row = 0
    pivots = []
    det = 1
    for col in range(ncols):
        if row >= nrows:
            break
        nz = np.nonzero(a[row:, col])[0]
        if nz.size == 0:
            continue
        p = row + int(nz[0])
        if p != row:
            a[[row, p]] = a[[p, row]]
        piv = int(a[row, col])
        det = field.mul(det, piv)
        a[row] = field.mul_array(field.inv(piv), a[row])
        targets = np.nonzero(a[:, col])[0] if full else row + 1 + np.nonzero(a[row + 1:, col])[0]
        targets = targets[targets != row]
        if targets.size:
            factors = a[targets, col]
            a[targets] ^= field.mul_array(factors[:, None], a[row][None, :])
        pivots.append(col)
        row += 1
    return pivots, det


def solve(field, a, b):
    """Solve ``a @ x = b`` for square ``a``; ``b`` may be a vector or a matrix of columns."""
    a = np.asarray(a, dtype=np.int64)
    n = a.shape[0]
    if a.ndim != 2 or a.shape[1] != n:
        raise ValueError(f"solve needs a square matrix, got shape {a.shape}")
    return solve_full_rank(field, a, b)


def solve_full_rank(field, a, b):
    """Solve a consistent system whose matrix has full column rank.

    Accepts tall matrices (more equations than unknowns); surplus equations
    must be consistent with the solution.
    """
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    vec = b.ndim == 1
    rhs = b[:, None] if vec else b
    nrows, ncols = a.shape
    if rhs.shape[0] != nrows:
        raise ValueError(f"right-hand side has {rhs.shape[0]} rows, matrix has {nrows}")
    aug = np.concatenate([a, rhs], axis=1)
    pivots, _ = _eliminate(field, aug, ncols)
    if len(pivots) < ncols:
        raise SingularMatrixError(next(c for c in range(ncols) if c not in pivots))
    if np.any(aug[ncols:, ncols:]):
        raise ValueError("inconsistent overdetermined system")
    x = aug[:ncols, ncols:]
    return x[:, 0].copy() if vec else x.copy()


def inverse(field, a):
    a = np.asarray(a, dtype=np.int64)
    return solve(field, a, np.eye(a.shape[0], dtype=np.int64))


def determinant(field, a):
    a = np.array(a, dtype=np.int64)
    n = a.shape[0]
    if a.ndim != 2 or a.shape[1] != n:
        raise ValueError(f"determinant needs a square matrix, got shape {a.shape}")
    pivots, det = _eliminate(field, a, n, full=False)
    return det if len(pivots) == n else 0


def rank(field, a):
    a = np.array(a, dtype=np.int64, ndmin=2)
    pivots, _ = _eliminate(field, a, a.shape[1], full=False)
    return len(pivots)


def matmul(field, a, b):
    return field.matvec(a, b)
