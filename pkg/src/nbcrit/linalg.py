"""Small exact linear algebra over K and over F_p."""

from __future__ import annotations

from typing import Sequence


def det(matrix: Sequence[Sequence], zero, one):
    """Determinant by Gaussian elimination over an exact field.

    Pivots are chosen with minimal valuation, which keeps the entries small.
    """
    a = [list(row) for row in matrix]
    n = len(a)
    result = one
    for col in range(n):
        pivot_row = None
        best = None
        for r in range(col, n):
            x = a[r][col]
            if not x.is_zero() and (best is None or x.valuation < best):
                pivot_row, best = r, x.valuation
        if pivot_row is None:
            return zero
        if pivot_row != col:
            a[col], a[pivot_row] = a[pivot_row], a[col]
            result = -result
        piv = a[col][col]
        result = result * piv
        inv = piv.inverse()
        for r in range(col + 1, n):
            if a[r][col].is_zero():
                continue
            f = a[r][col] * inv
            row_r, row_c = a[r], a[col]
            for c in range(col + 1, n):
                if not row_c[c].is_zero():
                    row_r[c] = row_r[c] - f * row_c[c]
    return result


def charpoly(matrix: Sequence[Sequence], zero, one) -> list:
    """Characteristic polynomial ``det(xI - A)``, coefficients constant first.

    Berkowitz's division-free algorithm.
    """
    n = len(matrix)
    poly = [one]  # highest degree first
    for k in range(n):
        a_kk = matrix[k][k]
        row = [matrix[k][j] for j in range(k)]
        col = [matrix[i][k] for i in range(k)]
        toeplitz = [one, -a_kk]
        vec = col
        for _ in range(k):
            toeplitz.append(-_dot(row, vec, zero))
            vec = [_dot(matrix[i][:k], vec, zero) for i in range(k)]
        new = []
        for i in range(k + 2):
            acc = zero
            for j in range(k + 1):
                if 0 <= i - j < len(toeplitz):
                    acc = acc + toeplitz[i - j] * poly[j]
            new.append(acc)
        poly = new
    return list(reversed(poly))


def _dot(u, v, zero):
    acc = zero
    for x, y in zip(u, v):
        acc = acc + x * y
    return acc


def rank(matrix: Sequence[Sequence]) -> int:
    return len(_echelon(matrix)[1])


def _echelon(matrix):
    """Row echelon form over K; returns (rows, pivot columns)."""
    a = [list(row) for row in matrix]
    pivots = []
    r = 0
    ncols = len(a[0]) if a else 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(a)) if not a[i][c].is_zero()), None)
        if pr is None:
            continue
        a[r], a[pr] = a[pr], a[r]
        inv = a[r][c].inverse()
        a[r] = [x * inv for x in a[r]]
        for i in range(len(a)):
            if i != r and not a[i][c].is_zero():
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == len(a):
            break
    return a, pivots


def kernel_vector(matrix: Sequence[Sequence], one):
    """A nonzero ``x`` with ``matrix @ x == 0``, or ``None`` if the kernel is trivial."""
    ncols = len(matrix[0])
    a, pivots = _echelon(matrix)
    free = [c for c in range(ncols) if c not in pivots]
    if not free:
        return None
    f = free[0]
    zero = one - one
    x = [zero] * ncols
    x[f] = one
    for i, c in enumerate(pivots):
        x[c] = -a[i][f]
    return x


def inverse(matrix: Sequence[Sequence], zero, one):
    n = len(matrix)
    aug = [list(row) + [one if i == j else zero for j in range(n)] for i, row in enumerate(matrix)]
    a, pivots = _echelon(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in a[:n]]


# -- F_p linear algebra for subgroups of (Z/p)^n ------------------------------

def fp_rref(rows: Sequence[Sequence[int]], p: int) -> tuple[tuple[int, ...], ...]:
    """Reduced row echelon basis of the row span over F_p (zero rows dropped)."""
    a = [[x % p for x in row] for row in rows]
    if not a:
        return ()
    ncols = len(a[0])
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(a)) if a[i][c]), None)
        if pr is None:
            continue
        a[r], a[pr] = a[pr], a[r]
        inv = pow(a[r][c], -1, p)
        a[r] = [x * inv % p for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [(x - f * y) % p for x, y in zip(a[i], a[r])]
        r += 1
    return tuple(tuple(row) for row in a[:r])


def fp_annihilator(rows: Sequence[Sequence[int]], n: int, p: int) -> tuple[tuple[int, ...], ...]:
    """Basis (reduced echelon) of ``{a : a . c = 0 for all c in rows}``."""
    basis = fp_rref(rows, p)
    pivots = [next(i for i, x in enumerate(row) if x) for row in basis]
    out = []
    for f in range(n):
        if f in pivots:
            continue
        a = [0] * n
        a[f] = 1
        for row, pc in zip(basis, pivots):
            a[pc] = (-row[f]) % p
        out.append(a)
    return fp_rref(out, p)
