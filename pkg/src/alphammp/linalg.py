"""Small exact linear-algebra kit over integers and Fractions.

Matrices are tuples of row tuples.  Everything here is sized for Picard
lattices (rank <= 9), so clarity and exactness win over asymptotics.
Hermite normal forms are delegated to sympy; the solvers and the signature
reduction are done directly on Fractions because they sit on hot paths.
"""

from __future__ import annotations

from fractions import Fraction

from sympy import Matrix as _SymMatrix
from sympy.matrices.normalforms import hermite_normal_form as _hnf

Mat = tuple[tuple, ...]
Vec = tuple


def mat(rows) -> Mat:
    return tuple(tuple(r) for r in rows)


def identity(n: int) -> Mat:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def transpose(a: Mat) -> Mat:
    return tuple(zip(*a))


def mat_mul(a: Mat, b: Mat) -> Mat:
    assert len(a[0]) == len(b), "inner dimensions must agree"
    bt = transpose(b)
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a)


def mat_vec(a: Mat, v: Vec) -> Vec:
    assert len(a[0]) == len(v), "dimension mismatch"
    return tuple(sum(x * y for x, y in zip(row, v)) for row in a)


def vec_mat(v: Vec, a: Mat) -> Vec:
    return tuple(sum(x * y for x, y in zip(v, col)) for col in transpose(a))


def dot(v: Vec, w: Vec) -> Fraction:
    assert len(v) == len(w)
    return sum(x * y for x, y in zip(v, w))


def det_bareiss(a: Mat) -> int:
    """Exact determinant of an integer matrix, fraction-free Bareiss."""
    n = len(a)
    if n == 0:
        return 1
    m = [list(map(int, row)) for row in a]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def solve_exact(a: Mat, rhs: Mat) -> Mat:
    """Solve a @ X = rhs exactly; a is m x n with full column rank.

    Raises ValueError when the system is inconsistent.  Entries come back
    as Fractions (integral Fractions if the solution happens to be integral).
    """
    m, n = len(a), len(a[0])
    k = len(rhs[0])
    assert len(rhs) == m, "rhs row count mismatch"
    aug = [[Fraction(a[i][j]) for j in range(n)] + [Fraction(rhs[i][j]) for j in range(k)]
           for i in range(m)]
    pivots = []
    row = 0
    for col in range(n):
        piv = next((r for r in range(row, m) if aug[r][col] != 0), None)
        if piv is None:
            raise ValueError("matrix does not have full column rank")
        aug[row], aug[piv] = aug[piv], aug[row]
        pv = aug[row][col]
        aug[row] = [x / pv for x in aug[row]]
        for r in range(m):
            if r != row and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[row])]
        pivots.append(col)
        row += 1
        if row == n:
            break
    for r in range(row, m):
        if any(aug[r][n + j] != 0 for j in range(k)):
            raise ValueError("inconsistent system")
    return tuple(tuple(aug[i][n + j] for j in range(k)) for i in range(n))


def as_int_matrix(a: Mat) -> Mat:
    out = []
    for row in a:
        r = []
        for x in row:
            f = Fraction(x)
            if f.denominator != 1:
                raise ValueError(f"non-integral entry {f}")
            r.append(f.numerator)
        out.append(tuple(r))
    return tuple(out)


def column_lattice_basis(a: Mat) -> Mat:
    """Canonical integer basis (as columns) of the lattice spanned by a's columns.

    Column-style Hermite normal form with zero columns dropped, so a rank-r
    image yields an (m x r) matrix.
    """
    h = _hnf(_SymMatrix([list(map(int, row)) for row in a]))
    return tuple(tuple(int(x) for x in h.row(i)) for i in range(h.rows))


def _extgcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, s, t) with s*a + t*b = g = gcd(a, b), g >= 0."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def row_unimodular_reduce(w: Vec) -> tuple[int, Mat]:
    """Unimodular n x n matrix U with w @ U = (g, 0, ..., 0), where g is the
    gcd of the entries of w (g = 0 for w = 0).

    The columns of U beyond the first span the full integer kernel of w,
    saturated (every integer solution of w . x = 0 is an integer combination
    of them).  Column 0 scaled by c/g solves w . x = c whenever g | c.
    """
    n = len(w)
    w = [int(x) for x in w]
    u = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    g = w[0]
    for i in range(1, n):
        if w[i] == 0:
            continue
        d, s, t = _extgcd(g, w[i])
        p, q = (-(w[i] // d), g // d)
        for r in range(n):
            c0, ci = u[r][0], u[r][i]
            u[r][0] = s * c0 + t * ci
            u[r][i] = p * c0 + q * ci
        g = d
    if g < 0:
        for r in range(n):
            u[r][0] = -u[r][0]
        g = -g
    return g, tuple(tuple(row) for row in u)


def integer_row_kernel(w: Vec) -> Mat:
    """Columns spanning the saturated integer kernel of the single row w."""
    g, u = row_unimodular_reduce(w)
    n = len(w)
    start = 0 if g == 0 else 1
    return tuple(tuple(u[r][c] for c in range(start, n)) for r in range(n))


def signature(gram: Mat) -> tuple[int, int, int]:
    """(positive, negative, zero) inertia of a symmetric matrix.

    Exact congruence diagonalization over Fractions (Sylvester's law), no
    eigenvalues involved.
    """
    n = len(gram)
    g = [[Fraction(gram[i][j]) for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(n):
            assert g[i][j] == g[j][i], "gram matrix must be symmetric"
    pos = neg = zer = 0
    idx = list(range(n))
    k = 0
    while k < n:
        piv = next((i for i in range(k, n) if g[i][i] != 0), None)
        if piv is None:
            # all remaining diagonal zero; find off-diagonal nonzero
            hit = None
            for i in range(k, n):
                for j in range(i + 1, n):
                    if g[i][j] != 0:
                        hit = (i, j)
                        break
                if hit:
                    break
            if hit is None:
                zer += n - k
                break
            i, j = hit
            # add row/col j into i to create a nonzero diagonal entry
            for c in range(n):
                g[i][c] += g[j][c]
            for r in range(n):
                g[r][i] += g[r][j]
            piv = i
        if piv != k:
            g[k], g[piv] = g[piv], g[k]
            for r in range(n):
                g[r][k], g[r][piv] = g[r][piv], g[r][k]
        d = g[k][k]
        if d > 0:
            pos += 1
        else:
            neg += 1
        for r in range(k + 1, n):
            if g[r][k] != 0:
                f = g[r][k] / d
                for c in range(n):
                    g[r][c] -= f * g[k][c]
        for c in range(k + 1, n):
            if g[k][c] != 0:
                f = g[k][c] / d
                for r in range(n):
                    g[r][c] -= f * g[r][k]
        k += 1
    return pos, neg, zer


def is_unimodular(a: Mat) -> bool:
    return abs(det_bareiss(a)) == 1
