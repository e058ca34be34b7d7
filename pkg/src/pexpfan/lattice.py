"""Exact integer linear algebra for the lattices N and M.

Vectors are plain tuples of Python ints (arbitrary precision); an element of
the cocharacter lattice N and a character in the dual lattice M are both
``Vector``s, paired by the ordinary dot product ``pair``.  Matrices are tuples
of row tuples.  Everything here is total, deterministic, and allocation-happy
rather than clever: exactness is the product.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from .errors import NotIndependent, NotSaturated, NotUnimodular, ZeroVector

Vector = tuple[int, ...]
IntMatrix = tuple[tuple[int, ...], ...]


def pair(u: Vector, v: Vector) -> int:
    """Evaluation pairing <u, v> between a character and a lattice point."""
    if len(u) != len(v):
        raise ValueError(f"pairing of vectors of lengths {len(u)} and {len(v)}")
    return sum(a * b for a, b in zip(u, v))


def vec_add(u: Vector, v: Vector) -> Vector:
    return tuple(a + b for a, b in zip(u, v))


def vec_scale(c: int, u: Vector) -> Vector:
    return tuple(c * a for a in u)


def identity_matrix(n: int) -> IntMatrix:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def mat_mul(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    if a and b and len(a[0]) != len(b):
        raise ValueError("matrix shapes do not compose")
    bt = tuple(zip(*b)) if b else ()
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a)


def mat_vec(a: IntMatrix, v: Vector) -> Vector:
    return tuple(sum(x * y for x, y in zip(row, v)) for row in a)


def transpose(a: IntMatrix) -> IntMatrix:
    return tuple(zip(*a)) if a else ()


def primitive_vector(v: Vector) -> Vector:
    """Divide out the gcd of the coordinates; direction is preserved."""
    g = 0
    for c in v:
        g = gcd(g, c)
    if g == 0:
        raise ZeroVector("zero vector has no primitive generator")
    return tuple(c // g for c in v)


def is_primitive(v: Vector) -> bool:
    g = 0
    for c in v:
        g = gcd(g, c)
    return g == 1


def smith_normal_form(a: IntMatrix) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Return unimodular (U, V) and diagonal D with U*A*V = D.

    The diagonal entries are nonnegative and satisfy d_1 | d_2 | ... .  Pivot
    selection is the smallest nonzero absolute entry of the working submatrix,
    with ties broken by (row, column) order, so the output is reproducible.
    """
    m = len(a)
    n = len(a[0]) if m else 0
    d = [list(row) for row in a]
    u = [list(row) for row in identity_matrix(m)]
    v = [list(row) for row in identity_matrix(n)]

    def swap_rows(i, j):
        if i != j:
            d[i], d[j] = d[j], d[i]
            u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        if i != j:
            for row in d:
                row[i], row[j] = row[j], row[i]
            for row in v:
                row[i], row[j] = row[j], row[i]

    def add_row(i, j, c):
        # row_i += c * row_j
        d[i] = [x + c * y for x, y in zip(d[i], d[j])]
        u[i] = [x + c * y for x, y in zip(u[i], u[j])]

    def add_col(i, j, c):
        # col_i += c * col_j
        for row in d:
            row[i] += c * row[j]
        for row in v:
            row[i] += c * row[j]

    def negate_row(i):
        d[i] = [-x for x in d[i]]
        u[i] = [-x for x in u[i]]

    t = 0
    while t < min(m, n):
        # deterministic pivot: smallest |entry| != 0, first by (row, col)
        best = None
        for i in range(t, m):
            for j in range(t, n):
                x = d[i][j]
                if x != 0 and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
        if best is None:
            break
        swap_rows(t, best[1])
        swap_cols(t, best[2])

        while True:
            # shrink entries in column t by remainders, then in row t
            moved = False
            for i in range(t + 1, m):
                if d[i][t] != 0:
                    q = d[i][t] // d[t][t]
                    add_row(i, t, -q)
                    if d[i][t] != 0:
                        swap_rows(t, i)
                        moved = True
            if moved:
                continue
            for j in range(t + 1, n):
                if d[t][j] != 0:
                    q = d[t][j] // d[t][t]
                    add_col(j, t, -q)
                    if d[t][j] != 0:
                        swap_cols(t, j)
                        moved = True
            if moved:
                continue
            # row and column are clear; enforce the divisibility chain
            p = d[t][t]
            culprit = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if d[i][j] % p != 0:
                        culprit = i
                        break
                if culprit is not None:
                    break
            if culprit is None:
                break
            add_row(t, culprit, 1)
        if d[t][t] < 0:
            negate_row(t)
        t += 1

    return (
        tuple(tuple(row) for row in u),
        tuple(tuple(row) for row in d),
        tuple(tuple(row) for row in v),
    )


def invariant_factors(a: IntMatrix) -> tuple[int, ...]:
    """Nonzero diagonal entries of the Smith form, in order."""
    _, d, _ = smith_normal_form(a)
    out = []
    for i in range(min(len(d), len(d[0]) if d else 0)):
        if d[i][i] != 0:
            out.append(d[i][i])
    return tuple(out)


def matrix_rank(a: IntMatrix) -> int:
    return len(invariant_factors(a))


def unimodular_inverse(a: IntMatrix) -> IntMatrix:
    """Exact inverse of a matrix with determinant +-1."""
    u, d, v = smith_normal_form(a)
    n = len(a)
    if len(d) != n or any(d[i][i] != 1 for i in range(n)):
        raise NotUnimodular("matrix is not invertible over the integers")
    return mat_mul(v, u)


def integer_det(a: IntMatrix) -> int:
    """Signed determinant of a square integer matrix, via the Smith form."""
    n = len(a)
    if any(len(row) != n for row in a):
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return 1
    u, d, v = smith_normal_form(a)
    prod = 1
    for i in range(n):
        prod *= d[i][i]
    if prod == 0:
        return 0
    # U A V = D with U, V unimodular, so det A = det D / (det U * det V);
    # recover the +-1 dets of U and V by one more Smith pass each.
    return prod * _unimodular_det(u) * _unimodular_det(v)


def _unimodular_det(a: IntMatrix) -> int:
    n = len(a)
    # fraction-free Bareiss; entries stay integral, final pivot is the det
    m = [list(row) for row in a]
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
    return sign * (m[n - 1][n - 1] if n else 1)


def kernel_basis(a: IntMatrix, n_cols: int) -> tuple[Vector, ...]:
    """Saturated basis of {x : A x = 0} in Z^n_cols."""
    if not a:
        return tuple(identity_matrix(n_cols))
    _, d, v = smith_normal_form(a)
    r = sum(1 for i in range(min(len(d), n_cols)) if d[i][i] != 0)
    cols = transpose(v)
    return tuple(cols[j] for j in range(r, n_cols))


def annihilator(rank: int, vectors: list[Vector] | tuple[Vector, ...]) -> tuple[Vector, ...]:
    """Saturated basis of the characters vanishing on every given vector."""
    rows = tuple(tuple(v) for v in vectors)
    for v in rows:
        if len(v) != rank:
            raise ValueError("vector length does not match the lattice rank")
    # <u, v> = 0 for all v  <=>  (rows) u^T = 0
    return kernel_basis(rows, rank)


def saturation_basis(rank: int, vectors: list[Vector] | tuple[Vector, ...]) -> tuple[Vector, ...]:
    """Basis of Span_Q(vectors) intersected with Z^rank (a saturated lattice)."""
    cols = tuple(tuple(v) for v in vectors)
    if not cols:
        return ()
    a = transpose(cols)  # rank x k, columns are the vectors
    u, d, _ = smith_normal_form(a)
    r = sum(1 for i in range(min(len(d), len(d[0]))) if d[i][i] != 0)
    uinv = unimodular_inverse(u)
    uinv_cols = transpose(uinv)
    return tuple(uinv_cols[i] for i in range(r))


@dataclass(frozen=True)
class QuotientLattice:
    """A free quotient M/L presented by an integer projection with a section.

    ``projection`` is an (r x n) matrix whose kernel on M is exactly the
    saturated sublattice L spanned by ``kernel_basis``; ``section`` is an
    (n x r) right inverse, so projection @ section = identity.
    """

    source_rank: int
    kernel_basis: tuple[Vector, ...]
    projection: IntMatrix
    section: IntMatrix

    @property
    def rank(self) -> int:
        return self.source_rank - len(self.kernel_basis)

    def project_vector(self, u: Vector) -> Vector:
        return mat_vec(self.projection, u)

    def lift_vector(self, w: Vector) -> Vector:
        return mat_vec(self.section, w)


def quotient_lattice(rank: int, kernel: list[Vector] | tuple[Vector, ...]) -> QuotientLattice:
    """Present M / span(kernel) via the Smith form.

    The kernel vectors must be linearly independent and span a saturated
    sublattice; the quotient is then free of rank ``rank - len(kernel)``.
    """
    kernel = tuple(tuple(v) for v in kernel)
    k = len(kernel)
    for v in kernel:
        if len(v) != rank:
            raise ValueError("kernel vector length does not match the rank")
    if k == 0:
        ident = identity_matrix(rank)
        return QuotientLattice(rank, (), ident, ident)
    a = transpose(kernel)  # rank x k, kernel vectors as columns
    u, d, _ = smith_normal_form(a)
    r = sum(1 for i in range(min(rank, k)) if d[i][i] != 0)
    if r < k:
        raise NotIndependent("kernel vectors are linearly dependent")
    if any(d[i][i] != 1 for i in range(k)):
        raise NotSaturated("kernel spans a non-saturated sublattice")
    projection = tuple(u[k:])
    uinv = unimodular_inverse(u)
    section = tuple(row[k:] for row in uinv)
    return QuotientLattice(rank, kernel, projection, section)


def identity_quotient(rank: int) -> QuotientLattice:
    ident = identity_matrix(rank)
    return QuotientLattice(rank, (), ident, ident)


def pairing_quotient(rank: int, span_basis: tuple[Vector, ...]) -> QuotientLattice:
    """Quotient of M by the annihilator of a saturated sublattice of N.

    Coordinates on the quotient are the pairings with the given basis of the
    sublattice, so for a single primitive generator v the quotient coordinate
    of u is exactly <u, v>.
    """
    d = len(span_basis)
    if d == 0:
        return QuotientLattice(rank, tuple(identity_matrix(rank)), (), tuple(() for _ in range(rank)))
    projection = tuple(tuple(b) for b in span_basis)
    kern = kernel_basis(projection, rank)
    # integer right inverse: solve projection @ section = I_d column by column
    section_cols = []
    for j in range(d):
        target = tuple(1 if i == j else 0 for i in range(d))
        section_cols.append(solve_integer(projection, target))
    section = transpose(tuple(section_cols))
    return QuotientLattice(rank, kern, projection, section)


def solve_integer(a: IntMatrix, b: Vector) -> Vector:
    """One integer solution x of A x = b; raises ValueError if none exists."""
    m = len(a)
    n = len(a[0]) if m else 0
    u, d, v = smith_normal_form(a)
    c = mat_vec(u, b)
    y = [0] * n
    for i in range(m):
        di = d[i][i] if i < n else 0
        if di != 0:
            if c[i] % di != 0:
                raise ValueError("no integer solution")
            y[i] = c[i] // di
        elif c[i] != 0:
            raise ValueError("no integer solution")
    return mat_vec(v, tuple(y))


def dual_basis(basis: list[Vector] | tuple[Vector, ...]) -> tuple[Vector, ...]:
    """Characters u_i with <u_i, v_j> = delta_ij for a unimodular basis of N."""
    basis = tuple(tuple(v) for v in basis)
    n = len(basis)
    if any(len(v) != n for v in basis):
        raise ValueError("dual_basis needs n vectors of rank n")
    cols = transpose(basis)  # columns are the basis vectors
    try:
        inv = unimodular_inverse(cols)
    except NotUnimodular:
        raise NotUnimodular(f"basis matrix has determinant {integer_det(cols)}")
    return tuple(inv)  # rows of the inverse pair dually with the columns
