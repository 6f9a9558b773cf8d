"""Exact integer linear algebra.

Everything here works on Python ints (and ``fractions.Fraction`` where a
rational answer is unavoidable); there is no floating point anywhere.  Matrices
are small, so plain nested tuples are used rather than numpy object arrays.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable, Optional, Sequence

from .errors import LatticeError, TorsionError

Vector = tuple[int, ...]


@dataclass(frozen=True)
class IntMatrix:
    """Immutable integer matrix stored row-major.

    The shape is kept explicitly so that matrices with zero rows or zero
    columns still know their other dimension.
    """

    nrows: int
    ncols: int
    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.rows) != self.nrows or any(len(r) != self.ncols for r in self.rows):
            raise ValueError("row data does not match the declared shape")
        for r in self.rows:
            for x in r:
                if not isinstance(x, int) or isinstance(x, bool):
                    raise TypeError(f"non-integer matrix entry {x!r}")

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[int]], ncols: Optional[int] = None) -> "IntMatrix":
        data = tuple(tuple(int(x) for x in r) for r in rows)
        if ncols is None:
            if not data:
                raise ValueError("ncols is required for a matrix with no rows")
            ncols = len(data[0])
        return cls(len(data), ncols, data)

    @classmethod
    def from_columns(cls, cols: Iterable[Iterable[int]], nrows: int) -> "IntMatrix":
        cols = [tuple(int(x) for x in c) for c in cols]
        for c in cols:
            if len(c) != nrows:
                raise ValueError("column length does not match nrows")
        rows = tuple(tuple(c[i] for c in cols) for i in range(nrows))
        return cls(nrows, len(cols), rows)

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "IntMatrix":
        return cls(nrows, ncols, tuple((0,) * ncols for _ in range(nrows)))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    @property
    def T(self) -> "IntMatrix":
        cols = tuple(tuple(r[j] for r in self.rows) for j in range(self.ncols))
        return IntMatrix(self.ncols, self.nrows, cols)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.rows[i][j]

    def row(self, i: int) -> Vector:
        return self.rows[i]

    def column(self, j: int) -> Vector:
        return tuple(r[j] for r in self.rows)

    def columns(self) -> list[Vector]:
        return [self.column(j) for j in range(self.ncols)]

    def __matmul__(self, other):
        if isinstance(other, IntMatrix):
            if self.ncols != other.nrows:
                raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
            cols = other.columns()
            rows = tuple(tuple(_dot(r, c) for c in cols) for r in self.rows)
            return IntMatrix(self.nrows, other.ncols, rows)
        vec = tuple(other)
        if len(vec) != self.ncols:
            raise ValueError(f"shape mismatch {self.shape} @ vector of length {len(vec)}")
        return tuple(_dot(r, vec) for r in self.rows)

    def __neg__(self) -> "IntMatrix":
        return IntMatrix(self.nrows, self.ncols, tuple(tuple(-x for x in r) for r in self.rows))

    def hstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.nrows != other.nrows:
            raise ValueError("hstack needs equal row counts")
        return IntMatrix(self.nrows, self.ncols + other.ncols,
                         tuple(a + b for a, b in zip(self.rows, other.rows)))

    def vstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.ncols != other.ncols:
            raise ValueError("vstack needs equal column counts")
        return IntMatrix(self.nrows + other.nrows, self.ncols, self.rows + other.rows)

    def select_columns(self, idx: Sequence[int]) -> "IntMatrix":
        return IntMatrix(self.nrows, len(idx), tuple(tuple(r[j] for j in idx) for r in self.rows))

    def select_rows(self, idx: Sequence[int]) -> "IntMatrix":
        return IntMatrix(len(idx), self.ncols, tuple(self.rows[i] for i in idx))

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.rows for x in r)

    def det(self) -> int:
        if self.nrows != self.ncols:
            raise ValueError("determinant of a non-square matrix")
        return _bareiss_det([list(r) for r in self.rows])

    def is_unimodular(self) -> bool:
        return self.nrows == self.ncols and self.det() in (1, -1)

    def to_lists(self) -> list[list[int]]:
        return [list(r) for r in self.rows]

    def __repr__(self) -> str:
        return f"IntMatrix({self.to_lists()!r}, shape={self.shape})"


@dataclass(frozen=True)
class Lattice:
    """A free abelian group Z^rank."""

    rank: int

    def __post_init__(self):
        if self.rank < 0:
            raise ValueError("lattice rank must be non-negative")


@dataclass(frozen=True)
class SmithDecomposition:
    U: IntMatrix
    D: IntMatrix
    V: IntMatrix
    invariant_factors: tuple[int, ...]
    U_inverse: Optional[IntMatrix] = None

    @property
    def rank(self) -> int:
        return len(self.invariant_factors)


@dataclass(frozen=True)
class QuotientLattice:
    """Z^n / L for a sublattice L given by generating columns.

    ``projection`` maps Z^n onto the free part Z^(n - rank L); ``section`` is a
    right inverse of it.  ``torsion`` lists invariant factors > 1; it is
    always empty unless the caller asked for torsion to be tolerated.
    """

    ambient: Lattice
    sub_basis: IntMatrix
    quotient: Lattice
    projection: IntMatrix
    section: IntMatrix
    torsion: tuple[int, ...] = field(default=())

    def project(self, v: Sequence[int]) -> Vector:
        return self.projection @ v

    def lift(self, w: Sequence[int]) -> Vector:
        return self.section @ w


def _dot(a: Sequence, b: Sequence):
    return sum(x * y for x, y in zip(a, b))


def dot(a: Sequence, b: Sequence):
    """Inner product of two equal-length sequences."""
    if len(a) != len(b):
        raise ValueError("dot product of vectors with different lengths")
    return _dot(a, b)


def _bareiss_det(m: list[list[int]]) -> int:
    n = len(m)
    if n == 0:
        return 1
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
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def primitive(v: Sequence[int]) -> Vector:
    """Divide an integer vector by the gcd of its entries (zero stays zero)."""
    g = 0
    for x in v:
        g = gcd(g, x)
    if g <= 1:
        return tuple(int(x) for x in v)
    return tuple(x // g for x in v)


def is_primitive(v: Sequence[int]) -> bool:
    g = 0
    for x in v:
        g = gcd(g, x)
    return g == 1


# ---------------------------------------------------------------------------
# Smith normal form
# ---------------------------------------------------------------------------

def smith_normal_form(A: IntMatrix) -> SmithDecomposition:
    """Return U, D, V with U·A·V = D diagonal and d_1 | d_2 | ...

    U and V are unimodular.  The invariant factors are the nonzero diagonal
    entries of D, all positive.
    """
    m, n = A.shape
    D = [list(r) for r in A.rows]
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]
    # U⁻¹ is kept alongside U: each row operation E on U is undone on the right
    Ui = [[int(i == j) for j in range(m)] for i in range(m)]

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]
        for r in Ui:
            r[i], r[j] = r[j], r[i]

    def swap_cols(i, j):
        for r in D:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]

    def add_row(dst, src, q):
        # row_dst += q * row_src
        D[dst] = [a + q * b for a, b in zip(D[dst], D[src])]
        U[dst] = [a + q * b for a, b in zip(U[dst], U[src])]
        for r in Ui:
            r[src] -= q * r[dst]

    def add_col(dst, src, q):
        for r in D:
            r[dst] += q * r[src]
        for r in V:
            r[dst] += q * r[src]

    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if D[i][j] != 0 and (best is None or abs(D[i][j]) < abs(D[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            p = D[t][t]
            clean = True
            for i in range(t + 1, m):
                if D[i][t]:
                    add_row(i, t, -(D[i][t] // p))
                    if D[i][t]:
                        clean = False
            for j in range(t + 1, n):
                if D[t][j]:
                    add_col(j, t, -(D[t][j] // p))
                    if D[t][j]:
                        clean = False
            if not clean:
                # move the smallest leftover in row/column t onto the pivot
                cand = [(abs(D[i][t]), i, t) for i in range(t + 1, m) if D[i][t]]
                cand += [(abs(D[t][j]), t, j) for j in range(t + 1, n) if D[t][j]]
                _, i, j = min(cand)
                if i != t:
                    swap_rows(t, i)
                else:
                    swap_cols(t, j)
                continue
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if D[i][j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            add_row(t, bad, 1)
        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            U[t] = [-x for x in U[t]]
            for r in Ui:
                r[t] = -r[t]
        t += 1

    factors = tuple(D[i][i] for i in range(min(m, n)) if D[i][i] != 0)
    return SmithDecomposition(
        U=IntMatrix.from_rows(U, ncols=m),
        D=IntMatrix.from_rows(D, ncols=n),
        V=IntMatrix.from_rows(V, ncols=n),
        invariant_factors=factors,
        U_inverse=IntMatrix.from_rows(Ui, ncols=m),
    )


def invariant_factors(A: IntMatrix) -> tuple[int, ...]:
    return smith_normal_form(A).invariant_factors


def inverse_unimodular(M: IntMatrix) -> IntMatrix:
    """Exact inverse of a unimodular matrix.

    From U·M·V = I we get M⁻¹ = V·U.
    """
    if M.nrows != M.ncols:
        raise LatticeError("inverse of a non-square matrix")
    snf = smith_normal_form(M)
    if snf.rank < M.nrows:
        raise LatticeError("matrix is singular")
    if any(d != 1 for d in snf.invariant_factors):
        raise LatticeError("matrix is not unimodular")
    return snf.V @ snf.U


# ---------------------------------------------------------------------------
# Sublattices and quotients
# ---------------------------------------------------------------------------

def _check_ambient(sub_basis: IntMatrix, ambient: Lattice) -> None:
    if sub_basis.nrows != ambient.rank:
        raise ValueError(
            f"sublattice generators have {sub_basis.nrows} coordinates, ambient rank is {ambient.rank}")


def is_saturated(sub_basis: IntMatrix, ambient: Lattice) -> bool:
    """True iff the lattice spanned by the columns equals its rational span ∩ Z^n."""
    _check_ambient(sub_basis, ambient)
    return all(d == 1 for d in invariant_factors(sub_basis))


def quotient(ambient: Lattice, sub_basis: IntMatrix, allow_torsion: bool = False) -> QuotientLattice:
    """Quotient of ``ambient`` by the sublattice spanned by the columns of ``sub_basis``.

    The columns must be linearly independent.  A non-saturated sublattice
    raises :class:`TorsionError` unless ``allow_torsion`` is set, in which case
    the torsion factors are recorded and the projection is onto the free part.
    """
    _check_ambient(sub_basis, ambient)
    n, k = sub_basis.shape
    snf = smith_normal_form(sub_basis)
    r = snf.rank
    if r < k:
        raise LatticeError(f"sublattice generators are linearly dependent (rank {r} < {k})")
    torsion = tuple(d for d in snf.invariant_factors if d > 1)
    if torsion and not allow_torsion:
        raise TorsionError(f"quotient has torsion {' x '.join(f'Z/{d}' for d in torsion)}", list(torsion))
    Uinv = snf.U_inverse
    projection = snf.U.select_rows(list(range(r, n)))
    section = Uinv.select_columns(list(range(r, n)))
    return QuotientLattice(
        ambient=ambient,
        sub_basis=sub_basis,
        quotient=Lattice(n - r),
        projection=projection,
        section=section,
        torsion=torsion,
    )


def saturation_basis(vectors: Sequence[Sequence[int]], n: int) -> IntMatrix:
    """Columns form a basis of span(vectors) ∩ Z^n."""
    if not vectors:
        return IntMatrix.zeros(n, 0)
    S = IntMatrix.from_columns(vectors, n)
    snf = smith_normal_form(S)
    return snf.U_inverse.select_columns(list(range(snf.rank)))


def integer_kernel(A: IntMatrix) -> IntMatrix:
    """Columns form a basis of {x ∈ Z^n : A x = 0}; the result is saturated."""
    snf = smith_normal_form(A)
    return snf.V.select_columns(list(range(snf.rank, A.ncols)))


def solve_integer_linear(A: IntMatrix, b: Sequence[int]) -> Optional[Vector]:
    """One integer solution of A·x = b, or None when there is none."""
    b = tuple(int(x) for x in b)
    if len(b) != A.nrows:
        raise ValueError("right-hand side length does not match the matrix")
    snf = smith_normal_form(A)
    c = snf.U @ b
    r = snf.rank
    y = [0] * A.ncols
    for i in range(A.nrows):
        if i < r:
            d = snf.D[i, i]
            if c[i] % d:
                return None
            y[i] = c[i] // d
        elif c[i] != 0:
            return None
    x = snf.V @ y
    if A @ x != b:
        raise AssertionError("integer solve failed verification")
    return x


def coordinates(basis: IntMatrix, v: Sequence[int]) -> Optional[Vector]:
    """Integer coordinates of ``v`` in the basis given by the columns, if any."""
    if basis.ncols == 0:
        return () if all(x == 0 for x in v) else None
    return solve_integer_linear(basis, v)


# ---------------------------------------------------------------------------
# Rational linear algebra
# ---------------------------------------------------------------------------

def _rref(rows: list[list[Fraction]], ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    m = [list(r) for r in rows]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / Fraction(m[r][c])
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank(vectors: Sequence[Sequence]) -> int:
    """Rank over Q of a list of equal-length vectors."""
    vectors = [v for v in vectors]
    if not vectors:
        return 0
    n = len(vectors[0])
    if n == 0:
        return 0
    if all(type(x) is int for v in vectors for x in v):
        return _int_rank([list(v) for v in vectors], n)
    _, piv = _rref([[Fraction(x) for x in v] for v in vectors], n)
    return len(piv)


def _int_rank(m: list[list[int]], ncols: int) -> int:
    """Rank by integer elimination, keeping rows small with gcd reduction."""
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r]
        a = p[c]
        for i in range(r + 1, len(m)):
            b = m[i][c]
            if b:
                row = [a * x - b * y for x, y in zip(m[i], p)]
                g = gcd(*row)
                m[i] = [x // g for x in row] if g > 1 else row
        r += 1
        if r == len(m):
            break
    return r


def independent_subset(vectors: Sequence[Sequence]) -> list[int]:
    """Indices of a greedy maximal linearly independent subfamily."""
    chosen: list[int] = []
    basis: list[Sequence] = []
    for i, v in enumerate(vectors):
        if rank(basis + [v]) > len(basis):
            basis.append(v)
            chosen.append(i)
    return chosen


def rational_inverse(M: IntMatrix) -> Optional[list[list[Fraction]]]:
    n = M.nrows
    if n != M.ncols:
        raise ValueError("inverse of a non-square matrix")
    aug = [[Fraction(x) for x in M.rows[i]] + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    red, piv = _rref(aug, 2 * n)
    if piv[:n] != list(range(n)):
        return None
    return [r[n:] for r in red[:n]]


def solve_rational(A: Sequence[Sequence], b: Sequence) -> Optional[tuple[Fraction, ...]]:
    """One rational solution of A·x = b (free variables set to zero), or None."""
    nrows = len(A)
    if nrows == 0:
        return None if any(x != 0 for x in b) else ()
    ncols = len(A[0])
    aug = [[Fraction(x) for x in A[i]] + [Fraction(b[i])] for i in range(nrows)]
    red, piv = _rref(aug, ncols + 1)
    if ncols in piv:
        return None
    x = [Fraction(0)] * ncols
    for row, c in zip(red, piv):
        x[c] = row[ncols]
    return tuple(x)


def rational_kernel(rows: Sequence[Sequence], ncols: int) -> list[Vector]:
    """Primitive integer vectors spanning {x ∈ Q^n : rows·x = 0} over Q."""
    if not rows:
        return [tuple(int(i == j) for j in range(ncols)) for i in range(ncols)]
    red, piv = _rref([[Fraction(x) for x in r] for r in rows], ncols)
    free = [c for c in range(ncols) if c not in piv]
    out = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, c in zip(red, piv):
            v[c] = -row[f]
        out.append(clear_denominators(v))
    return out


def clear_denominators(v: Sequence) -> Vector:
    """Smallest positive multiple of a rational vector that is integral and primitive."""
    den = 1
    for x in v:
        x = Fraction(x)
        den = den * x.denominator // gcd(den, x.denominator)
    return primitive(tuple(int(Fraction(x) * den) for x in v))


def left_inverse(basis: IntMatrix) -> IntMatrix:
    """Integer matrix C with C·basis = I, for a saturated basis of independent columns.

    C sends a point of the spanned sublattice to its coordinates.
    """
    k = basis.ncols
    if k == 0:
        return IntMatrix.zeros(0, basis.nrows)
    snf = smith_normal_form(basis)
    if snf.rank < k:
        raise LatticeError("basis columns are linearly dependent")
    if any(d != 1 for d in snf.invariant_factors):
        raise TorsionError("basis does not span a saturated sublattice", [d for d in snf.invariant_factors if d > 1])
    C = snf.V @ snf.U.select_rows(list(range(k)))
    if C @ basis != IntMatrix.identity(k):
        raise AssertionError("left inverse failed verification")
    return C


def block_diagonal(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    top = a.hstack(IntMatrix.zeros(a.nrows, b.ncols))
    bottom = IntMatrix.zeros(b.nrows, a.ncols).hstack(b)
    return top.vstack(bottom)
