"""Dense matrices over rational functions and fraction-free linear algebra."""

from .gcd import coprime_basis, coprime_to_each, factor_over, is_coprime, poly_lcm
from .poly import Poly
from .ratfunc import RatFunc, substitute
from .variables import var_index


class DimensionError(ValueError):
    pass


class SingularMatrixError(ArithmeticError):
    pass


def _rf(x, field=0):
    if isinstance(x, RatFunc):
        return x
    if isinstance(x, Poly):
        return RatFunc.from_poly(x)
    return RatFunc.const(x, field)


class Matrix:
    """rows x cols matrix with RatFunc entries stored row-major."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries):
        entries = tuple(entries)
        if rows <= 0 or cols <= 0:
            raise DimensionError("matrix dimensions must be positive")
        if len(entries) != rows * cols:
            raise DimensionError(f"{rows}x{cols} matrix needs {rows * cols} entries, got {len(entries)}")
        self.rows, self.cols = rows, cols
        self.entries = tuple(_rf(e) for e in entries)

    @classmethod
    def from_rows(cls, rows):
        rows = [list(r) for r in rows]
        if not rows or any(len(r) != len(rows[0]) for r in rows):
            raise DimensionError("ragged or empty row list")
        return cls(len(rows), len(rows[0]), [e for r in rows for e in r])

    @classmethod
    def identity(cls, n, field=0):
        one, zero = RatFunc.one(field), RatFunc.zero(field)
        return cls(n, n, [one if i == j else zero for i in range(n) for j in range(n)])

    @classmethod
    def zeros(cls, r, c, field=0):
        return cls(r, c, [RatFunc.zero(field)] * (r * c))

    @classmethod
    def diag(cls, values):
        values = [_rf(v) for v in values]
        n = len(values)
        zero = RatFunc.zero(values[0].field)
        return cls(n, n, [values[i] if i == j else zero for i in range(n) for j in range(n)])

    @classmethod
    def block(cls, blocks):
        """Assemble from a 2-D list of Matrix blocks."""
        out = []
        for brow in blocks:
            h = brow[0].rows
            if any(b.rows != h for b in brow):
                raise DimensionError("block row height mismatch")
            for r in range(h):
                for b in brow:
                    out.extend(b.row(r))
        width = sum(b.cols for b in blocks[0])
        return cls(len(out) // width, width, out)

    @property
    def shape(self):
        return (self.rows, self.cols)

    @property
    def field(self):
        return self.entries[0].field

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i):
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def col(self, j):
        return self.entries[j::self.cols]

    def to_rows(self):
        return [list(self.row(i)) for i in range(self.rows)]

    def submatrix(self, rows, cols):
        rows, cols = list(rows), list(cols)
        return Matrix(len(rows), len(cols), [self[i, j] for i in rows for j in cols])

    def get_block(self, bi, bj, size):
        return self.submatrix(range(bi * size, (bi + 1) * size), range(bj * size, (bj + 1) * size))

    def map(self, fn):
        return Matrix(self.rows, self.cols, [fn(e) for e in self.entries])

    def subs(self, s):
        return self.map(lambda e: substitute(e, s))

    def variables(self) -> set:
        out = set()
        for e in self.entries:
            out |= e.variables()
        return out

    # -- arithmetic -----------------------------------------------------
    def transpose(self):
        return Matrix(self.cols, self.rows, [self[i, j] for j in range(self.cols) for i in range(self.rows)])

    T = property(transpose)

    def __add__(self, other):
        if self.shape != other.shape:
            raise DimensionError(f"cannot add {self.shape} and {other.shape}")
        return Matrix(self.rows, self.cols, [a + b for a, b in zip(self.entries, other.entries)])

    def __sub__(self, other):
        if self.shape != other.shape:
            raise DimensionError(f"cannot subtract {self.shape} and {other.shape}")
        return Matrix(self.rows, self.cols, [a - b for a, b in zip(self.entries, other.entries)])

    def __neg__(self):
        return self.map(lambda e: -e)

    def scalar_mul(self, c):
        c = _rf(c, self.field)
        return self.map(lambda e: e * c)

    def __mul__(self, other):
        if isinstance(other, Matrix):
            return matmul(self, other)
        return self.scalar_mul(other)

    def __rmul__(self, other):
        return self.scalar_mul(other)

    def __matmul__(self, other):
        return matmul(self, other)

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    def __hash__(self):
        return hash((self.rows, self.cols, self.entries))

    def is_identity(self):
        return self.rows == self.cols and self == Matrix.identity(self.rows, self.field)

    def __repr__(self):
        return "Matrix([" + ", ".join("[" + ", ".join(str(e) for e in self.row(i)) + "]" for i in range(self.rows)) + "])"


def first_difference(A: Matrix, B: Matrix):
    """(i, j, A_ij, B_ij) for the first differing entry, or None."""
    if A.shape != B.shape:
        raise DimensionError(f"shape mismatch {A.shape} vs {B.shape}")
    for k, (a, b) in enumerate(zip(A.entries, B.entries)):
        if a != b:
            return (k // A.cols, k % A.cols, a, b)
    return None


def _lcm_all(polys):
    acc = None
    seen = set()
    for p in polys:
        if p.is_one() or p in seen:
            continue
        seen.add(p)
        acc = p if acc is None else poly_lcm(acc, p)
    return acc


def _cleared(entries):
    """(polynomial numerators over a common denominator L, L or None)."""
    L = _lcm_all(e.den for e in entries)
    if L is None:
        return [e.num for e in entries], None
    return [e.num * L.divexact(e.den) if not e.den == L else e.num for e in entries], L


def _basis_den(exps, basis, field):
    d = Poly.one(field)
    for i, e in exps.items():
        d = d * basis[i] ** e
    return d


def reduce_over_basis(num: Poly, exps: dict, basis) -> RatFunc:
    """num / prod basis[i]^exps[i] in canonical form.

    Trial division by the (pairwise coprime) basis elements, then a
    coprimality certificate for what is left of each one.
    """
    field = num.field
    if num.is_zero():
        return RatFunc.zero(field)
    exps = dict(exps)
    for i in list(exps):
        b = basis[i]
        while exps[i]:
            q = num.divexact(b)
            if q is None:
                break
            num = q
            exps[i] -= 1
    exps = {i: e for i, e in exps.items() if e}
    if not coprime_to_each(num, [basis[i] for i in exps]):
        return RatFunc(num, _basis_den(exps, basis, field))
    if not exps:
        return RatFunc.from_poly(num)
    return RatFunc(num, _basis_den(exps, basis, field), _canonical=True)._fix_lead()


def _factored_lcm(entries, basis, fact):
    out = {}
    for e in entries:
        for i, k in fact[e.den].items():
            if k > out.get(i, 0):
                out[i] = k
    return out


def _cleared_over(entries, exps, basis, field):
    L = _basis_den(exps, basis, field)
    return [e.num if e.den == L else e.num * L.divexact(e.den) for e in entries]


def matmul(A: Matrix, B: Matrix) -> Matrix:
    """Product over common row/column denominators, factored over a coprime basis.

    One normalization per entry, done by trial division against the basis.
    """
    if A.cols != B.rows:
        raise DimensionError(f"cannot multiply {A.shape} by {B.shape}")
    field = A.field
    dens = {e.den for e in A.entries + B.entries if not e.den.is_one()}
    basis = coprime_basis(dens)
    fact = {d: factor_over(d, basis) for d in dens}
    fact[Poly.one(field)] = {}
    arows = []
    for i in range(A.rows):
        row = A.row(i)
        ex = _factored_lcm(row, basis, fact)
        arows.append((_cleared_over(row, ex, basis, field), ex))
    bcols = []
    for j in range(B.cols):
        col = B.col(j)
        ex = _factored_lcm(col, basis, fact)
        bcols.append((_cleared_over(col, ex, basis, field), ex))
    out = []
    zero = Poly.zero(field)
    for P, L in arows:
        for Q, R in bcols:
            acc = {}
            for p, q in zip(P, Q):
                if p.terms and q.terms:
                    for m, c in (p * q).terms.items():
                        v = acc.get(m)
                        acc[m] = c if v is None else v + c
            num = Poly({m: c for m, c in acc.items() if c}, field) if acc else zero
            if not L and not R:
                out.append(RatFunc.from_poly(num))
                continue
            exps = dict(L)
            for i, k in R.items():
                exps[i] = exps.get(i, 0) + k
            out.append(reduce_over_basis(num, exps, basis))
    return Matrix(A.rows, B.cols, out)


def mat_arith(A: Matrix, B, op: str) -> Matrix:
    if op == "add":
        return A + B
    if op == "sub":
        return A - B
    if op == "mul":
        return matmul(A, B)
    if op == "transpose":
        return A.transpose()
    if op == "scalar_mul":
        return A.scalar_mul(B)
    raise ValueError(f"unknown matrix op {op!r}")


def _bareiss(M, field):
    """Determinant of a square list-of-lists of Polys (modified in place)."""
    n = len(M)
    sign = 1
    prev = Poly.one(field)
    for k in range(n - 1):
        if M[k][k].is_zero():
            cands = [r for r in range(k + 1, n) if not M[r][k].is_zero()]
            if not cands:
                return Poly.zero(field)
            r = min(cands, key=lambda r: len(M[r][k]))
            M[k], M[r] = M[r], M[k]
            sign = -sign
        pk = M[k][k]
        rowk = M[k]
        for i in range(k + 1, n):
            rowi = M[i]
            mik = rowi[k]
            for j in range(k + 1, n):
                v = rowi[j] * pk
                if mik.terms and rowk[j].terms:
                    v = v - mik * rowk[j]
                if not prev.is_one():
                    q = v.divexact(prev)
                    if q is None:
                        raise ArithmeticError("Bareiss step: inexact division")
                    v = q
                rowi[j] = v
        prev = pk
    d = M[n - 1][n - 1]
    return -d if sign < 0 else d


def _bareiss_rational(M, field):
    """Bareiss recurrence on normalized RatFunc entries (every intermediate is a minor)."""
    n = len(M)
    sign = 1
    prev = RatFunc.one(field)
    for k in range(n - 1):
        cands = [r for r in range(k, n) if not M[r][k].is_zero()]
        if not cands:
            return RatFunc.zero(field)
        r = min(cands, key=lambda r: (len(M[r][k].num) + len(M[r][k].den), r))
        if r != k:
            M[k], M[r] = M[r], M[k]
            sign = -sign
        pk = M[k][k]
        rowk = M[k]
        for i in range(k + 1, n):
            rowi = M[i]
            mik = rowi[k]
            for j in range(k + 1, n):
                v = rowi[j] * pk
                if mik and rowk[j]:
                    v = v - mik * rowk[j]
                rowi[j] = v if prev == 1 else v / prev
        prev = pk
    d = M[n - 1][n - 1]
    return -d if sign < 0 else d


def det_fraction_free(A: Matrix) -> RatFunc:
    """Determinant by Bareiss elimination.

    Polynomial matrices use exact polynomial division.  Matrices with
    denominators are eliminated on normalized rational-function entries: all
    intermediates are minors, whereas clearing row denominators would
    multiply the determinant by a product of spurious factors.
    """
    if A.rows != A.cols:
        raise DimensionError("determinant of a non-square matrix")
    field = A.field
    if all(e.den.is_one() for e in A.entries):
        M = [[e.num for e in A.row(i)] for i in range(A.rows)]
        return RatFunc.from_poly(_bareiss(M, field))
    M = [list(A.row(i)) for i in range(A.rows)]
    return _bareiss_rational(M, field)


def det_cofactor(A: Matrix) -> RatFunc:
    """Laplace expansion along the first row; exponential, meant as an oracle."""
    if A.rows != A.cols:
        raise DimensionError("determinant of a non-square matrix")
    n = A.rows
    if n == 1:
        return A[0, 0]
    if n == 2:
        return A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
    acc = RatFunc.zero(A.field)
    for j in range(n):
        a = A[0, j]
        if a.is_zero():
            continue
        minor = A.submatrix(range(1, n), [c for c in range(n) if c != j])
        term = a * det_cofactor(minor)
        acc = acc - term if j % 2 else acc + term
    return acc


def char_poly(A: Matrix, var: str = "x") -> RatFunc:
    """det(var*I - A); `var` must not occur in A."""
    if A.rows != A.cols:
        raise DimensionError("characteristic polynomial of a non-square matrix")
    idx = var_index(var)
    if idx in A.variables():
        raise ValueError(f"variable {var!r} already occurs in the matrix")
    x = RatFunc.var(var, A.field)
    n = A.rows
    shifted = Matrix(n, n, [(x if i == j else 0) - A[i, j] for i in range(n) for j in range(n)])
    return det_fraction_free(shifted)


def charpoly_coeffs(cp: RatFunc, var: str = "x"):
    """Coefficients of cp in `var`, ascending, each a RatFunc free of `var`."""
    idx = var_index(var)
    if idx in cp.den.variables():
        raise ValueError("denominator depends on the polynomial variable")
    parts = cp.num.coeffs_in(idx)
    deg = max(parts)
    zero = Poly.zero(cp.field)
    return [RatFunc(parts.get(e, zero), cp.den) for e in range(deg + 1)]


def eval_poly_at_matrix(coeffs, A: Matrix) -> Matrix:
    """sum coeffs[k] * A^k (Horner)."""
    n = A.rows
    acc = Matrix.zeros(n, n, A.field)
    I = Matrix.identity(n, A.field)
    for c in reversed(coeffs):
        acc = matmul(acc, A) + I.scalar_mul(c)
    return acc


def mat_inverse(A: Matrix) -> Matrix:
    """Exact inverse by fraction-free Gauss-Jordan on the denominator-cleared matrix.

    With A = diag(1/L_i) * P, the elimination turns [P | I] into
    [det*I | det*P^-1]; then A^-1 = P^-1 * diag(L).
    """
    if A.rows != A.cols:
        raise DimensionError("inverse of a non-square matrix")
    n = A.rows
    field = A.field
    zero, one = Poly.zero(field), Poly.one(field)
    M = []
    dens = []
    for i in range(n):
        P, L = _cleared(A.row(i))
        M.append(P + [one if i == j else zero for j in range(n)])
        dens.append(L if L is not None else one)
    prev = one
    for k in range(n):
        if M[k][k].is_zero():
            cands = [r for r in range(k + 1, n) if not M[r][k].is_zero()]
            if not cands:
                raise SingularMatrixError("matrix is singular")
            r = min(cands, key=lambda r: len(M[r][k]))
            M[k], M[r] = M[r], M[k]
        pk = M[k][k]
        rowk = M[k]
        for i in range(n):
            if i == k:
                continue
            rowi = M[i]
            mik = rowi[k]
            for j in range(2 * n):
                if j == k:
                    continue
                v = rowi[j] * pk
                if mik.terms and rowk[j].terms:
                    v = v - mik * rowk[j]
                if not prev.is_one() and v.terms:
                    q = v.divexact(prev)
                    if q is None:
                        raise ArithmeticError("fraction-free Gauss-Jordan: inexact division")
                    v = q
                rowi[j] = v
            rowi[k] = zero
        prev = pk
    out = []
    for i in range(n):
        d = M[i][i]
        for j in range(n):
            out.append(RatFunc(M[i][n + j] * dens[j], d))
    return Matrix(n, n, out)


SymMatrix = Matrix
