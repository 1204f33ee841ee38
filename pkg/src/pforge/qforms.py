"""Diagonal quadratic forms, Pfister forms and congruence witnesses."""

from dataclasses import dataclass
from typing import Optional, Sequence

from .algebra import Matrix, RatFunc, first_difference, mat_inverse, matmul
from .exprio import coerce, form_to_json, parse, print_canonical


class FormError(ValueError):
    pass


class CongruenceError(ValueError):
    def __init__(self, message, entry=None):
        super().__init__(message)
        self.entry = entry


def _rf_list(vals, field=None):
    return tuple(coerce(v, field) for v in vals)


@dataclass(frozen=True)
class QForm:
    diag: tuple
    pfister_params: Optional[tuple] = None

    def __post_init__(self):
        object.__setattr__(self, "diag", _rf_list(self.diag))
        if not self.diag:
            raise FormError("a form needs at least one diagonal entry")
        if any(d.is_zero() for d in self.diag):
            raise FormError("diagonal entries must be nonzero")
        if self.pfister_params is not None:
            params = _rf_list(self.pfister_params)
            object.__setattr__(self, "pfister_params", params)
            if _pfister_diag(params) != self.diag:
                raise FormError("diagonal does not match the recorded Pfister parameters")

    @property
    def dim(self) -> int:
        return len(self.diag)

    @property
    def field(self) -> int:
        return self.diag[0].field

    def gram(self) -> Matrix:
        return Matrix.diag(self.diag)

    def __call__(self, v):
        return qform_eval(self, v)

    def to_json(self):
        return form_to_json(self.diag, self.pfister_params)

    @classmethod
    def from_json(cls, obj, field=None):
        params = obj.get("pfister_params")
        return cls(
            tuple(parse(s, field) for s in obj["diag"]),
            None if params is None else tuple(parse(s, field) for s in params),
        )

    def __str__(self):
        return "<" + ", ".join(print_canonical(d) for d in self.diag) + ">"


def _pfister_diag(params):
    field = params[0].field if params else 0
    diag = [RatFunc.one(field)]
    # each new parameter doubles the list and becomes the most significant bit
    for a in params:
        diag = diag + [-a * d for d in diag]
    return tuple(diag)


def pfister(params: Sequence) -> QForm:
    """<<a1,..,an>>: entry i is the product of -a_{j+1} over the set bits j of i."""
    params = _rf_list(params)
    if not params:
        raise FormError("pfister() needs at least one parameter")
    if any(a.is_zero() for a in params):
        raise FormError("Pfister parameters must be nonzero")
    return QForm(_pfister_diag(params), params)


def subform_psi(params: Sequence) -> QForm:
    """<<a1..a_{n-1}>> followed by the single slot -a_n (dimension 2^(n-1) + 1)."""
    params = _rf_list(params)
    if not params:
        raise FormError("subform_psi() needs at least one parameter")
    if any(a.is_zero() for a in params):
        raise FormError("parameters must be nonzero")
    return QForm(_pfister_diag(params[:-1]) + (-params[-1],))


def _check_len(q, v):
    if len(v) != q.dim:
        raise FormError(f"vector of length {len(v)} for a form of dimension {q.dim}")


def qform_eval(q: QForm, v) -> RatFunc:
    v = _rf_list(v, q.field)
    _check_len(q, v)
    acc = RatFunc.zero(q.field)
    for d, x in zip(q.diag, v):
        if x:
            acc = acc + d * x * x
    return acc


def bilinear(q: QForm, u, v) -> RatFunc:
    u, v = _rf_list(u, q.field), _rf_list(v, q.field)
    _check_len(q, u)
    _check_len(q, v)
    acc = RatFunc.zero(q.field)
    for d, a, b in zip(q.diag, u, v):
        if a and b:
            acc = acc + d * a * b
    return acc


def polarization(q: QForm, u, v) -> RatFunc:
    """(q(u+v) - q(u) - q(v)) / 2."""
    u, v = _rf_list(u, q.field), _rf_list(v, q.field)
    w = [a + b for a, b in zip(u, v)]
    return (qform_eval(q, w) - qform_eval(q, u) - qform_eval(q, v)) / 2


def perp(q1: QForm, q2: QForm) -> QForm:
    diag = q1.diag + q2.diag
    # keep the Pfister label when the sum happens to be one
    params = None
    if q1.pfister_params is not None and q2.dim == q1.dim:
        q1_params = q1.pfister_params
        # <<P>> _|_ -a<<P>> = <<P, a>>
        a = -q2.diag[0]
        if a and tuple(-a * d for d in q1.diag) == q2.diag:
            params = q1_params + (a,)
    return QForm(diag, params)


def scale(c, q: QForm) -> QForm:
    c = coerce(c, q.field)
    if c.is_zero():
        raise FormError("cannot scale a form by zero")
    if c == 1:
        return q
    return QForm(tuple(c * d for d in q.diag))


@dataclass(frozen=True)
class CongruenceWitness:
    C: Matrix
    source: QForm
    target: QForm

    def inverse(self) -> "CongruenceWitness":
        return verify_congruence(mat_inverse(self.C), self.target, self.source)


def congruence_image(C: Matrix, A: Matrix) -> Matrix:
    return matmul(matmul(C, A), C.transpose())


def verify_congruence(C: Matrix, src: QForm, dst: QForm) -> CongruenceWitness:
    """Check C * A_src * C^t == A_dst exactly."""
    if C.rows != C.cols or C.rows != src.dim or dst.dim != src.dim:
        raise CongruenceError(f"dimension mismatch: C is {C.rows}x{C.cols}, forms have {src.dim} and {dst.dim}")
    image = congruence_image(C, src.gram())
    diff = first_difference(image, dst.gram())
    if diff is not None:
        i, j, got, want = diff
        raise CongruenceError(
            f"C*A*C^t differs from the target at ({i},{j}): {print_canonical(got)} != {print_canonical(want)}",
            entry=diff,
        )
    return CongruenceWitness(C, src, dst)


def permutation_matrix(perm, signs=None, field=0) -> Matrix:
    """Row i has a (signed) 1 in column perm[i]."""
    n = len(perm)
    if sorted(perm) != list(range(n)):
        raise FormError("not a permutation")
    signs = signs or [1] * n
    zero = RatFunc.zero(field)
    rows = [[RatFunc.const(signs[i], field) if j == perm[i] else zero for j in range(n)] for i in range(n)]
    return Matrix.from_rows(rows)
