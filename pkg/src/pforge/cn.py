"""Recursive Pfister similarity matrices and their verification.

Level-n record over parameters a1..an and coordinates x1..x_{2^n}:

    C_1 = [[x1, x2], [-a1*x2, -x1]]
    C_n = [[C, C'], [-b*C', -C'*C*C'/t]]

where C is the level-(n-1) matrix on the lower half of the coordinates, C' the
same matrix with coordinates shifted to the upper half, s and t the level-(n-1)
form on each half and b = a_n.  Then C_n * A * C_n^t = c*A and C_n^2 = c*I with
c = s - b*t the level-n form, A its Gram matrix.
"""

import os
from dataclasses import dataclass, field
from typing import Optional

from .algebra import (
    Matrix,
    RatFunc,
    Substitution,
    char_poly,
    det_fraction_free,
    first_difference,
    mat_inverse,
    matmul,
    register,
    substitute,
)
from .exprio import coerce, matrix_to_json, print_canonical
from .qforms import QForm, pfister, qform_eval

DEFAULT_CAP = 3
LONG_CAP = 4


class VerificationError(AssertionError):
    """An identity that should hold exactly does not."""

    def __init__(self, check: str, detail: str = "", entry=None):
        super().__init__(f"{check}: {detail}" if detail else check)
        self.check = check
        self.detail = detail
        self.entry = entry


class CapExceeded(ValueError):
    pass


def level_cap(long: bool = False) -> int:
    env = os.environ.get("PFORGE_CAP_N")
    if env:
        return int(env)
    return LONG_CAP if long else DEFAULT_CAP


def x_names(n: int, prefix: str = "x"):
    return [f"{prefix}{i}" for i in range(1, 2 ** n + 1)]


def param_names(n: int, prefix: str = "a"):
    return [f"{prefix}{i}" for i in range(1, n + 1)]


def _diff_text(diff):
    i, j, got, want = diff
    return f"entry ({i},{j}): got {print_canonical(got)}, expected {print_canonical(want)}"


def expect_equal(check: str, got: Matrix, want: Matrix):
    diff = first_difference(got, want)
    if diff is not None:
        raise VerificationError(check, _diff_text(diff), diff)


def _var_vector(names, field=0):
    return [RatFunc.var(v, field) for v in names]


@dataclass(frozen=True)
class CnRecord:
    n: int
    params: tuple
    xs: tuple
    Cn: Matrix
    c: RatFunc
    form: QForm
    s: Optional[RatFunc] = None
    t: Optional[RatFunc] = None
    C: Optional[Matrix] = None
    Cprime: Optional[Matrix] = None
    D: Optional[Matrix] = None
    checks: tuple = field(default=())

    @property
    def A(self) -> Matrix:
        return self.form.gram()

    def to_json(self):
        out = {
            "n": self.n,
            "params": [print_canonical(a) for a in self.params],
            "variables": list(self.xs),
            "C_n": matrix_to_json(self.Cn),
            "c": print_canonical(self.c),
            "checks": list(self.checks),
        }
        if self.n > 1:
            out["s"] = print_canonical(self.s)
            out["t"] = print_canonical(self.t)
        return out


def _shift(names_from, names_to):
    return Substitution({a: RatFunc.var(b) for a, b in zip(names_from, names_to)})


def _raw_cn(params, xs):
    """(C_n, c) without verification; params and xs are name lists."""
    n = len(params)
    if n == 1:
        x1, x2 = _var_vector(xs)
        a = RatFunc.var(params[0])
        return Matrix.from_rows([[x1, x2], [-a * x2, -x1]]), x1 * x1 - a * x2 * x2
    h = len(xs) // 2
    C, s = _raw_cn(params[:-1], xs[:h])
    ren = _shift(xs[:h], xs[h:])
    Cp, t = C.subs(ren), substitute(s, ren)
    b = RatFunc.var(params[-1])
    corner = matmul(matmul(Cp, C), Cp).map(lambda e: -(e / t))
    Cn = Matrix.block([[C, Cp], [Cp.scalar_mul(-b), corner]])
    return Cn, s - b * t


def check_cn_properties(Cn: Matrix, c: RatFunc, form: QForm, xs) -> list:
    """The defining identities; returns the list of passed check names."""
    A = form.gram()
    N = Cn.rows
    expect_equal("C_n*A*C_n^t = c*A", matmul(matmul(Cn, A), Cn.T), A.scalar_mul(c))
    expect_equal("C_n^2 = c*I", matmul(Cn, Cn), Matrix.identity(N).scalar_mul(c))
    x = Matrix(1, N, _var_vector(xs))
    expect_equal("first row = x", Matrix(1, N, Cn.row(0)), x)
    expect_equal("first column = A*x", Matrix(N, 1, Cn.col(0)), matmul(A, x.T))
    if qform_eval(form, _var_vector(xs)) != c:
        raise VerificationError("c = form(x)", print_canonical(c))
    return ["C_n*A*C_n^t = c*A", "C_n^2 = c*I", "first row = x", "first column = A*x", "c = form(x)"]


def build_cn(n: int, params=None, xs=None, *, cap: Optional[int] = None, verify: bool = True) -> CnRecord:
    """Level-n record; all identities are checked unless verify=False."""
    if n < 1:
        raise ValueError("level must be at least 1")
    cap = level_cap() if cap is None else cap
    if n > cap:
        raise CapExceeded(f"level {n} exceeds the cap {cap} (use --long or PFORGE_CAP_N)")
    xs = list(xs or x_names(n))
    params = list(params or param_names(n))
    if len(params) != n or len(xs) != 2 ** n:
        raise ValueError("need n parameters and 2^n coordinates")
    register(*params, *xs)
    Cn, c = _raw_cn(params, xs)
    form = pfister([RatFunc.var(a) for a in params])
    checks = check_cn_properties(Cn, c, form, xs) if verify else []
    extra = {}
    if n > 1:
        h = 2 ** (n - 1)
        C, s = _raw_cn(params[:-1], xs[:h])
        ren = _shift(xs[:h], xs[h:])
        Cp, t = C.subs(ren), substitute(s, ren)
        D = matmul(Cp, C).map(lambda e: e / (t * s))
        extra = dict(s=s, t=t, C=C, Cprime=Cp, D=D)
    return CnRecord(n, tuple(RatFunc.var(a) for a in params), tuple(xs), Cn, c, form, checks=tuple(checks), **extra)


# -- block-form verification ------------------------------------------------
#
# Above level 3 the entries of C_n are too large to expand.  The level-n
# identities are then checked on 2x2 block matrices whose entries are
# noncommutative words in C, P = C', their transposes T, Q and the Gram
# matrix A, with coefficients in k(a, x).  Words are reduced with relations
# that are first verified exactly on the level-(n-1) matrices:
#     C*C = s,  P*P = t,  T*T = s,  Q*Q = t,  A*T = C*A,  A*Q = P*A.
# Every rewrite is an equality, so equal normal forms prove the identity.

_RULES = (
    (("C", "C"), "s", ()),
    (("P", "P"), "t", ()),
    (("T", "T"), "s", ()),
    (("Q", "Q"), "t", ()),
    (("A", "T"), None, ("C", "A")),
    (("A", "Q"), None, ("P", "A")),
)


def _reduce_word(word, scalars):
    coeff = RatFunc.one()
    changed = True
    while changed:
        changed = False
        for i in range(len(word) - 1):
            for pair, scal, repl in _RULES:
                if word[i:i + 2] == pair:
                    if scal:
                        coeff = coeff * scalars[scal]
                    word = word[:i] + repl + word[i + 2:]
                    changed = True
                    break
            if changed:
                break
    return coeff, word


class WordPoly:
    """Finite sum of coeff * word; words are tuples of block symbols."""

    def __init__(self, terms=None):
        self.terms = {w: c for w, c in (terms or {}).items() if not c.is_zero()}

    @classmethod
    def word(cls, *symbols, coeff=None):
        return cls({tuple(symbols): coeff if coeff is not None else RatFunc.one()})

    def __add__(self, other):
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out[w] + c if w in out else c
        return WordPoly(out)

    def __mul__(self, other):
        out = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = w1 + w2
                out[w] = out[w] + c1 * c2 if w in out else c1 * c2
        return WordPoly(out)

    def scale(self, c):
        return WordPoly({w: v * c for w, v in self.terms.items()})

    def reduced(self, scalars):
        out = WordPoly()
        for w, c in self.terms.items():
            k, nw = _reduce_word(w, scalars)
            out = out + WordPoly({nw: c * k})
        return out

    def __eq__(self, other):
        return self.terms == other.terms

    def __str__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"({print_canonical(c)})*{''.join(w) or '1'}" for w, c in sorted(self.terms.items()))


def _wmul(X, Y):
    return [[X[i][0] * Y[0][j] + X[i][1] * Y[1][j] for j in range(2)] for i in range(2)]


def _wtranspose_word(word):
    flip = {"C": "T", "T": "C", "P": "Q", "Q": "P", "A": "A"}
    return tuple(flip[x] for x in reversed(word))


def _wtranspose(X):
    def tr(wp):
        return WordPoly({_wtranspose_word(w): c for w, c in wp.terms.items()})

    return [[tr(X[j][i]) for j in range(2)] for i in range(2)]


@dataclass
class BlockReport:
    n: int
    relations: list
    identities: list
    passed: bool

    def to_json(self):
        return {"n": self.n, "relations": list(self.relations), "identities": list(self.identities),
                "passed": self.passed}


def verify_cn_blockwise(n: int, params=None, xs=None) -> BlockReport:
    """Check the level-n identities in 2x2 block form over level n-1.

    Only level-(n-1) matrices are expanded; see the comment above.
    """
    if n < 2:
        raise ValueError("block form needs n >= 2")
    xs = list(xs or x_names(n))
    params = list(params or param_names(n))
    register(*params, *xs)
    h = 2 ** (n - 1)
    C, s = _raw_cn(params[:-1], xs[:h])
    ren = _shift(xs[:h], xs[h:])
    P, t = C.subs(ren), substitute(s, ren)
    b = RatFunc.var(params[-1])
    A = pfister([RatFunc.var(a) for a in params[:-1]]).gram()
    I = Matrix.identity(h)
    relations = []
    for name, got, want in (
        ("C*C = s*I", matmul(C, C), I.scalar_mul(s)),
        ("P*P = t*I", matmul(P, P), I.scalar_mul(t)),
        ("A*C^t = C*A", matmul(A, C.T), matmul(C, A)),
        ("A*P^t = P*A", matmul(A, P.T), matmul(P, A)),
    ):
        expect_equal(name, got, want)
        relations.append(name)
    # T*T = s and Q*Q = t are the transposes of the first two
    relations += ["C^t*C^t = s*I", "P^t*P^t = t*I"]

    scalars = {"s": s, "t": t}
    W = WordPoly.word
    zero = WordPoly()
    Cn = [[W("C"), W("P")], [W("P", coeff=-b), W("P", "C", "P", coeff=-1 / t)]]
    An = [[W("A"), zero], [zero, W("A", coeff=-b)]]
    c = s - b * t
    identities = []

    def check(name, got, want):
        for i in range(2):
            for j in range(2):
                g, w = got[i][j].reduced(scalars), want[i][j].reduced(scalars)
                if g != w:
                    raise VerificationError(name, f"block ({i},{j}): {g} != {w}")
        identities.append(name)

    check("C_n*A*C_n^t = c*A", _wmul(_wmul(Cn, An), _wtranspose(Cn)),
          [[An[i][j].scale(c) for j in range(2)] for i in range(2)])
    check("C_n^2 = c*I", _wmul(Cn, Cn), [[W(coeff=c), zero], [zero, W(coeff=c)]])

    full = pfister([RatFunc.var(a) for a in params])
    x = _var_vector(xs)
    first_row = list(C.row(0)) + list(P.row(0))
    if first_row != x:
        raise VerificationError("first row = x")
    identities.append("first row = x")
    first_col = list(C.col(0)) + [-b * e for e in P.col(0)]
    if first_col != [d * v for d, v in zip(full.diag, x)]:
        raise VerificationError("first column = A*x")
    identities.append("first column = A*x")
    if qform_eval(full, x) != c:
        raise VerificationError("c = form(x)")
    identities.append("c = form(x)")
    return BlockReport(n, relations, identities, True)


# -- proof-step replay ----------------------------------------------------

def _blockdiag(P, Q):
    Z1 = Matrix.zeros(P.rows, Q.cols)
    Z2 = Matrix.zeros(Q.rows, P.cols)
    return Matrix.block([[P, Z1], [Z2, Q]])


def _cong(P, A):
    return matmul(matmul(P, A), P.T)


@dataclass
class StepReport:
    name: str
    passed: bool
    detail: str = ""

    def to_json(self):
        return {"step": self.name, "passed": self.passed, "detail": self.detail}


def _run(name, fn, reports):
    try:
        fn()
        reports.append(StepReport(name, True))
        return True
    except VerificationError as exc:
        reports.append(StepReport(name, False, str(exc)))
        return False


def verify_cn_steps(n: int, *, cap: Optional[int] = None, rec: Optional[CnRecord] = None,
                    inverse_oracle: Optional[bool] = None):
    """Replay the block congruences leading from diag(A, -bA) to c*A_n.

    Returns a list of StepReport; every step is computed independently.
    `inverse_oracle` additionally compares D with a Gauss-Jordan inverse
    (default: only for n = 2, where it is cheap).
    """
    if inverse_oracle is None:
        inverse_oracle = n <= 2
    if n < 2:
        raise ValueError("proof steps exist for n >= 2")
    rec = rec or build_cn(n, cap=cap, verify=False)
    h = 2 ** (n - 1)
    C, Cp, s, t, D = rec.C, rec.Cprime, rec.s, rec.t, rec.D
    b = rec.params[-1]
    A = pfister(rec.params[:-1]).gram()
    I = Matrix.identity(h)

    def dg(x, y):
        return _blockdiag(A.scalar_mul(x), A.scalar_mul(y))

    c = s - b * t
    Pi = _blockdiag(C, Cp)
    Pj = Matrix.block([[I, I], [I.scalar_mul(b * t), I.scalar_mul(s)]])
    Pk = _blockdiag(I, D)
    Pflip = _blockdiag(I, -I)
    reports = []

    _run("i: diag(C,C') takes diag(A,-bA) to diag(sA,-btA)",
         lambda: expect_equal("step i", _cong(Pi, dg(1, -b)), dg(s, -b * t)), reports)
    _run("j: [[I,I],[btI,sI]] takes diag(sA,-btA) to diag(cA,-cbstA)",
         lambda: expect_equal("step j", _cong(Pj, dg(s, -b * t)), dg(c, -c * b * s * t)), reports)

    def step_k():
        CCp = matmul(C, Cp)
        expect_equal("D*(C*C') = I", matmul(D, CCp), I)
        expect_equal("(C*C')*D = I", matmul(CCp, D), I)
        if inverse_oracle:
            expect_equal("D = (C*C')^-1", D, mat_inverse(CCp))
        expect_equal("step k", _cong(Pk, dg(c, -c * b * s * t)), dg(c, -c * b))

    _run("k: diag(I,D) takes diag(cA,-cbstA) to diag(cA,-cbA)", step_k, reports)
    _run("sign: diag(I,-I) fixes diag(cA,-cbA)",
         lambda: expect_equal("sign flip", _cong(Pflip, dg(c, -c * b)), dg(c, -c * b)), reports)

    def composite():
        expect_equal("product of the four carriers = C_n", matmul(Pflip, matmul(Pk, matmul(Pj, Pi))), rec.Cn)

    _run("composite: diag(I,-I)*diag(I,D)*[[I,I],[btI,sI]]*diag(C,C') = C_n", composite, reports)
    return reports


def expansion_lines(n: int, *, cap: Optional[int] = None, rec: Optional[CnRecord] = None):
    """Direct block expansion of C_n*A_n*C_n^t, one matrix per displayed line.

    Returns [(label, Matrix)], consecutive entries must agree.
    """
    rec = rec or build_cn(n, cap=cap, verify=False)
    C, Cp, s, t = rec.C, rec.Cprime, rec.s, rec.t
    b = rec.params[-1]
    A = pfister(rec.params[:-1]).gram()
    h = C.rows
    T = C.T
    Tp = Cp.T
    An = rec.A
    Cn = rec.Cn

    def mm(*ms):
        out = ms[0]
        for m in ms[1:]:
            out = matmul(out, m)
        return out

    def sc(x, M):
        return M.scalar_mul(x)

    zero = Matrix.zeros(h, h)
    CnT_blocks = Matrix.block([[T, sc(-b, Tp)], [Tp, sc(-1 / t, mm(Tp, T, Tp))]])
    left = Matrix.block([[mm(C, A), sc(-b, mm(Cp, A))], [sc(-b, mm(Cp, A)), sc(b / t, mm(Cp, C, Cp, A))]])
    CAT = mm(C, A, T)
    lines = [
        ("C_n A_n C_n^t", mm(Cn, An, Cn.T)),
        ("C_n A_n [[C^t, -bC'^t], [C'^t, -C'^tC^tC'^t/t]]", mm(Cn, An, CnT_blocks)),
        ("[[CA, -bC'A], [-bC'A, (b/t)C'CC'A]] C_n^t", mm(left, CnT_blocks)),
        ("four block sums", Matrix.block([
            [CAT - sc(b, mm(Cp, A, Tp)), sc(-b, mm(C, A, Tp)) + sc(b / t, mm(Cp, A, Tp, T, Tp))],
            [sc(-b, mm(Cp, A, T)) + sc(b / t, mm(Cp, C, Cp, A, Tp)),
             sc(b * b, mm(Cp, A, Tp)) - sc(b / (t * t), mm(Cp, C, Cp, A, Tp, T, Tp))],
        ])),
        ("[[sA - btA, -bCAC'^t + bAC^tC'^t], [-bC'AC^t + bC'CA, b^2tA - bsA]]", Matrix.block([
            [sc(s, A) - sc(b * t, A), sc(-b, mm(C, A, Tp)) + sc(b, mm(A, T, Tp))],
            [sc(-b, mm(Cp, A, T)) + sc(b, mm(Cp, C, A)), sc(b * b * t, A) - sc(b * s, A)],
        ])),
        ("[[cA, -bCAC'^t + (b/s)CAC^tC^tC'^t], [-bC'AC^t + (b/s)C'CCAC^t, -bcA]]", Matrix.block([
            [sc(s - b * t, A), sc(-b, mm(C, A, Tp)) + sc(b / s, mm(CAT, T, Tp))],
            [sc(-b, mm(Cp, A, T)) + sc(b / s, mm(Cp, C, CAT)), sc(-b * (s - b * t), A)],
        ])),
        ("[[cA, -bCAC'^t + bCAC'^t], [-bC'AC^t + bC'AC^t, -bcA]]", Matrix.block([
            [sc(s - b * t, A), sc(-b, mm(C, A, Tp)) + sc(b, mm(C, A, Tp))],
            [sc(-b, mm(Cp, A, T)) + sc(b, mm(Cp, A, T)), sc(-b * (s - b * t), A)],
        ])),
        ("diag(cA, -bcA)", Matrix.block([[sc(s - b * t, A), zero], [zero, sc(-b * (s - b * t), A)]])),
        ("c A_n", sc(rec.c, An)),
    ]
    return lines


def verify_expansion(n: int, *, cap: Optional[int] = None, rec: Optional[CnRecord] = None):
    """Check that consecutive expansion lines agree; returns StepReports."""
    rec = rec or build_cn(n, cap=cap, verify=False)
    lines = expansion_lines(n, rec=rec)
    reports = []
    # the factor rewrite used between lines
    C = rec.C
    A = pfister(rec.params[:-1]).gram()
    _run("A C^t = C A", lambda: expect_equal("A C^t = C A", matmul(A, C.T), matmul(C, A)), reports)
    for (la, Ma), (lb, Mb) in zip(lines, lines[1:]):
        _run(f"{la}  ==  {lb}", lambda Ma=Ma, Mb=Mb: expect_equal("expansion line", Ma, Mb), reports)
    return reports


# -- the submatrix M --------------------------------------------------------

@dataclass(frozen=True)
class MRecord:
    n: int
    M: Matrix
    phi1: RatFunc
    det: RatFunc
    det_sign: int
    checks: tuple

    def to_json(self):
        return {
            "n": self.n,
            "M": matrix_to_json(self.M),
            "phi1": print_canonical(self.phi1),
            "det": print_canonical(self.det),
            "det_sign": self.det_sign,
            "det_exponent": 2 ** (self.n - 1) - 1,
            "checks": list(self.checks),
        }


def build_m(n: int, params=None, *, cap: Optional[int] = None, rec: Optional[CnRecord] = None) -> MRecord:
    """C_n at x1 = 1 without its first row and column, with its identities checked."""
    rec = rec or build_cn(n, params, cap=cap, verify=False)
    x1 = rec.xs[0]
    one = Substitution({x1: RatFunc.one()})
    N = 2 ** n
    M = rec.Cn.subs(one).submatrix(range(1, N), range(1, N))
    phi1 = substitute(rec.c, one)
    diag = rec.form.diag
    xs = _var_vector(rec.xs[1:])
    R = Matrix(N - 1, N - 1, [diag[i + 1] * xs[i] * xs[j] for i in range(N - 1) for j in range(N - 1)])
    checks = []
    expect_equal("M^2 = phi1*I - R", matmul(M, M), Matrix.identity(N - 1).scalar_mul(phi1) - R)
    checks.append("M^2 = phi1*I - R")
    det = det_fraction_free(M)
    e = 2 ** (n - 1) - 1
    target = phi1 ** e
    if det == target:
        sign = 1
    elif det == -target:
        sign = -1
    else:
        raise VerificationError("det(M) = +-phi1^(2^(n-1)-1)", print_canonical(det))
    checks.append(f"det(M) = {'' if sign > 0 else '-'}phi1^{e}")
    if det * det != phi1 ** (2 ** n - 2):
        raise VerificationError("det(M^2) = phi1^(2^n-2)")
    checks.append(f"det(M^2) = phi1^{2 ** n - 2}")
    return MRecord(n, M, phi1, det, sign, tuple(checks))


# -- rank-one characteristic polynomial --------------------------------------

def rank1_charpoly(a, b, var: str = "x") -> RatFunc:
    """char_poly of (a_i*b_j), asserted equal to x^(n-1)*(x - sum a_i*b_i)."""
    if len(a) != len(b) or not a:
        raise ValueError("a and b must have the same positive length")
    a = [coerce(v) for v in a]
    b = [coerce(v) for v in b]
    n = len(a)
    R = Matrix(n, n, [a[i] * b[j] for i in range(n) for j in range(n)])
    cp = char_poly(R, var)
    x = RatFunc.var(var)
    tr = RatFunc.zero()
    for u, v in zip(a, b):
        tr = tr + u * v
    expected = x ** (n - 1) * (x - tr)
    if cp != expected:
        raise VerificationError("rank-1 characteristic polynomial", f"{print_canonical(cp)} != {print_canonical(expected)}")
    return cp


def format_rank1(n: int, var: str = "x") -> str:
    """Factored display x^(n-1)*(x - a1*b1 - ...)."""
    tail = " - ".join(f"a{i}*b{i}" for i in range(1, n + 1))
    inner = f"({var} - {tail})"
    if n == 1:
        return f"{var} - {tail}"
    pre = var if n == 2 else f"{var}^{n - 1}"
    return f"{pre}*{inner}"


def verify_multiplicativity(n: int, *, cap: Optional[int] = None, rec: Optional[CnRecord] = None, y_prefix="y"):
    """phi(x) * phi(y) == phi(y * C_n(x)) with y a row vector."""
    rec = rec or build_cn(n, cap=cap, verify=False)
    ys = x_names(n, y_prefix)
    register(*ys)
    y = Matrix(1, 2 ** n, _var_vector(ys))
    img = matmul(y, rec.Cn)
    lhs = rec.c * qform_eval(rec.form, y.row(0))
    rhs = qform_eval(rec.form, img.row(0))
    if lhs != rhs:
        raise VerificationError("phi(x)*phi(y) = phi(y*C_n)")
    return True
