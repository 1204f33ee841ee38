"""Birational maps between quadric hypersurfaces as certified substitution chains.

A step (F, G, s) certifies substitute(G, s) = u * F with u a nonzero rational
function defined along F = 0: s expresses the target coordinates in terms of
the source ones, so it pulls the target equation back onto the source.
"""

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .algebra import Matrix, Poly, RatFunc, Substitution, matmul, register, substitute, var_name
from .algebra.gcd import is_coprime
from .cn import VerificationError, _raw_cn, build_cn, build_m, x_names
from .exprio import coerce, matrix_to_json, print_canonical, substitution_to_json
from .qforms import (
    CongruenceError,
    QForm,
    bilinear,
    permutation_matrix,
    pfister,
    polarization,
    qform_eval,
    subform_psi,
    verify_congruence,
)


class ChainError(VerificationError):
    pass


@dataclass(frozen=True)
class Hypersurface:
    equation: Poly
    label: str = ""

    def __post_init__(self):
        eq = self.equation
        if isinstance(eq, RatFunc):
            if not eq.is_poly():
                raise ValueError("hypersurface equation must be a polynomial")
            eq = eq.num
        if eq.is_zero():
            raise ValueError("hypersurface equation must be nonzero")
        object.__setattr__(self, "equation", eq)

    @property
    def rf(self) -> RatFunc:
        return RatFunc.from_poly(self.equation)

    def to_json(self):
        return {"label": self.label, "equation": print_canonical(self.rf)}


def _as_hyper(h, label=""):
    if isinstance(h, Hypersurface):
        return h
    return Hypersurface(coerce(h), label)


@dataclass(frozen=True)
class ChainStep:
    subst: Substitution
    multiplier: RatFunc
    source: Hypersurface
    target: Hypersurface
    note: str = ""

    def reverify(self) -> bool:
        verify_step(self.source, self.target, self.subst, note=self.note)
        return True

    def to_json(self):
        return {
            "note": self.note,
            "from": print_canonical(self.source.rf),
            "to": print_canonical(self.target.rf),
            "subst": substitution_to_json(self.subst),
            "multiplier": print_canonical(self.multiplier),
        }


def verify_step(F, G, s: Substitution, note: str = "") -> ChainStep:
    """Certify that s pulls G back to a unit multiple of F.

    Requirements: F divides the numerator of G∘s, F shares no factor with its
    denominator or with the denominators of the images of s, and the
    quotient is nonzero.
    """
    F, G = _as_hyper(F), _as_hyper(G)
    if not isinstance(s, Substitution):
        s = Substitution(s)
    f = F.equation
    for name, img in s.items_named():
        if not is_coprime(img.den, f):
            raise ChainError("substitution undefined along the source", f"image of {name} has a pole on F = 0")
    pulled = substitute(G.rf, s)
    if pulled.is_zero():
        raise ChainError("pullback vanishes identically", note)
    q = pulled.num.divexact(f)
    if q is None:
        raise ChainError("pullback is not a multiple of the source equation", note or print_canonical(pulled))
    u = RatFunc(q, pulled.den)
    if u.is_zero() or not is_coprime(u.den, f):
        raise ChainError("multiplier is not a unit along the source", note)
    return ChainStep(s, u, F, G, note)


@dataclass(frozen=True)
class SubstChain:
    steps: tuple
    composed: Substitution
    multiplier: RatFunc

    @property
    def source(self) -> Hypersurface:
        return self.steps[0].source

    @property
    def target(self) -> Hypersurface:
        return self.steps[-1].target

    def reverify(self) -> bool:
        """Re-check every step from its stored parts and the composite certificate."""
        for a, b in zip(self.steps, self.steps[1:]):
            if a.target.equation != b.source.equation:
                raise ChainError("consecutive steps do not share an endpoint")
        for st in self.steps:
            st.reverify()
        S, U = compose_steps(self.steps)
        if {k: v for k, v in S.images.items()} != dict(self.composed.images) or U != self.multiplier:
            raise ChainError("stored composite differs from the step-by-step composition")
        step = verify_step(self.source, self.target, self.composed, note="composite")
        if step.multiplier != self.multiplier:
            raise ChainError("composite multiplier mismatch")
        return True

    def to_json(self):
        return {
            "from": print_canonical(self.source.rf),
            "to": print_canonical(self.target.rf),
            "steps": [s.to_json() for s in self.steps],
            "composed": substitution_to_json(self.composed),
            "multiplier": print_canonical(self.multiplier),
        }


def compose_steps(steps):
    """(S, U) with substitute(target, S) = U * source."""
    S = steps[0].subst
    U = steps[0].multiplier
    for st in steps[1:]:
        U = substitute(st.multiplier, S) * U
        S = st.subst.then(S)
    return S, U


def make_chain(steps) -> SubstChain:
    steps = tuple(steps)
    if not steps:
        raise ValueError("empty chain")
    for a, b in zip(steps, steps[1:]):
        if a.target.equation != b.source.equation:
            raise ChainError("consecutive steps do not share an endpoint",
                             f"{print_canonical(a.target.rf)} vs {print_canonical(b.source.rf)}")
    S, U = compose_steps(steps)
    chain = SubstChain(steps, S, U)
    # the composite is itself a certificate
    verify_step(chain.source, chain.target, S, note="composite")
    return chain


def concat_chains(first: SubstChain, second: SubstChain) -> SubstChain:
    return make_chain(first.steps + second.steps)


# -- interchange and scalar chains -------------------------------------------

def _vec(names):
    return [RatFunc.var(v) for v in names]


def _check_fresh(coords, *exprs):
    used = set()
    for e in exprs:
        used |= e.variable_names()
    clash = used & set(coords)
    if clash:
        raise ValueError(f"coordinate names clash with parameters: {sorted(clash)}")


def _row_times(vec, M: Matrix):
    return list(matmul(Matrix(1, len(vec), vec), M).row(0))


def _cn_at(params, point, tag):
    """C_n(point) for the Pfister form on `params` (point: list of RatFunc).

    When the second half of the point vanishes the recursive formula has a
    pole; blockdiag(C, C) of the half-size matrix is used there instead,
    which satisfies the same similitude identity.
    """
    n = len(params)
    h = len(point) // 2
    if n > 1 and all(e.is_zero() for e in point[h:]):
        C = _cn_at(params[:-1], point[:h], tag)
        zero = Matrix.zeros(h, h, C.field)
        return Matrix.block([[C, zero], [zero, C]])
    names = x_names(n, f"{tag}_")
    register(*names)
    pnames = [f"{tag}_a{i}" for i in range(1, n + 1)]
    register(*pnames)
    Cn, _ = _raw_cn(pnames, names)
    s = Substitution({**{nm: v for nm, v in zip(names, point)}, **{p: a for p, a in zip(pnames, params)}})
    return Cn.subs(s)


def build_interchange_chain(params, b, c, coords=("x", "y", "z"), tag: str = "p") -> SubstChain:
    """phi + -b*phi + <-c>  ~>  phi + -c*phi + <-b>, phi = <<params>>.

    Source coordinates x1..xN, y1..yN, z (names from `coords`); the new
    coordinates get the suffix `tag`, doubled for the second change of x.
    """
    params = [coerce(a) for a in params]
    b, c = coerce(b), coerce(c)
    phi = pfister(params)
    xn, yn, zn = coords
    X = x_names(len(params), xn)
    Y = x_names(len(params), yn)
    Xp = x_names(len(params), xn + tag)
    Xpp = x_names(len(params), xn + tag + tag)
    Yp = x_names(len(params), yn + tag)
    Zp = zn + tag
    register(*X, *Y, zn, *Xp, *Yp, *Xpp, Zp)
    _check_fresh(X + Y + [zn] + Xp + Yp + Xpp + [Zp], b, c, *params)
    x, y, z = _vec(X), _vec(Y), RatFunc.var(zn)
    xp, yp, xpp, zp = _vec(Xp), _vec(Yp), _vec(Xpp), RatFunc.var(Zp)
    py = qform_eval(phi, y)

    H0 = qform_eval(phi, x) - b * py - c * z * z
    H1 = py * qform_eval(phi, xp) - b * py - c * z * z
    H2 = qform_eval(phi, xp) - b - c * z * z * qform_eval(phi, yp)
    H3 = qform_eval(phi, xpp) * z * z - b - c * z * z * qform_eval(phi, yp)
    H4 = qform_eval(phi, xpp) - c * qform_eval(phi, yp) - b * zp * zp

    Cy = _cn_at(params, y, f"{xn}{tag}C")
    img = [e / py for e in _row_times(x, Cy)]
    steps = [
        verify_step(H0, H1, Substitution(dict(zip(Xp, img))), "x' = x*C_n(y)/phi(y)"),
        verify_step(H1, H2, Substitution({v: e / py for v, e in zip(Yp, y)}), "y' = y/phi(y)"),
        verify_step(H2, H3, Substitution({v: e / z for v, e in zip(Xpp, xp)}), "x'' = x'/z"),
        verify_step(H3, H4, Substitution({Zp: 1 / z}), "z' = 1/z"),
    ]
    return make_chain(steps)


def interchange_coords(coords=("x", "y", "z"), tag="p"):
    """Coordinate prefixes of the target of build_interchange_chain."""
    xn, yn, zn = coords
    return (xn + tag + tag, yn + tag, zn + tag)


def build_scalar_chain(params, b, x0=None, coords=("x", "y"), tag: str = "p") -> SubstChain:
    """phi + <-b*phi(x0)>  ~>  phi + <-b>.

    x0 defaults to fresh variables x0_1..x0_N; any vector of expressions with
    phi(x0) != 0 is accepted.
    """
    params = [coerce(a) for a in params]
    b = coerce(b)
    phi = pfister(params)
    N = phi.dim
    if x0 is None:
        x0 = [f"x0_{i}" for i in range(1, N + 1)]
        register(*x0)
    x0 = [RatFunc.var(v) if isinstance(v, str) and v.isidentifier() else coerce(v) for v in x0]
    if len(x0) != N:
        raise ValueError(f"x0 must have {N} entries")
    xn, yn = coords
    X = x_names(len(params), xn)
    Xp = x_names(len(params), xn + tag)
    Yp = yn + tag
    register(*X, yn, *Xp, Yp)
    _check_fresh(X + [yn] + Xp + [Yp], b, *params, *x0)
    p0 = qform_eval(phi, x0)
    if p0.is_zero():
        raise ValueError("phi(x0) must be nonzero")
    x, y = _vec(X), RatFunc.var(yn)
    xp, yp = _vec(Xp), RatFunc.var(Yp)
    G0 = qform_eval(phi, x) - b * p0 * y * y
    G1 = p0 * G0
    G2 = qform_eval(phi, xp) - b * yp * yp
    C0 = _cn_at(params, x0, f"{xn}{tag}S")
    img = _row_times(x, C0)
    steps = [
        verify_step(G0, G1, Substitution({}), "multiply by phi(x0)"),
        verify_step(G1, G2, Substitution({**dict(zip(Xp, img)), Yp: p0 * y}), "x' = x*C_n(x0), y' = phi(x0)*y"),
    ]
    return make_chain(steps)


def interchange_roundtrip(params, b, c, coords=("x", "y", "z"), first: Optional[SubstChain] = None):
    """Chain (b, c) followed by chain (c, b) on the first chain's target coordinates.

    Returns (chain, renamed): renamed is the composite with the final
    coordinates renamed back to the source ones, certified against the source.
    `first` may be a chain already built with the same arguments and tag "p".
    """
    first = first or build_interchange_chain(params, b, c, coords, tag="p")
    mid = interchange_coords(coords, "p")
    second = build_interchange_chain(params, c, b, mid, tag="r")
    chain = concat_chains(first, second)
    final = interchange_coords(mid, "r")
    n = len(params)
    ren = {}
    for src, dst in zip(coords[:2], final[:2]):
        for a, bb in zip(x_names(n, src), x_names(n, dst)):
            ren[bb] = a
    ren[final[2]] = coords[2]
    images = {}
    for v, e in chain.composed.images.items():
        images[ren.get(var_name(v), var_name(v))] = e
    renamed = verify_step(chain.source, chain.source, Substitution(images), "round trip")
    return chain, renamed


# -- theta reduction and the norm identity -----------------------------------

@dataclass
class IdentityReport:
    name: str
    passed: bool
    lhs: str = ""
    rhs: str = ""
    checks: list = field(default_factory=list)
    detail: str = ""

    def to_json(self):
        return {"name": self.name, "passed": self.passed, "lhs": self.lhs, "rhs": self.rhs,
                "checks": list(self.checks), "detail": self.detail}


def _theta_parts(n: int, params=None):
    params = list(params or [f"a{i}" for i in range(1, n + 2)])
    if len(params) != n + 1:
        raise ValueError("theta needs n+1 parameters")
    X = x_names(n, "x")
    Y = ["y%d" % i for i in range(2, 2 ** n + 1)]
    Z = ["z%d" % i for i in range(2, 2 ** n + 1)]
    register(*params, *X, *Y, *Z)
    rec = build_cn(n, params[:-1], X, cap=max(n, 4), verify=False)
    a_last = RatFunc.var(params[-1])
    phi = rec.form
    pure = QForm(phi.diag[1:])
    x = [RatFunc.one()] + _vec(X[1:])
    y = _vec(Y)
    psi = QForm((RatFunc.one(), -a_last) + phi.diag[1:])
    u = [RatFunc.one(), RatFunc.zero()] + x[1:]
    v = [RatFunc.zero(), RatFunc.one()] + y
    return rec, a_last, phi, pure, psi, x, y, u, v, Z


def theta_reduce(n: int, params=None) -> IdentityReport:
    """theta = psi(u)psi(v) - b(u,v)^2 equals -a_{n+1}*phi(1,x) + phi'(z), z = (0,y)*C_n(1,x)."""
    rec, a_last, phi, pure, psi, x, y, u, v, Z = _theta_parts(n, params)
    checks = []
    theta = qform_eval(psi, u) * qform_eval(psi, v) - bilinear(psi, u, v) ** 2
    if bilinear(psi, u, v) != (bilinear(psi, u, v) + bilinear(psi, v, u)) / 2:
        raise VerificationError("bilinear symmetry")
    if polarization(psi, u, v) != bilinear(psi, u, v):
        raise VerificationError("polarization formula")
    checks.append("b(u,v) equals the polarization formula")
    x1 = Substitution({rec.xs[0]: RatFunc.one()})
    Cn1 = rec.Cn.subs(x1)
    z = _row_times([RatFunc.zero()] + y, Cn1)
    phi1 = qform_eval(phi, x)
    if z[0] != bilinear(psi, u, v):
        raise VerificationError("z1 = b(u,v)", print_canonical(z[0]))
    checks.append("z1 = b(u,v)")
    if phi1 * qform_eval(phi, [RatFunc.zero()] + y) != qform_eval(phi, z):
        raise VerificationError("phi(1,x)*phi(0,y) = phi((0,y)*C_n)")
    checks.append("phi(1,x)*phi(0,y) = phi((0,y)*C_n)")
    step = -a_last * phi1 + phi1 * qform_eval(phi, [RatFunc.zero()] + y) - bilinear(psi, u, v) ** 2
    if step != theta:
        raise VerificationError("theta expansion")
    checks.append("theta = -a*phi(1,x) + phi(1,x)*phi(0,y) - b(u,v)^2")
    closed = -a_last * phi1 + qform_eval(pure, z[1:])
    if closed != theta:
        raise VerificationError("theta closed form", print_canonical(theta - closed))
    checks.append("theta = -a*phi(1,x) + phi'(z)")
    ysub = Substitution({nm: RatFunc.zero() for nm in (f"y{i}" for i in range(2, 2 ** n + 1))})
    if substitute(theta, ysub) != -a_last * phi1:
        raise VerificationError("theta at y = 0")
    checks.append("theta(y=0) = -a*phi(1,x)")
    symbolic = -a_last * phi1 + qform_eval(pure, _vec(Z))
    return IdentityReport(f"theta n={n}", True, print_canonical(theta), print_canonical(symbolic), checks)


def norm_identity(n: int, params=None) -> IdentityReport:
    """m^2 - a*phi(1,x)*w^2 + phi'(z)*w^2 = <<a1..a_{n+1}>>(m, w*z, w, w*x)."""
    params = list(params or [f"a{i}" for i in range(1, n + 2)])
    if len(params) != n + 1:
        raise ValueError("norm identity needs n+1 parameters")
    X = ["x%d" % i for i in range(2, 2 ** n + 1)]
    Z = ["z%d" % i for i in range(2, 2 ** n + 1)]
    register(*params, "m", "w", *X, *Z)
    big = pfister([RatFunc.var(a) for a in params])
    phi = pfister([RatFunc.var(a) for a in params[:-1]])
    pure = QForm(phi.diag[1:])
    m, w = RatFunc.var("m"), RatFunc.var("w")
    x, z = _vec(X), _vec(Z)
    a_last = RatFunc.var(params[-1])
    lhs = m * m - a_last * qform_eval(phi, [RatFunc.one()] + x) * w * w + qform_eval(pure, z) * w * w
    point = [m] + [w * zi for zi in z] + [w] + [w * xi for xi in x]
    rhs = qform_eval(big, point)
    if lhs != rhs:
        raise VerificationError("norm identity", print_canonical(lhs - rhs))
    checks = ["N(m + w*sqrt(-theta)) = phi_{n+1}(m, w*z, w, w*x)"]
    w0 = Substitution({"w": RatFunc.zero()})
    if substitute(lhs, w0) != m * m or substitute(rhs, w0) != m * m:
        raise VerificationError("w = 0 specialization")
    checks.append("w = 0 gives m^2 on both sides")
    return IdentityReport(f"norm identity n={n}", True, print_canonical(lhs), print_canonical(rhs), checks)


def m_determinant(n: int):
    """det(M) report, delegating to the M record."""
    return build_m(n, cap=max(n, 4))


# -- chain P-equivalence move dispatcher ---------------------------------------

@dataclass(frozen=True)
class PfisterMove:
    kind: str  # isometry-slot-rewrite | interchange-lemma | scalar-lemma
    label: str  # rewrite | transpose | interchange
    positions: tuple
    before: tuple
    after: tuple
    payload: object = None
    full_witness: object = None  # the same move on the 2^n-dimensional Pfister form

    def to_json(self):
        if isinstance(self.payload, SubstChain):
            payload = {"type": "chain", "multiplier": print_canonical(self.payload.multiplier),
                       "steps": len(self.payload.steps)}
        elif isinstance(self.payload, str):
            payload = {"type": "deferred", "note": self.payload}
        elif self.payload is None:
            payload = None
        else:
            payload = {"type": "witness", "matrix": matrix_to_json(self.payload.C)}
        return {
            "kind": self.kind,
            "label": self.label,
            "positions": list(self.positions),
            "before": [print_canonical(a) for a in self.before],
            "after": [print_canonical(a) for a in self.after],
            "payload": payload,
            "pfister_witness": None if self.full_witness is None else matrix_to_json(self.full_witness.C),
        }


def lift_witness(w: Matrix, i: int, j: int, m: int) -> Matrix:
    """Extend a 4x4 witness on <<a_i, a_j>> to <<a_1..a_m>> (1-based slots i < j <= m).

    In the bit-index basis slot k is bit k-1; the lift acts on the two bits
    (i, j) and as the identity on the others.
    """
    N = 2 ** m
    bi, bj = i - 1, j - 1
    zero = RatFunc.zero()
    out = []
    for r in range(N):
        for c in range(N):
            rest_r = r & ~((1 << bi) | (1 << bj))
            rest_c = c & ~((1 << bi) | (1 << bj))
            if rest_r != rest_c:
                out.append(zero)
                continue
            sr = ((r >> bi) & 1) | (((r >> bj) & 1) << 1)
            sc = ((c >> bi) & 1) | (((c >> bj) & 1) << 1)
            out.append(w[sr, sc])
    return Matrix(N, N, out)


def _extend_one(W: Matrix) -> Matrix:
    n = W.rows
    zero, one = RatFunc.zero(), RatFunc.one()
    rows = [list(W.row(i)) + [zero] for i in range(n)] + [[zero] * n + [one]]
    return Matrix.from_rows(rows)


def _swap_bits_perm(m: int, i: int, j: int):
    N = 2 ** m
    perm = []
    for r in range(N):
        bi, bj = (r >> (i - 1)) & 1, (r >> (j - 1)) & 1
        s = r & ~((1 << (i - 1)) | (1 << (j - 1)))
        perm.append(s | (bj << (i - 1)) | (bi << (j - 1)))
    return perm


def _rewrite_move(pres, i, j, w: Matrix, new_i, new_j, label="rewrite"):
    """Isometry of the psi forms replacing slots i, j (1-based, both < n)."""
    after = list(pres)
    after[i - 1], after[j - 1] = new_i, new_j
    m = len(pres) - 1
    W = _extend_one(lift_witness(w, i, j, m))
    wit = verify_congruence(W, subform_psi(pres), subform_psi(after))
    full = verify_congruence(lift_witness(w, i, j, m + 1), pfister(pres), pfister(after))
    return PfisterMove("isometry-slot-rewrite", label, (i, j), tuple(pres), tuple(after), wit, full)


def _transpose_move(pres, i, j):
    m = len(pres) - 1
    after = list(pres)
    after[i - 1], after[j - 1] = after[j - 1], after[i - 1]
    P = _extend_one(permutation_matrix(_swap_bits_perm(m, i, j)))
    wit = verify_congruence(P, subform_psi(pres), subform_psi(after))
    full = verify_congruence(permutation_matrix(_swap_bits_perm(m + 1, i, j)), pfister(pres), pfister(after))
    return PfisterMove("isometry-slot-rewrite", "transpose", (i, j), tuple(pres), tuple(after), wit, full)


def _interchange_move(pres, verify_dim: int):
    """Swap the last Pfister slot with the extra slot via the interchange chain."""
    n = len(pres)
    after = list(pres)
    after[n - 2], after[n - 1] = pres[n - 1], pres[n - 2]
    base = list(pres[: n - 2])
    if 2 ** len(base) <= verify_dim:
        coords = ("gx", "gy", "gz")
        chain = build_interchange_chain(base, pres[n - 2], pres[n - 1], coords=coords)
        # the endpoints must be the generic-zero equations of the two psi forms
        tgt = interchange_coords(coords)
        m = len(base)
        src_pt = _vec(x_names(m, "gx") + x_names(m, "gy") + ["gz"])
        dst_pt = _vec(x_names(m, tgt[0]) + x_names(m, tgt[1]) + [tgt[2]])
        if qform_eval(subform_psi(pres), src_pt) != chain.source.rf:
            raise ChainError("interchange source is not the psi equation")
        if qform_eval(subform_psi(after), dst_pt) != chain.target.rf:
            raise ChainError("interchange target is not the psi equation")
        payload = chain
    else:
        payload = f"deferred: verified at dim <= {verify_dim} template"
    return PfisterMove("interchange-lemma", "interchange", (n - 1, n), tuple(pres), tuple(after), payload)


class DispatchError(ValueError):
    pass


def dispatch_pequiv_move(presentation: Sequence, i: int, j: int, witness, *, verify_dim: int = 4):
    """Moves turning psi(presentation) into psi(presentation with a_i, a_j rewritten).

    `witness` is a CongruenceWitness (or a 4x4 Matrix with explicit target
    parameters via witness_target) certifying <<a_i, a_j>> = <<a_i', a_j'>>.
    """
    pres = tuple(coerce(a) for a in presentation)
    n = len(pres)
    if not (1 <= i < j <= n):
        raise DispatchError(f"need 1 <= i < j <= n, got i={i}, j={j}, n={n}")
    if n < 2:
        raise DispatchError("presentation needs at least two parameters")
    src2 = pfister([pres[i - 1], pres[j - 1]])
    if witness.source.diag != src2.diag:
        raise DispatchError("witness source is not <<a_i, a_j>> of the presentation")
    if witness.target.pfister_params is None or len(witness.target.pfister_params) != 2:
        raise DispatchError("witness target must be a 2-fold Pfister form with recorded parameters")
    try:
        verify_congruence(witness.C, witness.source, witness.target)
    except CongruenceError as exc:
        raise ChainError("witness verification", str(exc)) from exc
    ni, nj = witness.target.pfister_params
    w = witness.C
    moves = []
    if j != n:
        moves.append(_rewrite_move(pres, i, j, w, ni, nj))
    elif i != n - 1:
        m1 = _interchange_move(pres, verify_dim)
        m2 = _rewrite_move(m1.after, i, n - 1, w, ni, nj)
        m3 = _interchange_move(m2.after, verify_dim)
        moves = [m1, m2, m3]
    else:
        if n < 3:
            raise DispatchError("case i = n-1, j = n needs n >= 3 (a slot to transpose with)")
        m1 = _transpose_move(pres, n - 2, n - 1)
        m2 = _interchange_move(m1.after, verify_dim)
        m3 = _rewrite_move(m2.after, n - 2, n - 1, w, ni, nj)
        m4 = _interchange_move(m3.after, verify_dim)
        m5 = _transpose_move(m4.after, n - 2, n - 1)
        moves = [m1, m2, m3, m4, m5]
    for a, b in zip(moves, moves[1:]):
        if a.after != b.before:
            raise ChainError("moves do not connect")
    expected = list(pres)
    expected[i - 1], expected[j - 1] = ni, nj
    if list(moves[-1].after) != expected:
        raise ChainError("final presentation differs from the rewritten one")
    return moves


def apply_moves(presentation, moves):
    """Replay the presentation changes recorded in the moves."""
    cur = tuple(coerce(a) for a in presentation)
    for mv in moves:
        if mv.before != cur:
            raise ChainError("move does not start at the current presentation")
        if mv.kind == "isometry-slot-rewrite":
            verify_congruence(mv.payload.C, subform_psi(mv.before), subform_psi(mv.after))
        elif isinstance(mv.payload, SubstChain):
            mv.payload.reverify()
        cur = mv.after
    return cur


def witness_from_matrix(C: Matrix, source_params, target_params):
    return verify_congruence(C, pfister(source_params), pfister(target_params))
