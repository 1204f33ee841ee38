"""Multivariate polynomial gcd over Q and Q(zeta_p).

Strategy, cheapest first:
  * strip monomial contents, drop variables private to one operand by taking
    contents with respect to them;
  * exact-divisibility shortcut;
  * coprimality certificate mod a large prime (rational coefficients only):
    if, for every shared variable v, a specialization of all other variables
    keeps deg_v(f) and gives a constant univariate gcd mod P, then the true
    gcd has degree 0 in v;
  * otherwise recursive content / primitive part with a subresultant PRS in
    the main variable.
"""

import random

from gmpy2 import mpq

from .poly import MASK, W, Poly, mono_exps

_P = (1 << 61) - 1
_rng = random.Random(0x5EED)


def poly_gcd(f: Poly, g: Poly) -> Poly:
    """gcd normalized to graded-lex leading coefficient 1; gcd(f, 0) = monic f."""
    f._check(g)
    if f.is_zero():
        return g.monic()
    if g.is_zero():
        return f.monic()
    return _gcd(f, g).monic()


def poly_gcd_list(polys) -> Poly:
    polys = sorted((p for p in polys if not p.is_zero()), key=len)
    if not polys:
        raise ValueError("gcd of no nonzero polynomials")
    acc = polys[0]
    for p in polys[1:]:
        if acc.is_const():
            break
        acc = _gcd(acc, p)
    return Poly.one(acc.field) if acc.is_const() else acc.monic()


def poly_lcm(f: Poly, g: Poly) -> Poly:
    if f.is_const():
        return g.monic()
    if g.is_const() or f == g:
        return f.monic()
    h = _gcd(f, g)
    return (f * g.divexact(h)).monic()


def _strip_mono(f: Poly):
    m = f.min_mono()
    if m == 0:
        return f, 0
    return Poly({k - m: c for k, c in f.terms.items()}, f.field), m


def _gcd(f: Poly, g: Poly) -> Poly:
    one = Poly.one(f.field)
    if f.is_const() or g.is_const():
        return one
    if f == g:
        return f
    f, mf = _strip_mono(f)
    g, mg = _strip_mono(g)
    common_mono = 0
    if mf and mg:
        ef, eg = mono_exps(mf), mono_exps(mg)
        for i, (a, b) in enumerate(zip(ef, eg)):
            common_mono += min(a, b) << (W * i)
    h = _gcd_nomono(f, g)
    return h.mul_mono(common_mono) if common_mono else h


def _content_wrt(f: Poly, vars_) -> Poly:
    """gcd of the coefficients of f viewed as a polynomial in `vars_`."""
    mask = 0
    for i in vars_:
        mask |= MASK << (W * i)
    groups = {}
    for m, c in f.terms.items():
        key = m & mask
        groups.setdefault(key, {})[m - key] = c
    return poly_gcd_list(Poly(t, f.field) for t in groups.values())


def _gcd_nomono(f: Poly, g: Poly) -> Poly:
    one = Poly.one(f.field)
    if f.is_const() or g.is_const():
        return one
    if len(f) > len(g):
        f, g = g, f
    vf, vg = f.variables(), g.variables()
    common = vf & vg
    if not common:
        return one
    changed = False
    if vf - common:
        f = _content_wrt(f, vf - common)
        changed = True
    if vg - common:
        g = _content_wrt(g, vg - common)
        changed = True
    if changed:
        return _gcd(f, g)
    if g.divexact(f) is not None:
        return f
    if f.field == 0 and _coprime_mod_p(f, g, common):
        return one
    parts = _content_split(f)
    if len(parts) > 1:
        # gcd(g, f1*f2*...) one factor at a time
        h = one
        for part in parts:
            d = _gcd(g, part)
            if not d.is_const():
                h = h * d
                g = g.divexact(d)
        return h
    v = min(common, key=lambda i: (max(f.degree(i), g.degree(i)), i))
    return _gcd_prs(f, g, v)


def _content_split(f: Poly):
    """Split f into factors using its contents with respect to single variables."""
    for v in sorted(f.variables()):
        parts = f.coeffs_in(v)
        if len(parts) < 2:
            continue
        c = poly_gcd_list(parts.values())
        if not c.is_const():
            return _content_split(c) + _content_split(f.divexact(c))
    return [f]


# -- modular coprimality certificate ------------------------------------

def _mod(c, P):
    d = int(c.denominator) % P
    if d == 0:
        return None
    return int(c.numerator) * pow(d, -1, P) % P


def _univariate_images(f: Poly, vs, point: dict, P: int):
    """For each v in vs: f with the other variables set to `point`, as dense lists mod P.

    Every term is evaluated once at the full point; the v-part is divided
    back out with cached inverse powers.
    """
    pw, ipw = {}, {}

    def power(i, e):
        key = (i, e)
        r = pw.get(key)
        if r is None:
            r = pw[key] = pow(point[i], e, P)
        return r

    def inv_power(i, e):
        key = (i, e)
        r = ipw.get(key)
        if r is None:
            r = ipw[key] = pow(point[i], -e, P)
        return r

    vs = set(vs)
    outs = {v: [0] * (f.degree(v) + 1) for v in vs}
    for m, c in f.terms.items():
        cm = _mod(c, P)
        if cm is None:
            return None
        exps = [(i, e) for i, e in enumerate(mono_exps(m)) if e]
        full = cm
        for i, e in exps:
            full = full * power(i, e) % P
        touched = set()
        for i, e in exps:
            if i in vs:
                out = outs[i]
                out[e] = (out[e] + full * inv_power(i, e)) % P
                touched.add(i)
        for v in vs - touched:
            outs[v][0] = (outs[v][0] + full) % P
    return outs


def _uni_gcd_deg(a, b, P):
    def trim(x):
        while x and x[-1] == 0:
            x.pop()
        return x

    a, b = trim(list(a)), trim(list(b))
    while b:
        inv = pow(b[-1], -1, P)
        while len(a) >= len(b):
            q = a[-1] * inv % P
            off = len(a) - len(b)
            for i, bi in enumerate(b):
                a[off + i] = (a[off + i] - q * bi) % P
            trim(a)
            if not a:
                break
        a, b = b, a
    return len(a) - 1


def _coprime_mod_p(f: Poly, g: Poly, common) -> bool:
    allvars = f.variables() | g.variables()
    point = {i: _rng.randrange(2, _P) for i in allvars}
    uf = _univariate_images(f, common, point, _P)
    ug = _univariate_images(g, common, point, _P)
    if uf is None or ug is None:
        return False
    for v in sorted(common):
        a, b = uf[v], ug[v]
        # leading coefficient in v must survive specialization
        if a[-1] == 0 and b[-1] == 0:
            return False
        if _uni_gcd_deg(a, b, _P) > 0:
            return False
    return True


# -- recursive PRS ---------------------------------------------------------

def _dense_in(f: Poly, v: int):
    cs = f.coeffs_in(v)
    deg = max(cs)
    zero = Poly.zero(f.field)
    return [cs.get(e, zero) for e in range(deg + 1)]


def _from_dense(coeffs, v: int) -> Poly:
    acc = {}
    for e, c in enumerate(coeffs):
        shift = e << (W * v)
        for m, a in c.terms.items():
            acc[m + shift] = a
    return Poly(acc, coeffs[0].field if coeffs else 0)


def _trim(A):
    while A and A[-1].is_zero():
        A.pop()
    return A


def _prem(A, B):
    dA, dB = len(A) - 1, len(B) - 1
    lcB = B[-1]
    R = list(A)
    e = dA - dB + 1
    while R and len(R) - 1 >= dB:
        lcR = R[-1]
        d = len(R) - 1 - dB
        R = [r * lcB for r in R]
        for i in range(dB + 1):
            R[i + d] = R[i + d] - lcR * B[i]
        _trim(R)
        e -= 1
    if e > 0 and R:
        f = lcB ** e
        R = [r * f for r in R]
    return R


def _exact(p: Poly, d: Poly) -> Poly:
    q = p.divexact(d)
    if q is None:
        raise ArithmeticError("subresultant PRS: inexact division")
    return q


def _gcd_prs(f: Poly, g: Poly, v: int) -> Poly:
    A, B = _dense_in(f, v), _dense_in(g, v)
    cont_f = poly_gcd_list(A)
    cont_g = poly_gcd_list(B)
    if not cont_f.is_one():
        A = [_exact(a, cont_f) for a in A]
    if not cont_g.is_one():
        B = [_exact(b, cont_g) for b in B]
    c = _gcd(cont_f, cont_g) if not (cont_f.is_const() or cont_g.is_const()) else Poly.one(f.field)
    if len(A) < len(B):
        A, B = B, A
    one = Poly.one(f.field)
    gg = one
    h = one
    while True:
        d = len(A) - len(B)
        R = _prem(A, B)
        if not R:
            break
        if len(R) == 1:
            return c
        A = B
        div = gg * h ** d if d else gg
        B = [_exact(r, div) for r in R] if not div.is_one() else R
        gg = A[-1]
        if d == 0:
            pass
        elif d == 1:
            h = gg
        else:
            h = _exact(gg ** d, h ** (d - 1))
    pp_cont = poly_gcd_list(B)
    if not pp_cont.is_one():
        B = [_exact(b, pp_cont) for b in B]
    return c * _from_dense(B, v)


# -- coprime bases ----------------------------------------------------------

def _split_parts(f: Poly):
    """Cheap factors of f: single variables of its monomial content, then content splits."""
    parts = []
    f, m = _strip_mono(f)
    if m:
        unit = Poly.one(f.field).terms[0]
        parts.extend(Poly({1 << (W * i): unit}, f.field) for i, e in enumerate(mono_exps(m)) if e)
    if not f.is_const():
        parts.extend(_content_split(f))
    return parts


def coprime_basis(polys):
    """Pairwise coprime monic polynomials such that every input is a product of their powers."""
    basis = []
    todo = [part for p in polys if not p.is_const() for part in _split_parts(p)]
    while todo:
        q = todo.pop()
        if q.is_const():
            continue
        q = q.monic()
        for idx, b in enumerate(basis):
            if b == q:
                q = None
                break
            g = _gcd(q, b)
            if g.is_const():
                continue
            basis.pop(idx)
            todo.extend([g, b.divexact(g), q.divexact(g)])
            q = None
            break
        if q is not None:
            basis.append(q)
    return basis


def factor_over(p: Poly, basis):
    """Exponents of p over a coprime basis, or None if p is not a product of basis powers."""
    exps = {}
    for i, b in enumerate(basis):
        k = 0
        while True:
            q = p.divexact(b)
            if q is None:
                break
            p, k = q, k + 1
        if k:
            exps[i] = k
    return exps if p.is_const() else None


def coprime_to_each(f: Poly, others) -> bool:
    """is_coprime(f, g) for every g in others, evaluating f only once."""
    others = [g for g in others if not g.is_const()]
    if f.is_const() or not others:
        return True
    f0, mf = _strip_mono(f)
    fexps = mono_exps(mf)
    pending = []
    for g in others:
        g0, mg = _strip_mono(g)
        if any(a and b for a, b in zip(fexps, mono_exps(mg))):
            return False
        if not g0.is_const() and f0.variables() & g0.variables():
            pending.append(g0)
    if not pending or f0.is_const():
        return True
    if f0.field == 0:
        allvars = set(f0.variables())
        for g in pending:
            allvars |= g.variables()
        common = set()
        for g in pending:
            common |= f0.variables() & g.variables()
        point = {i: _rng.randrange(2, _P) for i in allvars}
        uf = _univariate_images(f0, common, point, _P)
        if uf is not None:
            rest = []
            for g in pending:
                shared = f0.variables() & g.variables()
                ug = _univariate_images(g, shared, point, _P)
                ok = ug is not None and all(
                    not (uf[v][-1] == 0 and ug[v][-1] == 0) and _uni_gcd_deg(uf[v], ug[v], _P) == 0
                    for v in shared
                )
                if not ok:
                    rest.append(g)
            pending = rest
    return all(_gcd(f0, g).is_const() for g in pending)


def is_coprime(f: Poly, g: Poly) -> bool:
    """Exact coprimality, using the modular certificate first."""
    if f.is_const() or g.is_const():
        return True
    # monomial parts: the stripped polynomials are not divisible by any variable
    f, mf = _strip_mono(f)
    g, mg = _strip_mono(g)
    if any(a and b for a, b in zip(mono_exps(mf), mono_exps(mg))):
        return False
    if f.is_const() or g.is_const():
        return True
    common = f.variables() & g.variables()
    if not common:
        return True
    if f.field == 0 and _coprime_mod_p(f, g, common):
        return True
    return _gcd(f, g).is_const()
