"""Normalized rational functions num/den and substitution homomorphisms."""

from gmpy2 import mpq

from .gcd import _gcd, poly_lcm
from .poly import Poly, mono_exps, W
from .scalar import Cyclotomic, FieldMismatchError
from .variables import var_index, var_name


class ZeroDenominatorError(ZeroDivisionError):
    """A denominator vanished identically."""


class RatFunc:
    """num/den with gcd(num, den) = 1 and den monic (graded-lex).

    Canonical forms are unique, so equality of representations coincides
    with equality as field elements.
    """

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num, den=None, *, _canonical=False):
        if not isinstance(num, Poly):
            num = Poly.const(num)
        if den is None:
            den = Poly.one(num.field)
        elif not isinstance(den, Poly):
            den = Poly.const(den, num.field)
        if _canonical:
            self.num, self.den = num, den
        else:
            self.num, self.den = _normalize(num, den)
        self._hash = None

    # -- constructors ---------------------------------------------------
    @classmethod
    def var(cls, name, field=0):
        return cls(Poly.var(name, field), Poly.one(field), _canonical=True)

    @classmethod
    def const(cls, c, field=None):
        p = Poly.const(c, field)
        return cls(p, Poly.one(p.field), _canonical=True)

    @classmethod
    def zero(cls, field=0):
        return cls(Poly.zero(field), Poly.one(field), _canonical=True)

    @classmethod
    def one(cls, field=0):
        return cls(Poly.one(field), Poly.one(field), _canonical=True)

    @classmethod
    def from_poly(cls, p: Poly):
        return cls(p, Poly.one(p.field), _canonical=True)

    @property
    def field(self):
        return self.num.field

    # -- predicates -----------------------------------------------------
    def is_zero(self):
        return self.num.is_zero()

    def __bool__(self):
        return not self.num.is_zero()

    def is_poly(self):
        return self.den.is_one()

    def is_const(self):
        return self.den.is_one() and self.num.is_const()

    def variables(self) -> set:
        return self.num.variables() | self.den.variables()

    def variable_names(self) -> set:
        return {var_name(i) for i in self.variables()}

    # -- arithmetic -----------------------------------------------------
    def _lift(self, other):
        if isinstance(other, RatFunc):
            if other.field != self.field:
                raise FieldMismatchError(f"rational functions over fields {self.field} and {other.field}")
            return other
        if isinstance(other, Poly):
            return RatFunc.from_poly(other)
        if isinstance(other, (int, Cyclotomic)) or isinstance(other, type(mpq(0))):
            return RatFunc.const(other, self.field)
        return NotImplemented

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        a, b, c, d = self.num, self.den, o.num, o.den
        if not a:
            return o
        if not c:
            return self
        if b.is_one() and d.is_one():
            return RatFunc(a + c, b, _canonical=True)
        if b == d:
            n = a + c
            if not n:
                return RatFunc.zero(self.field)
            return _from_reduced(n, b, _gcd(n, b))
        if b.is_one():
            return RatFunc(a * d + c, d, _canonical=True)
        if d.is_one():
            return RatFunc(a + c * b, b, _canonical=True)
        g = _gcd(b, d)
        if g.is_const():
            return RatFunc(a * d + c * b, b * d, _canonical=True)._fix_lead()
        bg, dg = b.divexact(g), d.divexact(g)
        n = a * dg + c * bg
        den = bg * d
        if not n:
            return RatFunc.zero(self.field)
        h = _gcd(n, g)
        return _from_reduced(n, den, h)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den, _canonical=True)

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return o + (-self)

    def __mul__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        a, b, c, d = self.num, self.den, o.num, o.den
        if not a or not c:
            return RatFunc.zero(self.field)
        if b.is_one() and d.is_one():
            return RatFunc(a * c, b, _canonical=True)
        g1 = _gcd(a, d) if not d.is_one() else None
        g2 = _gcd(c, b) if not b.is_one() else None
        if g1 is not None and not g1.is_const():
            a, d = a.divexact(g1), d.divexact(g1)
        if g2 is not None and not g2.is_const():
            c, b = c.divexact(g2), b.divexact(g2)
        return RatFunc(a * c, b * d, _canonical=True)._fix_lead()

    __rmul__ = __mul__

    def inverse(self):
        if not self.num:
            raise ZeroDenominatorError("inverse of zero rational function")
        return RatFunc(self.den, self.num, _canonical=True)._fix_lead()

    def __truediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        return RatFunc(self.num ** e, self.den ** e, _canonical=True)

    def _fix_lead(self):
        """Rescale so the denominator is monic (gcd already 1)."""
        d = self.den
        lc = d.lead_coeff
        if lc == 1:
            return self
        inv = 1 / lc if d.field == 0 else lc.inverse()
        self.num = self.num.scale(inv)
        self.den = d.scale(inv)
        return self

    # -- comparison -----------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, RatFunc):
            return self.num == other.num and self.den == other.den
        if isinstance(other, (int, Poly)):
            return self.den.is_one() and self.num == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def __repr__(self):
        return f"RatFunc({str(self)!r})"

    def __str__(self):
        from ..exprio import print_canonical

        return print_canonical(self)


def _from_reduced(n: Poly, den: Poly, g: Poly) -> RatFunc:
    if not g.is_const():
        n, den = n.divexact(g), den.divexact(g)
    return RatFunc(n, den, _canonical=True)._fix_lead()


def _normalize(num: Poly, den: Poly):
    num._check(den)
    if den.is_zero():
        raise ZeroDenominatorError("rational function with zero denominator")
    if num.is_zero():
        return Poly.zero(num.field), Poly.one(num.field)
    if not den.is_const():
        q = num.divexact(den)
        if q is not None:
            return q, Poly.one(num.field)
        g = _gcd(num, den)
        if not g.is_const():
            num, den = num.divexact(g), den.divexact(g)
    lc = den.lead_coeff
    if lc != 1:
        inv = 1 / lc if den.field == 0 else lc.inverse()
        num, den = num.scale(inv), den.scale(inv)
    return num, den


def ratfunc_normalize(num, den) -> RatFunc:
    return RatFunc(num, den)


# -- substitution ----------------------------------------------------------

class Substitution:
    """Field homomorphism given on generators: {variable: RatFunc}.

    Unmapped variables are fixed.  When `fixed` is given explicitly, every
    variable of a substituted expression must be mapped or listed there.
    """

    __slots__ = ("images", "fixed")

    def __init__(self, images: dict, fixed=None):
        imgs = {}
        for k, v in images.items():
            idx = k if isinstance(k, int) else var_index(k)
            if not isinstance(v, RatFunc):
                v = v if isinstance(v, Poly) else Poly.const(v)
                v = RatFunc.from_poly(v)
            imgs[idx] = v
        self.images = imgs
        self.fixed = None if fixed is None else {f if isinstance(f, int) else var_index(f) for f in fixed}

    def __getitem__(self, name):
        return self.images[name if isinstance(name, int) else var_index(name)]

    def items_named(self):
        return [(var_name(i), e) for i, e in sorted(self.images.items())]

    def check_domain(self, e: "RatFunc"):
        if self.fixed is None:
            return
        missing = e.variables() - set(self.images) - self.fixed
        if missing:
            names = ", ".join(sorted(var_name(i) for i in missing))
            raise ValueError(f"substitution undefined on: {names}")

    def then(self, outer: "Substitution") -> "Substitution":
        """Composite map: first self, then outer applied to the images.

        `self.then(outer)` sends v to substitute(self[v], outer); variables
        fixed by self go to their image under outer.
        """
        imgs = {i: substitute(e, outer) for i, e in self.images.items()}
        for i, e in outer.images.items():
            imgs.setdefault(i, e)
        return Substitution(imgs)

    def __repr__(self):
        return "Substitution({" + ", ".join(f"{n}: {e}" for n, e in self.items_named()) + "})"


def _is_renaming(images: dict):
    out = {}
    for i, e in images.items():
        if not e.den.is_one() or len(e.num.terms) != 1:
            return None
        (m, c), = e.num.terms.items()
        if c != 1:
            return None
        ex = mono_exps(m)
        if sum(ex) != 1:
            return None
        out[i] = len(ex) - 1
    if len(set(out.values())) != len(out):
        return None
    return out


def _subst_poly(p: Poly, images: dict):
    """Image of p as (numerator Poly, denominator Poly), not reduced.

    Images sharing a denominator d are grouped; the common denominator is
    d^D with D the largest total degree of p in that group.
    """
    used = {i: e for i, e in images.items() if i in p.variables()}
    if not used:
        return p, Poly.one(p.field)
    if all(e.den.is_one() for e in used.values()):
        return p.compose({i: e.num for i, e in used.items()}), Poly.one(p.field)
    one = Poly.one(p.field)
    dens = {e.den for e in used.values() if not e.den.is_one()}
    if len(dens) > 1:
        # one shared denominator keeps the cofactors small when the dens overlap
        L = None
        for d in dens:
            L = d if L is None else poly_lcm(L, d)
        used = {i: e if e.den == L else RatFunc(e.num * L.divexact(e.den), L, _canonical=True)
                for i, e in used.items()}
    groups = {}
    for i, e in used.items():
        if not e.den.is_one():
            groups.setdefault(e.den, []).append(i)
    group_list = list(groups.items())
    tops = [0] * len(group_list)
    rows = []
    for m, c in p.terms.items():
        exps = mono_exps(m)
        ks = {i: exps[i] for i in used if i < len(exps) and exps[i]}
        sums = [sum(ks.get(i, 0) for i in members) for _, members in group_list]
        tops = [max(a, b) for a, b in zip(tops, sums)]
        fixed = m
        for i, k in ks.items():
            fixed -= k << (W * i)
        rows.append((fixed, c, ks, sums))
    den = one
    for (d, _), top in zip(group_list, tops):
        if top:
            den = den * d ** top
    num_pows, den_pows = {}, {}

    def num_pow(i, k):
        r = num_pows.get((i, k))
        if r is None:
            r = num_pows[(i, k)] = used[i].num ** k
        return r

    def den_pow(g, k):
        r = den_pows.get((g, k))
        if r is None:
            r = den_pows[(g, k)] = group_list[g][0] ** k
        return r

    acc = {}
    for fixed, c, ks, sums in rows:
        factors = [num_pow(i, k) for i, k in ks.items()]
        factors += [den_pow(g, tops[g] - sg) for g, sg in enumerate(sums) if tops[g] - sg]
        term = Poly({fixed: c}, p.field)
        for f in sorted(factors, key=len):
            term = term * f
        for tm, tc in term.terms.items():
            v = acc.get(tm)
            acc[tm] = tc if v is None else v + tc
    return Poly({m: c for m, c in acc.items() if c}, p.field), den


def substitute(e, s) -> RatFunc:
    """Image of e under the homomorphism extending s."""
    if not isinstance(s, Substitution):
        s = Substitution(s)
    if not isinstance(e, RatFunc):
        e = RatFunc.from_poly(e) if isinstance(e, Poly) else RatFunc.const(e)
    s.check_domain(e)
    images = {i: img for i, img in s.images.items() if i in e.variables()}
    if not images:
        return e
    for img in images.values():
        if img.field != e.field:
            raise FieldMismatchError("substitution image in a different coefficient field")
    ren = _is_renaming(images)
    if ren is not None and not (set(ren.values()) & (e.variables() - set(ren))):
        return RatFunc(e.num.rename(ren), e.den.rename(ren), _canonical=True)._fix_lead()
    nn, nd = _subst_poly(e.num, images)
    if e.den.is_one():
        if nd.is_one():
            return RatFunc(nn, nd, _canonical=True)
        return RatFunc(nn, nd)
    dn, dd = _subst_poly(e.den, images)
    if dn.is_zero():
        raise ZeroDenominatorError("substituted denominator vanishes identically")
    return RatFunc(nn * dd, nd * dn)
