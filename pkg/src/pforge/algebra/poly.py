"""Sparse multivariate polynomials over Q or Q(zeta_p).

Monomials are packed into a single Python int: the exponent of variable i
sits in bits [16*i, 16*i + 16), top bit of each field reserved as a guard
for divisibility tests.  Multiplying monomials is then integer addition.
Term order is graded lexicographic over the registration order of
variables (earlier registered variables are larger).
"""

from functools import lru_cache
from heapq import heappop, heappush

from gmpy2 import mpq

from .scalar import Cyclotomic, FieldMismatchError, field_of, promote
from .variables import var_index, var_name

W = 16
MASK = (1 << W) - 1
MAX_EXP = (1 << (W - 1)) - 1

_guard_cache = [0]


def _guards(nbits: int) -> int:
    nfields = nbits // W + 1
    while len(_guard_cache) <= nfields:
        k = len(_guard_cache)
        _guard_cache.append(_guard_cache[-1] | (1 << (W * (k - 1) + W - 1)))
    return _guard_cache[nfields]


def mono_from_exps(exps) -> int:
    """Pack a {var_index: exponent} mapping (or a dense sequence)."""
    items = exps.items() if isinstance(exps, dict) else enumerate(exps)
    m = 0
    for i, e in items:
        if e < 0 or e > MAX_EXP:
            raise OverflowError(f"exponent {e} out of range")
        m |= e << (W * i)
    return m


@lru_cache(maxsize=1 << 18)
def mono_exps(m: int) -> tuple:
    out = []
    while m:
        out.append(m & MASK)
        m >>= W
    return tuple(out)


@lru_cache(maxsize=1 << 18)
def mono_key(m: int) -> tuple:
    """Graded-lex sort key; larger key = larger monomial."""
    e = mono_exps(m)
    return (sum(e),) + e


@lru_cache(maxsize=1 << 18)
def _neg_key(m: int) -> tuple:
    return tuple(-k for k in mono_key(m))


def mono_divides(a: int, b: int) -> bool:
    """True iff monomial a divides monomial b."""
    if a == 0:
        return True
    g = _guards(max(a.bit_length(), b.bit_length()))
    return ((b | g) - a) & g == g


def mono_deg(m: int, i: int) -> int:
    return (m >> (W * i)) & MASK


def mono_total_deg(m: int) -> int:
    return sum(mono_exps(m))


def mono_gcd(a: int, b: int) -> int:
    ea, eb = mono_exps(a), mono_exps(b)
    return mono_from_exps([min(x, y) for x, y in zip(ea, eb)])


def _zero_of(field):
    return mpq(0) if field == 0 else Cyclotomic.from_int(field, 0)


def _one_of(field):
    return mpq(1) if field == 0 else Cyclotomic.from_int(field, 1)


def _coerce_scalar(c, field):
    if isinstance(c, Cyclotomic):
        if c.p != field:
            raise FieldMismatchError(f"scalar in Q(zeta_{c.p}) used with field {field}")
        return c
    if field == 0:
        return mpq(c)
    if isinstance(c, int):
        return Cyclotomic.from_int(field, c)
    raise FieldMismatchError("rational scalar needs explicit promote() into Q(zeta_p)")


class Poly:
    """Immutable sparse polynomial.  `terms` maps packed monomial -> nonzero coefficient."""

    __slots__ = ("terms", "field", "_lead", "_hash")

    def __init__(self, terms=None, field: int = 0):
        self.terms = terms if terms is not None else {}
        self.field = field
        self._lead = None
        self._hash = None

    # -- constructors ---------------------------------------------------
    @classmethod
    def zero(cls, field=0):
        return cls({}, field)

    @classmethod
    def one(cls, field=0):
        return cls({0: _one_of(field)}, field)

    @classmethod
    def const(cls, c, field=None):
        if field is None:
            field = field_of(c)
        c = _coerce_scalar(c, field)
        return cls({0: c} if c else {}, field)

    @classmethod
    def var(cls, name, field=0):
        idx = name if isinstance(name, int) else var_index(name)
        return cls({1 << (W * idx): _one_of(field)}, field)

    @classmethod
    def from_terms(cls, items, field=0):
        """Build from (monomial, coefficient) pairs, merging and dropping zeros."""
        d = {}
        for m, c in items:
            c = _coerce_scalar(c, field)
            v = d.get(m)
            d[m] = c if v is None else v + c
        return cls({m: c for m, c in d.items() if c}, field)

    # -- basic predicates ----------------------------------------------
    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_const(self):
        t = self.terms
        return not t or (len(t) == 1 and 0 in t)

    def is_one(self):
        t = self.terms
        return len(t) == 1 and t.get(0) == 1

    def is_monomial(self):
        return len(self.terms) == 1

    def const_value(self):
        return self.terms.get(0, _zero_of(self.field))

    def __len__(self):
        return len(self.terms)

    # -- structure ------------------------------------------------------
    @property
    def lead_mono(self) -> int:
        if self._lead is None:
            if not self.terms:
                raise ValueError("zero polynomial has no leading term")
            self._lead = max(self.terms, key=mono_key)
        return self._lead

    @property
    def lead_coeff(self):
        return self.terms[self.lead_mono]

    def variables(self) -> set:
        acc = 0
        for m in self.terms:
            acc |= m
        out = set()
        i = 0
        while acc:
            if acc & MASK:
                out.add(i)
            acc >>= W
            i += 1
        return out

    def variable_names(self) -> set:
        return {var_name(i) for i in self.variables()}

    def degree(self, i=None) -> int:
        if not self.terms:
            return -1
        if i is None:
            return max(mono_total_deg(m) for m in self.terms)
        if isinstance(i, str):
            i = var_index(i)
        return max(mono_deg(m, i) for m in self.terms)

    def coeffs_in(self, i: int) -> dict:
        """View as univariate in variable i: {exponent: Poly in the other variables}."""
        shift = W * i
        buckets = {}
        for m, c in self.terms.items():
            e = (m >> shift) & MASK
            rest = m - (e << shift)
            b = buckets.get(e)
            if b is None:
                buckets[e] = {rest: c}
            else:
                b[rest] = c
        return {e: Poly(t, self.field) for e, t in buckets.items()}

    def min_mono(self) -> int:
        """Largest monomial dividing every term."""
        it = iter(self.terms)
        e = list(mono_exps(next(it)))
        for m in it:
            em = mono_exps(m)
            if len(em) < len(e):
                e = e[: len(em)]
            for k in range(len(e)):
                if em[k] < e[k]:
                    e[k] = em[k]
            if not any(e):
                return 0
        return mono_from_exps(e)

    # -- arithmetic -----------------------------------------------------
    def _check(self, other):
        if self.field != other.field:
            raise FieldMismatchError(f"polynomials over fields {self.field} and {other.field}")

    def __add__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(other, self.field)
        self._check(other)
        if len(self.terms) < len(other.terms):
            a, b = other.terms, self.terms
        else:
            a, b = self.terms, other.terms
        res = dict(a)
        for m, c in b.items():
            v = res.get(m)
            if v is None:
                res[m] = c
            else:
                v = v + c
                if v:
                    res[m] = v
                else:
                    del res[m]
        return Poly(res, self.field)

    __radd__ = __add__

    def __neg__(self):
        return Poly({m: -c for m, c in self.terms.items()}, self.field)

    def __sub__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(other, self.field)
        self._check(other)
        res = dict(self.terms)
        for m, c in other.terms.items():
            v = res.get(m)
            if v is None:
                res[m] = -c
            else:
                v = v - c
                if v:
                    res[m] = v
                else:
                    del res[m]
        return Poly(res, self.field)

    def __rsub__(self, other):
        return Poly.const(other, self.field) - self

    def scale(self, c):
        c = _coerce_scalar(c, self.field)
        if not c:
            return Poly({}, self.field)
        if c == 1:
            return self
        return Poly({m: v * c for m, v in self.terms.items()}, self.field)

    def mul_mono(self, mono: int, c=None):
        if c is None:
            return Poly({m + mono: v for m, v in self.terms.items()}, self.field)
        return Poly({m + mono: v * c for m, v in self.terms.items()}, self.field)

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return self.scale(other)
        self._check(other)
        a, b = self.terms, other.terms
        if not a or not b:
            return Poly({}, self.field)
        if len(a) < len(b):
            a, b = b, a
        if len(b) == 1:
            (mb, cb), = b.items()
            if cb == 1:
                return Poly({m + mb: c for m, c in a.items()}, self.field)
            return Poly({m + mb: c * cb for m, c in a.items()}, self.field)
        res = {}
        get = res.get
        bitems = list(b.items())
        for m1, c1 in a.items():
            for m2, c2 in bitems:
                m = m1 + m2
                v = get(m)
                if v is None:
                    res[m] = c1 * c2
                else:
                    res[m] = v + c1 * c2
        return Poly({m: c for m, c in res.items() if c}, self.field)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative exponent on Poly")
        if len(self.terms) == 1:
            (m, c), = self.terms.items()
            if max(mono_exps(m), default=0) * e > MAX_EXP:
                raise OverflowError("exponent overflow")
            return Poly({m * e: c ** e}, self.field)
        acc = Poly.one(self.field)
        base = self
        while e:
            if e & 1:
                acc = acc * base
            e >>= 1
            if e:
                base = base * base
        return acc

    def divexact(self, g: "Poly"):
        """Quotient self / g if g divides self exactly, else None."""
        self._check(g)
        if not g.terms:
            raise ZeroDivisionError("polynomial division by zero")
        if not self.terms:
            return Poly({}, self.field)
        if len(g.terms) == 1:
            (mg, cg), = g.terms.items()
            inv = 1 / cg if self.field == 0 else cg.inverse()
            out = {}
            for m, c in self.terms.items():
                if not mono_divides(mg, m):
                    return None
                out[m - mg] = c * inv
            return Poly(out, self.field)
        lm = g.lead_mono
        if not mono_divides(lm, self.lead_mono):
            return None
        lc = g.terms[lm]
        inv = 1 / lc if self.field == 0 else lc.inverse()
        rest = [(m, c) for m, c in g.terms.items() if m != lm]
        r = dict(self.terms)
        heap = [(_neg_key(m), m) for m in r]
        heap.sort()
        q = {}
        while heap:
            _, m = heappop(heap)
            c = r.pop(m, None)
            if c is None:
                continue
            if not mono_divides(lm, m):
                return None
            qm = m - lm
            qc = c * inv
            q[qm] = qc
            for mg, cg in rest:
                mm = qm + mg
                v = r.get(mm)
                if v is None:
                    r[mm] = -(qc * cg)
                    heappush(heap, (_neg_key(mm), mm))
                else:
                    v = v - qc * cg
                    if v:
                        r[mm] = v
                    else:
                        del r[mm]
        return Poly(q, self.field)

    def monic(self):
        """Scale so the graded-lex leading coefficient is 1."""
        if not self.terms:
            return self
        lc = self.lead_coeff
        if lc == 1:
            return self
        inv = 1 / lc if self.field == 0 else lc.inverse()
        p = Poly({m: c * inv for m, c in self.terms.items()}, self.field)
        p._lead = self._lead
        return p

    # -- substitution helpers ----------------------------------------
    def rename(self, idxmap: dict):
        """Apply an injective variable renaming {old_index: new_index}."""
        out = {}
        for m, c in self.terms.items():
            nm = 0
            for i, e in enumerate(mono_exps(m)):
                if e:
                    nm += e << (W * idxmap.get(i, i))
            out[nm] = c
        if len(out) != len(self.terms):
            raise ValueError("renaming is not injective on this polynomial")
        return Poly(out, self.field)

    def compose(self, images: dict):
        """Substitute Polys for variables: {var_index: Poly}; others fixed."""
        if not images:
            return self
        field = self.field
        powers = {}

        def power(i, e):
            lst = powers.get(i)
            if lst is None:
                lst = powers[i] = [Poly.one(field), images[i]]
            while len(lst) <= e:
                lst.append(lst[-1] * images[i])
            return lst[e]

        acc = {}
        for m, c in self.terms.items():
            fixed = 0
            factors = []
            for i, e in enumerate(mono_exps(m)):
                if not e:
                    continue
                if i in images:
                    factors.append(power(i, e))
                else:
                    fixed += e << (W * i)
            term = Poly({fixed: c}, field)
            for f in sorted(factors, key=len):
                term = term * f
            for tm, tc in term.terms.items():
                v = acc.get(tm)
                acc[tm] = tc if v is None else v + tc
        return Poly({m: c for m, c in acc.items() if c}, field)

    def to_field(self, p: int):
        """Explicit promotion of a rational polynomial into Q(zeta_p)[vars]."""
        if self.field == p:
            return self
        if self.field != 0:
            raise FieldMismatchError("only rational polynomials can be promoted")
        return Poly({m: promote(c, p) for m, c in self.terms.items()}, p)

    # -- comparison -----------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.field == other.field and self.terms == other.terms
        if isinstance(other, int):
            if other == 0:
                return not self.terms
            return self.terms == {0: other}
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.field, frozenset(self.terms.items())))
        return self._hash

    def __repr__(self):
        return f"Poly({format_poly(self)!r})"

    __str__ = lambda self: format_poly(self)


# -- printing ----------------------------------------------------------

def _print_key(m):
    # increasing total degree; lex-descending inside a degree
    e = mono_exps(m)
    return (sum(e),) + tuple(-x for x in e)


def format_mono(m: int) -> str:
    parts = []
    for i, e in enumerate(mono_exps(m)):
        if e == 1:
            parts.append(var_name(i))
        elif e > 1:
            parts.append(f"{var_name(i)}^{e}")
    return "*".join(parts)


def _fmt_rat(q) -> str:
    q = mpq(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def _fmt_cyclo_body(c: Cyclotomic) -> str:
    """Sum-of-powers text for a cyclotomic element with >= 2 nonzero coordinates."""
    out = []
    for k, a in enumerate(c.coeffs):
        if not a:
            continue
        z = "" if k == 0 else (f"zeta({c.p})" if k == 1 else f"zeta({c.p})^{k}")
        mag = _fmt_rat(abs(a))
        if z:
            body = z if mag == "1" else f"{mag}*{z}"
        else:
            body = mag
        if not out:
            out.append(("-" if a < 0 else "") + body)
        else:
            out.append((" - " if a < 0 else " + ") + body)
    return "".join(out)


def _split_coeff(c):
    """(negative?, text-or-None-for-unit) for a coefficient."""
    if isinstance(c, Cyclotomic):
        nz = [(k, a) for k, a in enumerate(c.coeffs) if a]
        if len(nz) == 1:
            k, a = nz[0]
            mag = _fmt_rat(abs(a))
            if k == 0:
                return a < 0, (None if mag == "1" else mag)
            z = f"zeta({c.p})" if k == 1 else f"zeta({c.p})^{k}"
            return a < 0, (z if mag == "1" else f"{mag}*{z}")
        return False, f"({_fmt_cyclo_body(c)})"
    neg = c < 0
    mag = _fmt_rat(abs(c))
    return neg, (None if mag == "1" else mag)


def format_poly(p: Poly) -> str:
    if not p.terms:
        return "0"
    out = []
    for m in sorted(p.terms, key=_print_key):
        neg, ctext = _split_coeff(p.terms[m])
        ms = format_mono(m)
        if ms and ctext:
            body = f"{ctext}*{ms}"
        elif ms:
            body = ms
        else:
            body = ctext if ctext else "1"
        if not out:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)
