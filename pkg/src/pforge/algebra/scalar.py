"""Exact scalars: rationals (gmpy2.mpq) and elements of Q(zeta_p).

A cyclotomic element is stored in the power basis 1, t, ..., t^(p-2) of
Q[t]/Phi_p(t), Phi_p = 1 + t + ... + t^(p-1).  Rationals and cyclotomic
elements never mix implicitly; use `promote`.  Plain Python ints are accepted
everywhere since Z embeds canonically in both.
"""

from fractions import Fraction
from functools import lru_cache
import operator

from gmpy2 import mpq

__all__ = [
    "mpq",
    "Cyclotomic",
    "FieldMismatchError",
    "QQ",
    "field_of",
    "is_prime",
    "promote",
    "scalar_arith",
    "zeta",
]


class FieldMismatchError(TypeError):
    """Operands live in different coefficient fields."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def QQ(num, den=1) -> mpq:
    if isinstance(num, Cyclotomic) or isinstance(den, Cyclotomic):
        raise FieldMismatchError("QQ() takes rational input only")
    if isinstance(num, Fraction):
        num = mpq(num.numerator, num.denominator)
    if isinstance(den, Fraction):
        den = mpq(den.numerator, den.denominator)
    if den == 0:
        raise ZeroDivisionError("rational with zero denominator")
    return mpq(num) / mpq(den)


class Cyclotomic:
    """Element of Q(zeta_p) in the power basis modulo Phi_p."""

    __slots__ = ("p", "coeffs", "_hash")

    def __init__(self, p: int, coeffs):
        coeffs = tuple(mpq(c) if not isinstance(c, Fraction) else QQ(c) for c in coeffs)
        if len(coeffs) > p:
            raise ValueError("too many coefficients")
        # Coefficients of t^0..t^(p-1) are accepted; fold t^(p-1) via Phi_p.
        c = list(coeffs) + [mpq(0)] * (p - len(coeffs))
        top = c[p - 1]
        if top:
            c = [ci - top for ci in c[: p - 1]]
        else:
            c = c[: p - 1]
        self.p = p
        self.coeffs = tuple(c)
        self._hash = None

    @classmethod
    def _raw(cls, p, coeffs):
        obj = object.__new__(cls)
        obj.p = p
        obj.coeffs = coeffs
        obj._hash = None
        return obj

    @classmethod
    def from_int(cls, p, n):
        return cls._raw(p, (mpq(n),) + (mpq(0),) * (p - 2))

    # -- predicates -----------------------------------------------------
    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __bool__(self):
        return not self.is_zero()

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def _coerce(self, other):
        if isinstance(other, Cyclotomic):
            if other.p != self.p:
                raise FieldMismatchError(f"Q(zeta_{self.p}) vs Q(zeta_{other.p})")
            return other
        if isinstance(other, int):
            return Cyclotomic.from_int(self.p, other)
        if isinstance(other, (Fraction, type(mpq(0)))):
            raise FieldMismatchError("rational operand needs explicit promote() into Q(zeta_p)")
        return NotImplemented

    # -- arithmetic -----------------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Cyclotomic._raw(self.p, tuple(map(operator.add, self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return Cyclotomic._raw(self.p, tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Cyclotomic._raw(self.p, tuple(map(operator.sub, self.coeffs, o.coeffs)))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        if isinstance(other, int):
            return Cyclotomic._raw(self.p, tuple(c * other for c in self.coeffs))
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        p = self.p
        prod = [mpq(0)] * p
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j, b in enumerate(o.coeffs):
                if b:
                    k = i + j
                    if k >= p:
                        k -= p
                    prod[k] += a * b
        top = prod[p - 1]
        if top:
            return Cyclotomic._raw(p, tuple(c - top for c in prod[: p - 1]))
        return Cyclotomic._raw(p, tuple(prod[: p - 1]))

    __rmul__ = __mul__

    def conjugate(self, k: int) -> "Cyclotomic":
        """Image under the Galois automorphism zeta -> zeta^k (k prime to p)."""
        p = self.p
        out = [mpq(0)] * p
        for i, a in enumerate(self.coeffs):
            if a:
                out[(i * k) % p] += a
        return Cyclotomic(p, out)

    def norm(self) -> mpq:
        """Field norm to Q: product of all p-1 conjugates."""
        acc = self
        for k in range(2, self.p):
            acc = acc * self.conjugate(k)
        assert acc.is_rational()
        return acc.coeffs[0]

    def inverse(self) -> "Cyclotomic":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in Q(zeta_p)")
        rest = Cyclotomic.from_int(self.p, 1)
        for k in range(2, self.p):
            rest = rest * self.conjugate(k)
        n = (self * rest).coeffs[0]
        return Cyclotomic._raw(self.p, tuple(c / n for c in rest.coeffs))

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        acc = Cyclotomic.from_int(self.p, 1)
        base = self
        while e:
            if e & 1:
                acc = acc * base
            e >>= 1
            if e:
                base = base * base
        return acc

    # -- comparison -----------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, Cyclotomic):
            return self.p == other.p and self.coeffs == other.coeffs
        if isinstance(other, int):
            return self.is_rational() and self.coeffs[0] == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(("zeta", self.p, self.coeffs))
        return self._hash

    def __repr__(self):
        return f"Cyclotomic({self.p}, {[str(c) for c in self.coeffs]})"


@lru_cache(maxsize=None)
def zeta(p: int, k: int = 1) -> Cyclotomic:
    """zeta_p ** k."""
    if not is_prime(p):
        raise ValueError(f"zeta({p}): p must be prime")
    c = [0] * p
    c[k % p] = 1
    return Cyclotomic(p, c)


def promote(x, p: int) -> Cyclotomic:
    """Explicit embedding Q -> Q(zeta_p)."""
    if isinstance(x, Cyclotomic):
        if x.p != p:
            raise FieldMismatchError(f"cannot promote Q(zeta_{x.p}) element to Q(zeta_{p})")
        return x
    q = QQ(x)
    return Cyclotomic._raw(p, (q,) + (mpq(0),) * (p - 2))


def field_of(x) -> int:
    """0 for rationals, p for Q(zeta_p)."""
    return x.p if isinstance(x, Cyclotomic) else 0


_OPS = {"add": operator.add, "sub": operator.sub, "mul": operator.mul, "div": operator.truediv}


def scalar_arith(a, b, op: str):
    if op not in _OPS:
        raise ValueError(f"unknown op {op!r}")
    fa, fb = field_of(a), field_of(b)
    if fa != fb and not (isinstance(a, int) or isinstance(b, int)):
        raise FieldMismatchError(f"mixed fields: {fa} vs {fb}")
    if fa == 0 and fb == 0:
        a, b = QQ(a), QQ(b)
    if op == "div" and b == 0:
        raise ZeroDivisionError("scalar division by zero")
    return _OPS[op](a, b)
