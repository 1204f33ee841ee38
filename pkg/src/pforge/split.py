"""Split-case models: symmetric powers of a p-point set, the cyclic split map
onto the Severi-Brauer coordinate field, and diagonal reduced norms."""

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional

from .algebra import Matrix, RatFunc, Substitution, det_fraction_free, is_prime, register, substitute, zeta
from .cn import VerificationError
from .exprio import coerce, print_canonical


def census_cap(long: bool = False) -> int:
    return 7 if long else 5


def _check_prime(p: int, cap: Optional[int]):
    if not isinstance(p, int) or not is_prime(p):
        raise ValueError(f"p = {p!r} is not a prime")
    if cap is not None and p > cap:
        raise ValueError(f"p = {p} exceeds the cap {cap} (use --long)")


# -- symmetric power census -----------------------------------------------

@dataclass(frozen=True)
class FinitePointSet:
    p: int

    def __post_init__(self):
        _check_prime(self.p, None)

    @property
    def labels(self):
        return tuple(range(1, self.p + 1))


@dataclass(frozen=True, order=True)
class MultisetPoint:
    labels: tuple

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(sorted(self.labels)))

    def __add__(self, other: "MultisetPoint") -> "MultisetPoint":
        return MultisetPoint(self.labels + other.labels)

    def is_reduced(self) -> bool:
        return len(set(self.labels)) == len(self.labels)


@dataclass
class CensusReport:
    p: int
    counts: dict
    expected: dict
    u_class: tuple
    fiber: list
    passed: bool

    def to_json(self):
        return {
            "p": self.p,
            "counts": dict(self.counts),
            "expected": dict(self.expected),
            "u_class": list(self.u_class),
            "fiber": [{"point": n, "rest": list(rest)} for n, rest in self.fiber],
            "passed": self.passed,
        }


def sympower_census(p: int, *, cap: Optional[int] = 7) -> CensusReport:
    """Enumerate X^p, its diagonal, S^p(X), the reduced locus U and the fiber over U."""
    _check_prime(p, cap)
    X = FinitePointSet(p)
    total = diagonal = 0
    classes = set()
    for tup in itertools.product(X.labels, repeat=p):
        total += 1
        if len(set(tup)) < p:
            diagonal += 1
        classes.add(MultisetPoint(tup))
    U = sorted(c for c in classes if c.is_reduced())
    # X x S^{p-1}(X) -> S^p(X), (n, m) -> n + m
    fiber = []
    for n in X.labels:
        for rest in itertools.combinations_with_replacement(X.labels, p - 1):
            if (MultisetPoint((n,)) + MultisetPoint(rest)) in U:
                fiber.append((n, rest))
    counts = {
        "tuples": total,
        "off_diagonal": total - diagonal,
        "multisets": len(classes),
        "reduced_classes": len(U),
        "fiber_over_reduced": len(fiber),
    }
    expected = {
        "tuples": p ** p,
        "off_diagonal": math.factorial(p),
        "multisets": math.comb(2 * p - 1, p),
        "reduced_classes": 1,
        "fiber_over_reduced": p,
    }
    u_class = U[0].labels if U else ()
    fiber_ok = sorted(n for n, _ in fiber) == list(X.labels) and all(
        tuple(sorted(set(X.labels) - {n})) == rest for n, rest in fiber
    )
    passed = counts == expected and u_class == X.labels and fiber_ok
    return CensusReport(p, counts, expected, u_class, fiber, passed)


# -- cyclic function field and the split map --------------------------------

class CyclicFunctionField:
    """k(x_0..x_{p-2}) with x_{p-1} = b/(x_0...x_{p-2}) and sigma: x_i -> x_{i+1 mod p}."""

    def __init__(self, p: int, b="b", prefix: str = "x"):
        _check_prime(p, None)
        self.p = p
        self.names = [f"{prefix}{i}" for i in range(p - 1)]
        register(*self.names)
        self.b = coerce(b)
        free = [RatFunc.var(v) for v in self.names]
        prod = RatFunc.one()
        for v in free:
            prod = prod * v
        self.gens = free + [self.b / prod]
        self.sigma = Substitution({v: self.gens[i + 1] for i, v in enumerate(self.names)})

    def x(self, i: int) -> RatFunc:
        return self.gens[i % self.p]

    def act(self, e, times: int = 1) -> RatFunc:
        e = coerce(e)
        for _ in range(times):
            e = substitute(e, self.sigma)
        return e

    def norm(self, u) -> RatFunc:
        """prod_i sigma^i(u)."""
        acc, cur = RatFunc.one(), coerce(u)
        for _ in range(self.p):
            acc = acc * cur
            cur = self.act(cur)
        return acc


@dataclass
class SplitMapReport:
    p: int
    checks: list = field(default_factory=list)
    images: list = field(default_factory=list)
    passed: bool = True

    def to_json(self):
        return {"p": self.p, "checks": list(self.checks), "images": list(self.images), "passed": self.passed}


def _expect(check, got, want, checks):
    if got != want:
        raise VerificationError(check, f"{print_canonical(got)} != {print_canonical(want)}")
    checks.append(check)


def _same_projective_point(u, v) -> bool:
    return all(u[i] * v[j] == u[j] * v[i] for i in range(len(u)) for j in range(i + 1, len(u)))


def sb_split_map(p: int, *, cap: Optional[int] = 7, b="b") -> SplitMapReport:
    """Check the split map T_i = t_i/t_0 -> x_0 x_1 ... x_{i-1} against sigma.

    sigma acts on the coordinates by t_i -> t_{i+1} with t_p = b t_0, so on
    ratios T_i -> T_{i+1}/T_1.
    """
    _check_prime(p, cap)
    L = CyclicFunctionField(p, b)
    T_names = [f"T{i}" for i in range(1, p)]
    register(*T_names)
    # T_0 = 1 and T_p = b as ratios
    T = [RatFunc.one()] + [RatFunc.var(v) for v in T_names] + [L.b]

    def f_image(i):
        acc = RatFunc.one()
        for k in range(i):
            acc = acc * L.x(k)
        return acc

    f = Substitution({T_names[i - 1]: f_image(i) for i in range(1, p)})
    finv = Substitution({v: T[i + 1] / T[i] for i, v in enumerate(L.names)})
    rep = SplitMapReport(p)
    rep.images = [print_canonical(f_image(i)) for i in range(p)]
    checks = rep.checks

    prod = RatFunc.one()
    for i in range(p):
        prod = prod * L.x(i)
    _expect("x_0 ... x_{p-1} = b", prod, L.b, checks)
    for v in L.names:
        _expect(f"sigma^{p}({v}) = {v}", L.act(RatFunc.var(v), p), RatFunc.var(v), checks)
    for i in range(p):
        shifted = T[i + 1] / T[1]  # sigma . (t_i/t_0)
        _expect(f"equivariance at T{i}", substitute(shifted, f), L.act(f_image(i)), checks)
    for i in range(p):
        _expect(f"f(f^-1(sigma^{i}(x))) = sigma^{i}(x)", substitute(substitute(L.x(i), finv), f), L.x(i), checks)
    for i in range(1, p):
        _expect(f"f^-1(f(T{i})) = T{i}", substitute(f_image(i), finv), T[i], checks)

    # shift-with-b matrix on (t_0 : ... : t_{p-1})
    zero, one = RatFunc.zero(), RatFunc.one()
    S = Matrix.from_rows([[L.b if (r == p - 1 and c == 0) else (one if c == r + 1 else zero) for c in range(p)]
                          for r in range(p)])
    point = [f_image(i) for i in range(p)]
    moved = [sum((S[r, c] * point[c] for c in range(p)), RatFunc.zero()) for r in range(p)]
    translated = [L.act(e) for e in point]
    if not _same_projective_point(moved, translated):
        raise VerificationError("projective equivariance", "shifted point differs from the sigma-translate")
    scale = moved[0] / translated[0]
    _expect("common scalar is x_0", scale, L.x(0), checks)
    checks.append("shift matrix sends f(T) to the sigma-translate up to x_0")

    coeffs = [f"u{i}" for i in range(p)]
    register(*coeffs)
    u = sum((RatFunc.var(cf) * L.x(i) for i, cf in enumerate(coeffs)), RatFunc.zero())
    N = L.norm(u)
    _expect("norm of a generic element is sigma-invariant", L.act(N), N, checks)
    return rep


# -- diagonal reduced norms -----------------------------------------------

@dataclass(frozen=True)
class DiagonalAlgebraElement:
    p: int
    entries: tuple

    def __post_init__(self):
        _check_prime(self.p, None)
        ents = tuple(coerce(e, self.p if self.p > 2 else None) for e in self.entries)
        if len(ents) != self.p:
            raise ValueError(f"a diagonal element of M_{self.p} needs {self.p} entries")
        object.__setattr__(self, "entries", ents)

    def __mul__(self, other: "DiagonalAlgebraElement") -> "DiagonalAlgebraElement":
        return DiagonalAlgebraElement(self.p, tuple(a * b for a, b in zip(self.entries, other.entries)))

    def matrix(self) -> Matrix:
        return Matrix.diag(self.entries)


def diagonal_nrd(d: DiagonalAlgebraElement) -> RatFunc:
    prod = RatFunc.one(d.entries[0].field)
    for e in d.entries:
        prod = prod * e
    det = det_fraction_free(d.matrix())
    if det != prod:
        raise VerificationError("Nrd = det", f"{print_canonical(prod)} != {print_canonical(det)}")
    return prod


def distinct_eigenvalues(d: DiagonalAlgebraElement) -> bool:
    ents = d.entries
    return all(ents[i] != ents[j] for i in range(len(ents)) for j in range(i + 1, len(ents)))


def _zeta_rf(p, k):
    z = RatFunc.const(zeta(p), p) if p > 2 else RatFunc.const(-1)
    return z ** (k % p)


def stated_example(p: int, c="c") -> DiagonalAlgebraElement:
    """(c / zeta^((p-1)/2), zeta, ..., zeta^(p-1)) for odd p."""
    if p == 2:
        raise ValueError("the stated example needs an odd prime")
    c = coerce(c, p)
    return DiagonalAlgebraElement(p, (c / _zeta_rf(p, (p - 1) // 2),) + tuple(_zeta_rf(p, k) for k in range(1, p)))


def corrected_witness(p: int, c="c") -> DiagonalAlgebraElement:
    """(c * zeta^-s, zeta, ..., zeta^(p-1)), s = p(p-1)/2 mod p, whose product is c."""
    s = (p * (p - 1) // 2) % p
    c = coerce(c, p if p > 2 else None)
    return DiagonalAlgebraElement(p, (c * _zeta_rf(p, -s),) + tuple(_zeta_rf(p, k) for k in range(1, p)))


@dataclass
class NrdReport:
    p: int
    stated_value: Optional[str]
    stated_equals_c: Optional[bool]
    expected_stated_value: Optional[str]
    witness: list
    witness_value: str
    witness_distinct: bool
    passed: bool

    def to_json(self):
        return dict(self.__dict__)


def nrd_report(p: int, c="c") -> NrdReport:
    cc = coerce(c, p if p > 2 else None)
    stated = stated_equals = expected = None
    if p > 2:
        val = diagonal_nrd(stated_example(p, c))
        stated, stated_equals = print_canonical(val), val == cc
        want = cc * _zeta_rf(p, (p - 1) ** 2 // 2)
        if val != want:
            raise VerificationError("stated example value", f"{stated} != {print_canonical(want)}")
        expected = print_canonical(want)
    w = corrected_witness(p, c)
    wv = diagonal_nrd(w)
    distinct = distinct_eigenvalues(w)
    return NrdReport(p, stated, stated_equals, expected, [print_canonical(e) for e in w.entries],
                     print_canonical(wv), distinct, wv == cc and distinct)
