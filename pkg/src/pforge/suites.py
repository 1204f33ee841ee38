"""Named verification runs shared by the CLI and the acceptance tests.

Each runner returns (ok, result-dict); exceptions signal usage problems
(ValueError) or failed identities (VerificationError and friends).
"""

import os
import random
from dataclasses import dataclass
from typing import Callable

from .algebra import Cyclotomic, Matrix, QQ, RatFunc, char_poly, det_cofactor, register
from .chains import (
    ChainError,
    build_interchange_chain,
    build_scalar_chain,
    dispatch_pequiv_move,
    apply_moves,
    interchange_roundtrip,
    norm_identity,
    theta_reduce,
)
from .cn import (
    CapExceeded,
    VerificationError,
    build_cn,
    build_m,
    format_rank1,
    level_cap,
    rank1_charpoly,
    verify_cn_blockwise,
    verify_cn_steps,
    verify_expansion,
    verify_multiplicativity,
)
from .exprio import coerce, print_canonical
from .qforms import CongruenceError, permutation_matrix, pfister, qform_eval, verify_congruence
from .split import DiagonalAlgebraElement, census_cap, diagonal_nrd, nrd_report, sb_split_map, sympower_census

DEFAULT_SEED = 20240601
# above this level C_n is checked in block form, its entries being too large to expand
EXPANDED_MAX = 3
FAILURES = (VerificationError, ChainError, CongruenceError)


def _env_cap(default: int) -> int:
    env = os.environ.get("PFORGE_CAP_N")
    return int(env) if env else default


def theta_cap(long: bool = False) -> int:
    return _env_cap(3 if long else 2)


def _check_level(n, cap, what="n"):
    if n < 1:
        raise ValueError(f"{what} must be at least 1")
    if n > cap:
        raise CapExceeded(f"{what} = {n} exceeds the cap {cap} (use --long or PFORGE_CAP_N)")


# -- C_n and the quadric identities -----------------------------------------

def run_build_cn(n: int, params=None, long: bool = False):
    cap = level_cap(long)
    _check_level(n, cap)
    if n > EXPANDED_MAX:
        return _block_record(n, params)
    rec = build_cn(n, params, cap=cap)
    verify_multiplicativity(n, rec=rec)
    out = rec.to_json()
    out["checks"] = out["checks"] + ["phi(x)*phi(y) = phi(y*C_n)"]
    return True, out


def _block_record(n, params):
    params = list(params or [f"a{i}" for i in range(1, n + 1)])
    if len(params) != n:
        raise ValueError("need n parameters")
    rep = verify_cn_blockwise(n, params)
    h = 2 ** (n - 1)
    lower = f"C_{n - 1}(x1..x{h})"
    upper = f"C_{n - 1}(x{h + 1}..x{2 * h})"
    b = params[-1]
    xs = [f"x{i}" for i in range(1, 2 * h + 1)]
    s_form = pfister([RatFunc.var(a) for a in params[:-1]])
    s = qform_eval(s_form, [RatFunc.var(v) for v in xs[:h]])
    t = qform_eval(s_form, [RatFunc.var(v) for v in xs[h:]])
    return rep.passed, {
        "n": n,
        "params": params,
        "variables": xs,
        "representation": "blocks",
        "blocks": [[lower, upper], [f"-{b}*{upper}", f"-{upper}*{lower}*{upper}/t"]],
        "c": print_canonical(s - RatFunc.var(b) * t),
        "s": print_canonical(s),
        "t": print_canonical(t),
        "relations": rep.relations,
        "checks": rep.identities,
    }


def run_cn_steps(n: int, long: bool = False):
    cap = level_cap(long)
    _check_level(n, cap)
    if n < 2:
        raise ValueError("proof steps exist for n >= 2")
    rec = build_cn(n, cap=cap)
    steps = verify_cn_steps(n, rec=rec)
    lines = verify_expansion(n, rec=rec)
    ok = all(r.passed for r in steps + lines)
    return ok, {"n": n, "steps": [r.to_json() for r in steps], "expansion": [r.to_json() for r in lines]}


def run_m_record(n: int, long: bool = False):
    # the 7x7 determinant at n = 3 takes tens of seconds
    cap = _env_cap(3 if long else 2)
    _check_level(n, cap)
    rec = build_m(n, cap=max(cap, n))
    return True, rec.to_json()


def _random_rational(rng: random.Random):
    return QQ(rng.randint(-9, 9), rng.randint(1, 5))


def run_rank1(n: int, symbolic: bool = False, seed: int = DEFAULT_SEED, trials: int = 100):
    if symbolic:
        _check_level(n, 5)
        a = [f"a{i}" for i in range(1, n + 1)]
        b = [f"b{i}" for i in range(1, n + 1)]
        register(*[v for pair in zip(a, b) for v in pair], "x")
        cp = rank1_charpoly(a, b)
        return True, {"n": n, "charpoly": format_rank1(n), "expanded": print_canonical(cp)}
    _check_level(n, 4)
    register("x")
    rng = random.Random(seed)
    x = RatFunc.var("x")
    for trial in range(trials):
        a = [RatFunc.const(_random_rational(rng)) for _ in range(n)]
        b = [RatFunc.const(_random_rational(rng)) for _ in range(n)]
        cp = rank1_charpoly(a, b)
        R = Matrix(n, n, [a[i] * b[j] for i in range(n) for j in range(n)])
        oracle = det_cofactor(Matrix.identity(n).scalar_mul(x) - R)
        if cp != oracle or cp != char_poly(R):
            raise VerificationError("cofactor oracle", f"trial {trial}: {print_canonical(cp)} != {print_canonical(oracle)}")
    return True, {"n": n, "trials": trials, "seed": seed}


def run_theta(n: int, long: bool = False):
    _check_level(n, theta_cap(long))
    return True, theta_reduce(n).to_json()


def run_norm_identity(n: int, long: bool = False):
    _check_level(n, theta_cap(long))
    return True, norm_identity(n).to_json()


# -- chains -------------------------------------------------------------------

def _dim_to_level(dim: int, long: bool):
    cap = 8 if long else 4
    if dim not in (2, 4, 8, 16) or dim > cap:
        raise ValueError(f"dim must be a power of two in [2, {cap}] (dim 8 needs --long)")
    return dim.bit_length() - 1


def run_interchange(dim: int = 2, b: str = "b", c: str = "c", long: bool = False):
    m = _dim_to_level(dim, long)
    params = [f"a{i}" for i in range(1, m + 1)]
    register(*params, "b", "c")
    # building certifies every step and the composite
    chain = build_interchange_chain(params, b, c)
    out = {"dim": dim, "chain": chain.to_json()}
    if dim > 4:
        # the composed round-trip substitution has entries too large to expand
        out["roundtrip"] = None
    else:
        rt, renamed = interchange_roundtrip(params, b, c, first=chain)
        out["roundtrip"] = {
            "steps": len(rt.steps),
            "multiplier": print_canonical(renamed.multiplier),
            "nonzero": not renamed.multiplier.is_zero(),
        }
    return True, out


def run_scalar(dim: int = 2, b: str = "b", x0=None, long: bool = False):
    m = _dim_to_level(dim, long)
    params = [f"a{i}" for i in range(1, m + 1)]
    register(*params, "b")
    chain = build_scalar_chain(params, b, x0)
    return True, {"dim": dim, "chain": chain.to_json()}


def swap_witness(a, b):
    """<<a, b>> -> <<b, a>> by exchanging the two middle slots."""
    return verify_congruence(permutation_matrix([0, 2, 1, 3]), pfister([a, b]), pfister([b, a]))


def scaled_witness(a, b):
    """<<a, b>> -> <<a, -a*b>>: <1,-a,-b,ab> to <1,-a,ab,-a^2*b>."""
    a, b = coerce(a), coerce(b)
    zero, one = RatFunc.zero(), RatFunc.one()
    C = Matrix.from_rows([
        [one, zero, zero, zero],
        [zero, one, zero, zero],
        [zero, zero, zero, one],
        [zero, zero, a, zero],
    ])
    return verify_congruence(C, pfister([a, b]), pfister([a, -a * b]))


def run_dispatch(presentation, i: int, j: int, witness, long: bool = False):
    moves = dispatch_pequiv_move(presentation, i, j, witness, verify_dim=8 if long else 4)
    final = apply_moves(presentation, moves)
    return True, {
        "presentation": [print_canonical(coerce(a)) for a in presentation],
        "step": [i, j],
        "moves": [m.to_json() for m in moves],
        "final_presentation": [print_canonical(a) for a in final],
    }


# -- split models -------------------------------------------------------------

def run_census(p: int, long: bool = False):
    rep = sympower_census(p, cap=census_cap(long))
    return rep.passed, rep.to_json()


def run_sb_map(p: int, long: bool = False):
    rep = sb_split_map(p, cap=census_cap(long))
    return rep.passed, rep.to_json()


def _random_cyclotomic(p, rng):
    return Cyclotomic(p, [_random_rational(rng) for _ in range(p - 1)])


def run_nrd(p: int, seed: int = DEFAULT_SEED, trials: int = 100):
    if p not in (2, 3, 5, 7):
        raise ValueError("p must be one of 2, 3, 5, 7")
    rep = nrd_report(p)
    rng = random.Random(seed)
    for _ in range(trials if p > 2 else 0):
        d = DiagonalAlgebraElement(p, tuple(RatFunc.const(_random_cyclotomic(p, rng), p) for _ in range(p)))
        e = DiagonalAlgebraElement(p, tuple(RatFunc.const(_random_cyclotomic(p, rng), p) for _ in range(p)))
        if diagonal_nrd(d * e) != diagonal_nrd(d) * diagonal_nrd(e):
            raise VerificationError("Nrd multiplicativity")
    out = rep.to_json()
    out["random_trials"] = trials if p > 2 else 0
    out["seed"] = seed
    return rep.passed, out


# -- reproduce suites ---------------------------------------------------------

@dataclass
class SuiteRow:
    check: str
    passed: bool
    detail: str = ""

    def to_json(self):
        return {"check": self.check, "passed": self.passed, "detail": self.detail}


def _row(name: str, fn: Callable):
    try:
        ok, _ = fn()
        return SuiteRow(name, bool(ok))
    except FAILURES as exc:
        return SuiteRow(name, False, str(exc))


def _suite_lemma_cn(long, seed):
    top = 4 if long else 3
    rows = [_row(f"C_{n} identities and multiplicativity", lambda n=n: run_build_cn(n, long=long)) for n in range(1, top + 1)]
    rows += [_row(f"C_{n} proof steps and expansion", lambda n=n: run_cn_steps(n, long=long)) for n in range(2, min(top, 3) + 1)]
    return rows


def _suite_theorem(long, seed):
    top = 3 if long else 2
    rows = []
    for n in range(1, top + 1):
        rows.append(_row(f"theta reduction n={n}", lambda n=n: run_theta(n, long)))
        rows.append(_row(f"norm identity n={n}", lambda n=n: run_norm_identity(n, long)))
        rows.append(_row(f"M record n={n}", lambda n=n: run_m_record(n, long)))
    for n in range(1, 6):
        rows.append(_row(f"rank-1 charpoly n={n}", lambda n=n: run_rank1(n, symbolic=True)))
    for n in range(1, 5):
        rows.append(_row(f"rank-1 cofactor oracle n={n}", lambda n=n: run_rank1(n, seed=seed)))
    return rows


def _suite_lemmas(long, seed):
    dims = (2, 4, 8) if long else (2, 4)
    rows = []
    for d in dims:
        rows.append(_row(f"interchange chain dim {d}", lambda d=d: run_interchange(d, long=long)))
        rows.append(_row(f"scalar chain dim {d}", lambda d=d: run_scalar(d, long=long)))
    register("u1", "u2")
    rows.append(_row("scalar chain at x0 = (u1, u2, 0, 0)",
                     lambda: run_scalar(4, x0=["u1", "u2", "0", "0"], long=long)))
    return rows


def _suite_prop(long, seed):
    rows = []
    sizes = (3, 4) if long else (3,)
    for n in sizes:
        pres = [f"a{k}" for k in range(1, n + 1)]
        register(*pres)
        for i, j in ((1, 2), (1, n), (n - 1, n)):
            for label, wit in (("swap", swap_witness), ("scaled", scaled_witness)):
                def go(i=i, j=j, wit=wit, pres=pres):
                    ok, out = run_dispatch(pres, i, j, wit(pres[i - 1], pres[j - 1]), long)
                    expected = {(1, 2): 1, (n - 1, n): 5}.get((i, j), 3)
                    if len(out["moves"]) != expected:
                        raise VerificationError("move count", f"{len(out['moves'])} != {expected}")
                    return ok, out

                rows.append(_row(f"n={n} step ({i},{j}) {label} witness", go))
    return rows


def _suite_remark(long, seed):
    ps = (2, 3, 5, 7) if long else (2, 3, 5)
    return [_row(f"census p={p}", lambda p=p: run_census(p, long)) for p in ps]


def _suite_sb(long, seed):
    ps = (2, 3, 5, 7) if long else (2, 3, 5)
    return [_row(f"split map p={p}", lambda p=p: run_sb_map(p, long)) for p in ps]


def _suite_nrd(long, seed):
    return [_row(f"diagonal Nrd p={p}", lambda p=p: run_nrd(p, seed)) for p in (2, 3, 5)]


SUITES = {
    "lemma-cn": _suite_lemma_cn,
    "theorem-quadric": _suite_theorem,
    "lemmas-34-35": _suite_lemmas,
    "prop-36": _suite_prop,
    "remark-21": _suite_remark,
    "thm-41": _suite_sb,
    "thm-43": _suite_nrd,
}


def run_suite(name: str, long: bool = False, seed: int = DEFAULT_SEED):
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}")
    rows = SUITES[name](long, seed)
    return all(r.passed for r in rows), {"suite": name, "rows": [r.to_json() for r in rows]}
