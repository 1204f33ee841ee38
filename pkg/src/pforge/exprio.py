"""Expression text <-> RatFunc, plus the JSON fixture encoding.

Grammar (loosest to tightest binding):

    sum    := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' INT)*
    atom   := INT | NAME | 'zeta' '(' INT ')' | '(' sum ')'

so ``-x^2`` is ``-(x^2)``.  Names start with a letter and continue with
letters, digits or underscores; they are registered as variables in the order
they first appear.
"""

from dataclasses import dataclass

from .algebra.poly import Poly, format_poly, mono_exps
from .algebra.ratfunc import RatFunc, Substitution
from .algebra.matrix import Matrix
from .algebra.scalar import is_prime, zeta
from .algebra.variables import is_valid_name, var_index, var_name


class ExprSyntaxError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at byte {offset}")
        self.offset = offset
        self.message = message


class ExprValueError(ValueError):
    """Well-formed expression that cannot be lowered (division by zero, mixed zeta orders)."""


# -- AST ------------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: int


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Zeta:
    p: int
    offset: int = 0


@dataclass(frozen=True)
class Neg:
    operand: object


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object
    offset: int = 0


@dataclass(frozen=True)
class Pow:
    base: object
    exp: int


# -- lexer ----------------------------------------------------------------

def _tokenize(text: str):
    toks = []
    i = 0
    n = len(text)
    byte = 0
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            byte += len(ch.encode())
            continue
        start = byte
        if ch.isascii() and ch.isdigit():
            j = i
            while j < n and text[j].isascii() and text[j].isdigit():
                j += 1
            toks.append(("int", int(text[i:j]), start))
        elif ch.isascii() and ch.isalpha():
            j = i
            while j < n and text[j].isascii() and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append(("name", text[i:j], start))
        elif ch in "+-*/^()":
            j = i + 1
            toks.append((ch, ch, start))
        else:
            raise ExprSyntaxError(f"unexpected character {ch!r}", start)
        byte += len(text[i:j].encode())
        i = j
    toks.append(("end", None, byte))
    return toks


class _Parser:
    def __init__(self, text):
        self.toks = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.toks[self.pos]

    def next(self):
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def expect(self, kind, what):
        t = self.next()
        if t[0] != kind:
            raise ExprSyntaxError(f"expected {what}", t[2])
        return t

    def parse(self):
        node = self.sum()
        t = self.peek()
        if t[0] != "end":
            raise ExprSyntaxError(f"unexpected {t[1]!r}", t[2])
        return node

    def sum(self):
        left = self.term()
        while self.peek()[0] in ("+", "-"):
            op, _, off = self.next()
            left = BinOp(op, left, self.term(), off)
        return left

    def term(self):
        left = self.unary()
        while self.peek()[0] in ("*", "/"):
            op, _, off = self.next()
            left = BinOp(op, left, self.unary(), off)
        return left

    def unary(self):
        if self.peek()[0] == "-":
            self.next()
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        while self.peek()[0] == "^":
            self.next()
            t = self.next()
            if t[0] != "int":
                raise ExprSyntaxError("exponent must be a non-negative integer literal", t[2])
            base = Pow(base, t[1])
        return base

    def atom(self):
        kind, val, off = self.next()
        if kind == "int":
            return Num(val)
        if kind == "name":
            if val == "zeta":
                self.expect("(", "'(' after zeta")
                t = self.expect("int", "prime order in zeta(p)")
                self.expect(")", "')'")
                if not is_prime(t[1]):
                    raise ExprSyntaxError(f"zeta({t[1]}): order must be a prime >= 2", t[2])
                return Zeta(t[1], off)
            if not is_valid_name(val):
                raise ExprSyntaxError(f"invalid name {val!r}", off)
            var_index(val)
            return Var(val)
        if kind == "(":
            node = self.sum()
            self.expect(")", "')'")
            return node
        if kind == "end":
            raise ExprSyntaxError("unexpected end of input, expected an operand", off)
        raise ExprSyntaxError(f"expected an operand, got {val!r}", off)


def parse_expr(text: str):
    """Parse text into an AST; variables are registered as they appear."""
    return _Parser(text).parse()


# -- lowering -------------------------------------------------------------

def _zeta_orders(node, acc):
    if isinstance(node, Zeta):
        acc.add(node.p)
    elif isinstance(node, Neg):
        _zeta_orders(node.operand, acc)
    elif isinstance(node, BinOp):
        _zeta_orders(node.left, acc)
        _zeta_orders(node.right, acc)
    elif isinstance(node, Pow):
        _zeta_orders(node.base, acc)
    return acc


def _lower(node, field):
    if isinstance(node, Num):
        return RatFunc.const(node.value, field)
    if isinstance(node, Var):
        return RatFunc.var(node.name, field)
    if isinstance(node, Zeta):
        return RatFunc.const(zeta(node.p), field)
    if isinstance(node, Neg):
        return -_lower(node.operand, field)
    if isinstance(node, Pow):
        return _lower(node.base, field) ** node.exp
    left, right = _lower(node.left, field), _lower(node.right, field)
    if node.op == "+":
        return left + right
    if node.op == "-":
        return left - right
    if node.op == "*":
        return left * right
    if right.is_zero():
        raise ExprValueError(f"division by an expression that is identically zero (byte {node.offset})")
    return left / right


def field_of_ast(node) -> int:
    orders = _zeta_orders(node, set())
    if len(orders) > 1:
        raise ExprValueError(f"mixed zeta orders {sorted(orders)}")
    return orders.pop() if orders else 0


def lower(ast, field=None) -> RatFunc:
    """AST -> canonical RatFunc over Q, or over Q(zeta_p) if zeta(p) occurs."""
    f = field_of_ast(ast)
    if field is None:
        field = f
    elif f and f != field:
        raise ExprValueError(f"zeta({f}) in a Q(zeta_{field}) document")
    return _lower(ast, field)


def parse(text: str, field=None) -> RatFunc:
    return lower(parse_expr(text), field)


def coerce(x, field=None) -> RatFunc:
    """Accept RatFunc, Poly, int, or expression text."""
    if isinstance(x, RatFunc):
        return x
    if isinstance(x, str):
        return parse(x, field)
    if isinstance(x, Poly):
        return RatFunc.from_poly(x)
    return RatFunc.const(x, field)


# -- printing -------------------------------------------------------------

def _is_atom_power(p) -> bool:
    if len(p.terms) != 1:
        return False
    (m, c), = p.terms.items()
    if c != 1:
        return False
    return sum(1 for e in mono_exps(m) if e) == 1


def print_canonical(e: RatFunc) -> str:
    """Deterministic text; increasing degree, lex-descending within a degree."""
    num = format_poly(e.num)
    if e.den.is_one():
        return num
    if len(e.num.terms) > 1:
        num = f"({num})"
    den = format_poly(e.den)
    if not _is_atom_power(e.den):
        den = f"({den})"
    return f"{num}/{den}"


def print_expr(e) -> str:
    return print_canonical(coerce(e))


# -- JSON encoding --------------------------------------------------------

def matrix_to_json(M: Matrix):
    return [[print_canonical(e) for e in M.row(i)] for i in range(M.rows)]


def matrix_from_json(rows, field=None) -> Matrix:
    return Matrix.from_rows([[parse(s, field) for s in row] for row in rows])


def form_to_json(diag, pfister_params=None):
    return {
        "diag": [print_canonical(d) for d in diag],
        "pfister_params": None if pfister_params is None else [print_canonical(a) for a in pfister_params],
    }


def substitution_to_json(s: Substitution):
    return {name: print_canonical(e) for name, e in s.items_named()}


def substitution_from_json(obj, field=None) -> Substitution:
    for name in obj:
        if not is_valid_name(name):
            raise ExprSyntaxError(f"invalid variable name {name!r}", 0)
    return Substitution({name: parse(text, field) for name, text in obj.items()})


__all__ = [
    "BinOp", "ExprSyntaxError", "ExprValueError", "Neg", "Num", "Pow", "Var", "Zeta",
    "coerce", "field_of_ast", "form_to_json", "lower", "matrix_from_json", "matrix_to_json",
    "parse", "parse_expr", "print_canonical", "print_expr", "substitution_from_json",
    "substitution_to_json", "var_name",
]
