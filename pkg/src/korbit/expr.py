"""A small symbolic expression language over q_a, p_a, l_A.

Expressions are immutable trees kept in a canonical form: sums and products
are flattened, constants folded, like terms and equal bases merged, products
expanded over sums and factors sorted by a fixed node order.  This is not a
full normal form (no trigonometric identities, no rational-function
simplification) but it is enough for polynomial cancellation to be exact.

Quotients ``a/b`` are stored as ``a * b^-1``.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | factor
    factor := base ('^' '-'? INT)?
    base   := NUMBER | 'i' | ident | func '(' expr ')' | '(' expr ')'
    ident  := ('q' | 'p' | 'l') DIGIT        (index 1..9)
    func   := 'exp' | 'sin' | 'cos'
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Union

import numpy as np

from .exact import fraction_str, to_fraction

MAX_INDEX = 9
VAR_KINDS = ("q", "p", "l")
FUNCTIONS = ("exp", "sin", "cos")


class ExprError(ValueError):
    pass


class ExprSyntaxError(ExprError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class UnboundVariableError(ExprError):
    pass


class EvaluationError(ExprError):
    pass


class Expr:
    """Base node.  Arithmetic operators build canonical expressions."""

    __slots__ = ()

    def __add__(self, other):
        return add(self, _coerce(other))

    def __radd__(self, other):
        return add(_coerce(other), self)

    def __sub__(self, other):
        return add(self, mul(Const(Fraction(-1)), _coerce(other)))

    def __rsub__(self, other):
        return add(_coerce(other), mul(Const(Fraction(-1)), self))

    def __mul__(self, other):
        return mul(self, _coerce(other))

    def __rmul__(self, other):
        return mul(_coerce(other), self)

    def __truediv__(self, other):
        return mul(self, power(_coerce(other), -1))

    def __rtruediv__(self, other):
        return mul(_coerce(other), power(self, -1))

    def __neg__(self):
        return mul(Const(Fraction(-1)), self)

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise ExprError("only integer powers are supported")
        return power(self, n)

    def __str__(self):
        return to_string(self)


@dataclass(frozen=True, eq=True)
class Const(Expr):
    value: Fraction

    def __post_init__(self):
        if not isinstance(self.value, Fraction):
            object.__setattr__(self, "value", to_fraction(self.value))


@dataclass(frozen=True, eq=True)
class ImagUnit(Expr):
    pass


I = ImagUnit()


@dataclass(frozen=True, eq=True)
class Var(Expr):
    kind: str
    index: int  # 1-based, as written

    def __post_init__(self):
        if self.kind not in VAR_KINDS or not 1 <= self.index <= MAX_INDEX:
            raise ExprError(f"invalid variable {self.kind}{self.index}")

    @property
    def name(self) -> str:
        return f"{self.kind}{self.index}"


@dataclass(frozen=True, eq=True)
class Add(Expr):
    terms: tuple


@dataclass(frozen=True, eq=True)
class Mul(Expr):
    factors: tuple


@dataclass(frozen=True, eq=True)
class Pow(Expr):
    base: Expr
    exp: int


@dataclass(frozen=True, eq=True)
class Func(Expr):
    name: str
    arg: Expr


ZERO = Const(Fraction(0))
ONE = Const(Fraction(1))


def q(a: int) -> Var:
    return Var("q", a)


def p(a: int) -> Var:
    return Var("p", a)


def lam(a: int) -> Var:
    return Var("l", a)


def const(value) -> Expr:
    """Constant from an int, Fraction, float or complex (floats kept exactly)."""
    if isinstance(value, Expr):
        return value
    if isinstance(value, complex) or isinstance(value, np.complexfloating):
        re_, im_ = Fraction(float(value.real)), Fraction(float(value.imag))
        return add(Const(re_), mul(Const(im_), I))
    if isinstance(value, (float, np.floating)):
        return Const(Fraction(float(value)))
    return Const(to_fraction(value))


def _coerce(x) -> Expr:
    return x if isinstance(x, Expr) else const(x)


# ---------------------------------------------------------------------------
# canonical constructors
# ---------------------------------------------------------------------------

_KIND_ORDER = {k: i for i, k in enumerate(VAR_KINDS)}


def sort_key(e: Expr) -> tuple:
    if isinstance(e, Const):
        return (0, e.value)
    if isinstance(e, ImagUnit):
        return (1,)
    if isinstance(e, Var):
        return (2, _KIND_ORDER[e.kind], e.index)
    if isinstance(e, Pow):
        return (3, sort_key(e.base), e.exp)
    if isinstance(e, Func):
        return (4, e.name, sort_key(e.arg))
    if isinstance(e, Mul):
        return (5, tuple(sort_key(f) for f in e.factors))
    if isinstance(e, Add):
        return (6, tuple(sort_key(t) for t in e.terms))
    raise TypeError(f"not an expression node: {e!r}")


def _split_term(t: Expr) -> tuple[Fraction, tuple]:
    if isinstance(t, Const):
        return t.value, ()
    if isinstance(t, Mul) and isinstance(t.factors[0], Const):
        return t.factors[0].value, t.factors[1:]
    if isinstance(t, Mul):
        return Fraction(1), t.factors
    return Fraction(1), (t,)


def _build_term(c: Fraction, rest: tuple) -> Expr:
    if not rest:
        return Const(c)
    if c == 1:
        return rest[0] if len(rest) == 1 else Mul(rest)
    return Mul((Const(c),) + rest)


def add(*terms: Expr) -> Expr:
    flat: list[Expr] = []
    for t in terms:
        t = _coerce(t)
        flat.extend(t.terms if isinstance(t, Add) else (t,))
    acc: dict[tuple, Fraction] = {}
    for t in flat:
        c, rest = _split_term(t)
        acc[rest] = acc.get(rest, Fraction(0)) + c
    items = [(rest, c) for rest, c in acc.items() if c != 0]
    items.sort(key=lambda rc: tuple(sort_key(f) for f in rc[0]))
    out = [_build_term(c, rest) for rest, c in items]
    if not out:
        return ZERO
    return out[0] if len(out) == 1 else Add(tuple(out))


def mul(*factors: Expr) -> Expr:
    flat: list[Expr] = []
    for f in factors:
        f = _coerce(f)
        flat.extend(f.factors if isinstance(f, Mul) else (f,))
    sums = [f for f in flat if isinstance(f, Add)]
    if sums:
        others = [f for f in flat if not isinstance(f, Add)]
        expanded: list[Expr] = [mul(*others)] if others else [ONE]
        for s in sums:
            expanded = [mul(a, b) for a in expanded for b in s.terms]
        return add(*expanded)
    c = Fraction(1)
    n_i = 0
    powers: dict[Expr, int] = {}
    order: list[Expr] = []
    for f in flat:
        if isinstance(f, Const):
            c *= f.value
        elif isinstance(f, ImagUnit):
            n_i += 1
        else:
            base, e = (f.base, f.exp) if isinstance(f, Pow) else (f, 1)
            if base not in powers:
                order.append(base)
                powers[base] = 0
            powers[base] += e
    n_i %= 4
    if n_i >= 2:
        c = -c
        n_i -= 2
    if c == 0:
        return ZERO
    rest: list[Expr] = [I] if n_i else []
    regrow: list[Expr] = []
    for base in order:
        e = powers[base]
        if e == 0:
            continue
        if isinstance(base, Add) and e > 0:
            regrow.append(power(base, e))
        else:
            rest.append(base if e == 1 else Pow(base, e))
    if regrow:
        return mul(Const(c), *rest, *regrow)
    rest.sort(key=sort_key)
    return _build_term(c, tuple(rest))


def power(base: Expr, n: int) -> Expr:
    base = _coerce(base)
    if n == 0:
        return ONE
    if n == 1:
        return base
    if isinstance(base, Const):
        if base.value == 0 and n < 0:
            raise EvaluationError("division by zero")
        return Const(base.value ** n)
    if isinstance(base, ImagUnit):
        return mul(*([I] * (n % 4)))
    if isinstance(base, Mul):
        return mul(*(power(f, n) for f in base.factors))
    if isinstance(base, Pow):
        return power(base.base, base.exp * n)
    if isinstance(base, Add) and n > 0:
        return mul(*([base] * n))
    return Pow(base, n)


def func(name: str, arg: Expr) -> Expr:
    if name not in FUNCTIONS:
        raise ExprError(f"unknown function {name!r}")
    arg = _coerce(arg)
    if arg == ZERO:
        return ZERO if name == "sin" else ONE
    return Func(name, arg)


def exp(arg) -> Expr:
    return func("exp", arg)


def sin(arg) -> Expr:
    return func("sin", arg)


def cos(arg) -> Expr:
    return func("cos", arg)


def canonical(e: Expr) -> Expr:
    """Rebuild ``e`` through the canonical constructors."""
    if isinstance(e, (Const, ImagUnit, Var)):
        return e
    if isinstance(e, Add):
        return add(*(canonical(t) for t in e.terms))
    if isinstance(e, Mul):
        return mul(*(canonical(f) for f in e.factors))
    if isinstance(e, Pow):
        return power(canonical(e.base), e.exp)
    if isinstance(e, Func):
        return func(e.name, canonical(e.arg))
    raise TypeError(e)


# ---------------------------------------------------------------------------
# calculus
# ---------------------------------------------------------------------------

def differentiate(e: Expr, v: Var) -> Expr:
    if isinstance(e, (Const, ImagUnit)):
        return ZERO
    if isinstance(e, Var):
        return ONE if e == v else ZERO
    if isinstance(e, Add):
        return add(*(differentiate(t, v) for t in e.terms))
    if isinstance(e, Mul):
        fs = e.factors
        return add(*(mul(*fs[:i], differentiate(f, v), *fs[i + 1:]) for i, f in enumerate(fs)))
    if isinstance(e, Pow):
        return mul(Const(Fraction(e.exp)), power(e.base, e.exp - 1), differentiate(e.base, v))
    if isinstance(e, Func):
        du = differentiate(e.arg, v)
        if e.name == "exp":
            return mul(e, du)
        if e.name == "sin":
            return mul(cos(e.arg), du)
        return mul(Const(Fraction(-1)), sin(e.arg), du)
    raise TypeError(e)


def free_vars(e: Expr) -> frozenset:
    if isinstance(e, Var):
        return frozenset((e,))
    if isinstance(e, (Const, ImagUnit)):
        return frozenset()
    if isinstance(e, Add):
        return frozenset().union(*(free_vars(t) for t in e.terms))
    if isinstance(e, Mul):
        return frozenset().union(*(free_vars(f) for f in e.factors))
    if isinstance(e, Pow):
        return free_vars(e.base)
    return free_vars(e.arg)


def degree_in(e: Expr, v: Var):
    """Polynomial degree of ``e`` in ``v``; None when ``v`` enters non-polynomially."""
    if v not in free_vars(e):
        return 0
    if isinstance(e, Var):
        return 1
    if isinstance(e, Add):
        ds = [degree_in(t, v) for t in e.terms]
        return None if None in ds else max(ds)
    if isinstance(e, Mul):
        ds = [degree_in(f, v) for f in e.factors]
        return None if None in ds else sum(ds)
    if isinstance(e, Pow):
        d = degree_in(e.base, v)
        return None if d is None or e.exp < 0 else d * e.exp
    return None


def substitute(e: Expr, mapping: Mapping[Var, Expr]) -> Expr:
    if isinstance(e, Var):
        return _coerce(mapping[e]) if e in mapping else e
    if isinstance(e, (Const, ImagUnit)):
        return e
    if isinstance(e, Add):
        return add(*(substitute(t, mapping) for t in e.terms))
    if isinstance(e, Mul):
        return mul(*(substitute(f, mapping) for f in e.factors))
    if isinstance(e, Pow):
        return power(substitute(e.base, mapping), e.exp)
    return func(e.name, substitute(e.arg, mapping))


def poisson_bracket(f: Expr, g: Expr, n_pairs: int) -> Expr:
    """{f, g} = sum_a (df/dq_a dg/dp_a - df/dp_a dg/dq_a)."""
    if n_pairs < 1:
        raise ValueError("n_pairs must be >= 1")
    terms = []
    for a in range(1, n_pairs + 1):
        terms.append(mul(differentiate(f, q(a)), differentiate(g, p(a))))
        terms.append(mul(Const(Fraction(-1)), differentiate(f, p(a)), differentiate(g, q(a))))
    return add(*terms)


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

Binding = Mapping[Union[Var, str], object]

_NP_FUNCS = {"exp": np.exp, "sin": np.sin, "cos": np.cos}


def _lookup(binding: Binding, v: Var):
    if v in binding:
        return binding[v]
    if v.name in binding:
        return binding[v.name]
    raise UnboundVariableError(f"unbound variable {v.name}")


def _eval(e: Expr, b: Binding):
    if isinstance(e, Const):
        return complex(float(e.value))
    if isinstance(e, ImagUnit):
        return 1j
    if isinstance(e, Var):
        return _lookup(b, e)
    if isinstance(e, Add):
        out = _eval(e.terms[0], b)
        for t in e.terms[1:]:
            out = out + _eval(t, b)
        return out
    if isinstance(e, Mul):
        out = _eval(e.factors[0], b)
        for f in e.factors[1:]:
            out = out * _eval(f, b)
        return out
    if isinstance(e, Pow):
        base = _eval(e.base, b)
        if e.exp < 0:
            if np.any(np.asarray(base) == 0):
                raise EvaluationError(f"division by zero evaluating {to_string(e)}")
            return 1.0 / base ** (-e.exp)
        return base ** e.exp
    return _NP_FUNCS[e.name](_eval(e.arg, b))


def evaluate(e: Expr, binding: Binding):
    """Complex value of ``e``.  Bound values may be numpy arrays (vectorised)."""
    b = {k: (np.asarray(v, dtype=complex) if isinstance(v, (list, np.ndarray)) else complex(v))
         for k, v in binding.items()}
    with np.errstate(all="ignore"):
        out = _eval(e, b)
    if isinstance(out, np.ndarray):
        if out.ndim == 0:
            return complex(out)
        shapes = [np.shape(v) for v in b.values() if np.ndim(v)]
        return np.broadcast_to(out, shapes[0]).astype(complex) if shapes else out
    return complex(out)


def bind(q=(), p=(), l=()) -> dict:
    """Binding from positional sequences; ``l`` may also be a {index: value} map."""
    out = {}
    for kind, vals in (("q", q), ("p", p), ("l", l)):
        items = vals.items() if isinstance(vals, Mapping) else enumerate(vals, start=1)
        for i, v in items:
            out[Var(kind, int(i))] = v
    return out


# ---------------------------------------------------------------------------
# printing and parsing
# ---------------------------------------------------------------------------

def _is_negative_term(t: Expr) -> bool:
    c, _ = _split_term(t)
    return c < 0


def to_string(e: Expr) -> str:
    if isinstance(e, Const):
        return fraction_str(e.value)
    if isinstance(e, ImagUnit):
        return "i"
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Func):
        return f"{e.name}({to_string(e.arg)})"
    if isinstance(e, Pow):
        b = to_string(e.base)
        if not isinstance(e.base, (Var, Func)):
            b = f"({b})"
        return f"{b}^{e.exp}"
    if isinstance(e, Mul):
        c, rest = _split_term(e)
        body = "*".join(f"({to_string(f)})" if isinstance(f, Add) else to_string(f) for f in rest)
        if c == 1:
            return body
        if c == -1:
            return "-" + body
        return f"{fraction_str(c)}*{body}"
    if isinstance(e, Add):
        out = to_string(e.terms[0])
        for t in e.terms[1:]:
            if _is_negative_term(t):
                out += " - " + to_string(mul(Const(Fraction(-1)), t))
            else:
                out += " + " + to_string(t)
        return out
    raise TypeError(e)


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:\.\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^()]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    toks = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            bad = len(text) - len(text[pos:].lstrip())
            raise ExprSyntaxError(f"unexpected character {text[bad]!r}", bad)
        kind = m.lastgroup
        start = m.start(kind)
        toks.append((kind, m.group(kind), start))
        pos = m.end()
    toks.append(("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, value: str):
        kind, val, pos = self.take()
        if val != value:
            raise ExprSyntaxError(f"expected {value!r}, found {val or 'end of input'!r}", pos)

    def parse(self) -> Expr:
        e = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected {val!r}", pos)
        return e

    def expr(self) -> Expr:
        e = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            rhs = self.term()
            e = add(e, rhs) if op == "+" else add(e, mul(Const(Fraction(-1)), rhs))
        return e

    def term(self) -> Expr:
        e = self.unary()
        while self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            rhs = self.unary()
            e = mul(e, rhs) if op == "*" else mul(e, power(rhs, -1))
        return e

    def unary(self) -> Expr:
        if self.peek()[1] == "-":
            self.take()
            return mul(Const(Fraction(-1)), self.unary())
        return self.factor()

    def factor(self) -> Expr:
        base = self.base()
        if self.peek()[1] == "^":
            self.take()
            sign = 1
            if self.peek()[1] == "-":
                self.take()
                sign = -1
            kind, val, pos = self.take()
            if kind != "num" or "." in val:
                raise ExprSyntaxError("exponent must be an integer literal", pos)
            try:
                return power(base, sign * int(val))
            except EvaluationError as exc:
                raise ExprSyntaxError(str(exc), pos) from exc
        return base

    def base(self) -> Expr:
        kind, val, pos = self.take()
        if kind == "num":
            return Const(Fraction(val))
        if kind == "name":
            if val == "i":
                return I
            if val in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return func(val, arg)
            m = re.fullmatch(r"([qpl])([1-9])", val)
            if not m:
                raise ExprSyntaxError(f"unknown identifier {val!r}", pos)
            return Var(m.group(1), int(m.group(2)))
        if val == "(":
            e = self.expr()
            self.expect(")")
            return e
        raise ExprSyntaxError(f"unexpected {val or 'end of input'!r}", pos)


def parse(text: str) -> Expr:
    return _Parser(text).parse()


def parse_all(texts: Iterable[str]) -> list[Expr]:
    return [parse(t) for t in texts]
