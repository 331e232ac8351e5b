"""Exp-log expressions of one real variable.

Parsing, printing, evaluation (numpy, complex, mpmath, signed log-scale),
symbolic differentiation, asymptotic comparison at +infinity and convergence
decisions for improper integrals and series.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-' factor | base ('^' exponent)?
    base   := number | ident | '(' expr ')' | func '(' expr ')'
    func   := 'exp' | 'log' | 'sqrt' | 'abs'
    exponent := signed-number | '(' constant expr ')'

``sqrt(e)`` is stored as ``e^0.5`` and ``abs(e)`` as ``(e^2)^0.5``, so the
node set stays {constant, variable, add, sub, mul, div, pow, exp, log, neg}.
"""
from __future__ import annotations

import enum
import math
import re
import signal
import threading
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Callable

import numpy as np

__all__ = [
    "Expr", "Const", "Var", "Add", "Sub", "Mul", "Div", "Pow", "Exp", "Log", "Neg",
    "ExprSyntaxError", "DomainError", "parse", "to_text", "evaluate", "log_evaluate",
    "compile_expr", "differentiate", "simplify", "substitute", "domain_lower_bound",
    "exp", "log", "const", "Convergence", "ConvergenceVerdict", "AsymptoticOrder",
    "asymptotic_order", "compare_asymptotic", "converges",
]


class ExprSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at offset {position}")
        self.position = position


class DomainError(ValueError):
    pass


# ---------------------------------------------------------------- AST

# precedence levels used by the printer
_P_ADD, _P_MUL, _P_NEG, _P_POW, _P_ATOM = 1, 2, 3, 4, 5


class Expr:
    """Base node. Nodes are frozen dataclasses and compare structurally."""

    __slots__ = ()

    def __add__(self, other): return Add(self, _wrap(other))
    def __radd__(self, other): return Add(_wrap(other), self)
    def __sub__(self, other): return Sub(self, _wrap(other))
    def __rsub__(self, other): return Sub(_wrap(other), self)
    def __mul__(self, other): return Mul(self, _wrap(other))
    def __rmul__(self, other): return Mul(_wrap(other), self)
    def __truediv__(self, other): return Div(self, _wrap(other))
    def __rtruediv__(self, other): return Div(_wrap(other), self)
    def __neg__(self): return Neg(self)

    def __pow__(self, p):
        if isinstance(p, Expr):
            raise TypeError("exponent must be a real number")
        return Pow(self, float(p))

    def __str__(self):
        return to_text(self)

    def __call__(self, x):
        return evaluate(self, x)

    def children(self) -> tuple["Expr", ...]:
        return ()


@dataclass(frozen=True, eq=True, repr=True)
class Const(Expr):
    value: float

    def __post_init__(self):
        object.__setattr__(self, "value", float(self.value))
        if not math.isfinite(self.value):
            raise ValueError("constants must be finite")


@dataclass(frozen=True)
class Var(Expr):
    name: str = "x"


@dataclass(frozen=True)
class _Binary(Expr):
    left: Expr
    right: Expr

    def children(self):
        return (self.left, self.right)


class Add(_Binary): pass
class Sub(_Binary): pass
class Mul(_Binary): pass
class Div(_Binary): pass


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exponent: float

    def __post_init__(self):
        object.__setattr__(self, "exponent", float(self.exponent))

    def children(self):
        return (self.base,)


@dataclass(frozen=True)
class _Unary(Expr):
    arg: Expr

    def children(self):
        return (self.arg,)


class Exp(_Unary): pass
class Log(_Unary): pass
class Neg(_Unary): pass


for _cls in (Add, Sub, Mul, Div, Exp, Log, Neg):
    # subclasses of frozen dataclasses need the dataclass treatment themselves
    dataclass(frozen=True)(_cls)


def _wrap(v) -> Expr:
    if isinstance(v, Expr):
        return v
    return Const(float(v))


def const(v: float) -> Const:
    return Const(v)


def exp(e) -> Exp:
    return Exp(_wrap(e))


def log(e) -> Log:
    return Log(_wrap(e))


def walk(e: Expr):
    yield e
    for c in e.children():
        yield from walk(c)


def variables(e: Expr) -> set[str]:
    return {n.name for n in walk(e) if isinstance(n, Var)}


# ---------------------------------------------------------------- printing

def _prec(e: Expr) -> int:
    if isinstance(e, (Add, Sub)):
        return _P_ADD
    if isinstance(e, (Mul, Div)):
        return _P_MUL
    if isinstance(e, Pow):
        return _P_POW
    if isinstance(e, Const) and e.value < 0:
        return _P_NEG
    return _P_ATOM


def _num(v: float) -> str:
    return repr(float(v))


def to_text(e: Expr) -> str:
    """Canonical text. ``parse(to_text(e)) == e`` for every well-formed tree."""
    if isinstance(e, Const):
        return _num(e.value) if e.value >= 0 else f"(-{_num(-e.value)})"
    if isinstance(e, Var):
        return e.name
    if isinstance(e, _Binary):
        op = {Add: "+", Sub: "-", Mul: "*", Div: "/"}[type(e)]
        p = _prec(e)
        left = to_text(e.left)
        if _prec(e.left) < p:
            left = f"({left})"
        right = to_text(e.right)
        if _prec(e.right) <= p:
            right = f"({right})"
        sep = " " if p == _P_ADD else ""
        return f"{left}{sep}{op}{sep}{right}"
    if isinstance(e, Pow):
        base = to_text(e.base)
        if not (isinstance(e.base, (Var, Exp, Log)) or (isinstance(e.base, Const) and e.base.value >= 0)):
            base = f"({base})"
        return f"{base}^{_num(e.exponent)}"
    if isinstance(e, Exp):
        return f"exp({to_text(e.arg)})"
    if isinstance(e, Log):
        return f"log({to_text(e.arg)})"
    if isinstance(e, Neg):
        inner = to_text(e.arg)
        if not isinstance(e.arg, (Var, Exp, Log, Pow)):
            inner = f"({inner})"
        return f"(-{inner})"
    raise TypeError(f"unknown node {e!r}")


# ---------------------------------------------------------------- parsing

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<id>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()]))"
)
_FUNCS = ("exp", "log", "sqrt", "abs")


class _Parser:
    def __init__(self, text: str, var: str):
        self.text = text
        self.var = var
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            if text[pos:].strip() == "":
                break
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                bad = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
                raise ExprSyntaxError(f"unexpected character {text[bad]!r}", bad)
            kind = m.lastgroup
            start = m.start(kind)
            self.tokens.append((kind, m.group(kind), start))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else ("end", "", len(self.text))

    def take(self, text=None):
        tok = self.peek()
        if text is not None and tok[1] != text:
            what = "end of input" if tok[0] == "end" else repr(tok[1])
            raise ExprSyntaxError(f"expected {text!r}, found {what}", tok[2])
        if tok[0] == "end":
            raise ExprSyntaxError("unexpected end of input", tok[2])
        self.i += 1
        return tok

    def parse(self) -> Expr:
        e = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ExprSyntaxError(f"unexpected {tok[1]!r}", tok[2])
        return e

    def expr(self) -> Expr:
        e = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            r = self.term()
            e = Add(e, r) if op == "+" else Sub(e, r)
        return e

    def term(self) -> Expr:
        e = self.factor()
        while self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            r = self.factor()
            e = Mul(e, r) if op == "*" else Div(e, r)
        return e

    def factor(self) -> Expr:
        if self.peek()[1] == "-":
            self.take()
            kind, text, _ = self.peek()
            nxt = self.tokens[self.i + 1][1] if self.i + 1 < len(self.tokens) else ""
            if kind == "num" and nxt != "^":
                self.take()
                return Const(-float(text))
            return Neg(self.factor())
        b = self.base()
        if self.peek()[1] == "^":
            self.take()
            b = Pow(b, self.exponent())
        return b

    def exponent(self) -> float:
        kind, text, pos = self.peek()
        sign = 1.0
        if text in ("+", "-"):
            self.take()
            sign = -1.0 if text == "-" else 1.0
            kind, text, pos = self.peek()
        if kind == "num":
            self.take()
            return sign * float(text)
        if text == "(":
            self.take()
            inner = self.expr()
            self.take(")")
            if variables(inner):
                raise ExprSyntaxError("exponent must be constant", pos)
            return sign * float(evaluate(inner, 0.0))
        raise ExprSyntaxError("expected numeric exponent", pos)

    def base(self) -> Expr:
        kind, text, pos = self.peek()
        if kind == "num":
            self.take()
            return Const(float(text))
        if kind == "id":
            self.take()
            if text in _FUNCS:
                self.take("(")
                arg = self.expr()
                self.take(")")
                if text == "exp":
                    return Exp(arg)
                if text == "log":
                    return Log(arg)
                if text == "sqrt":
                    return Pow(arg, 0.5)
                return Pow(Pow(arg, 2.0), 0.5)
            if text != self.var:
                raise ExprSyntaxError(f"unknown identifier {text!r}", pos)
            return Var(text)
        if text == "(":
            self.take()
            e = self.expr()
            self.take(")")
            return e
        if kind == "end":
            raise ExprSyntaxError("unexpected end of input", pos)
        raise ExprSyntaxError(f"unexpected {text!r}", pos)


def parse(text: str, var: str = "x") -> Expr:
    """Parse ``text`` into an expression tree in the variable ``var``."""
    return _Parser(text, var).parse()


# ---------------------------------------------------------------- evaluation

class _NumpyLib:
    exp = staticmethod(np.exp)
    log = staticmethod(np.log)

    @staticmethod
    def pow(a, p):
        if float(p).is_integer() and not np.iscomplexobj(a):
            return np.power(np.asarray(a, dtype=float), p)
        return np.power(a, p)


def _mp_lib():
    import mpmath

    class _MpLib:
        exp = staticmethod(mpmath.exp)
        log = staticmethod(mpmath.log)

        @staticmethod
        def pow(a, p):
            return mpmath.power(a, mpmath.mpf(p))

    return _MpLib


def _build(e: Expr, lib) -> Callable:
    if isinstance(e, Const):
        v = e.value
        return lambda x: v + 0 * x
    if isinstance(e, Var):
        return lambda x: x
    if isinstance(e, _Binary):
        f, g = _build(e.left, lib), _build(e.right, lib)
        if isinstance(e, Add):
            return lambda x: f(x) + g(x)
        if isinstance(e, Sub):
            return lambda x: f(x) - g(x)
        if isinstance(e, Mul):
            return lambda x: f(x) * g(x)
        return lambda x: f(x) / g(x)
    if isinstance(e, Pow):
        f, p = _build(e.base, lib), e.exponent
        return lambda x: lib.pow(f(x), p)
    f = _build(e.arg, lib)
    if isinstance(e, Exp):
        return lambda x: lib.exp(f(x))
    if isinstance(e, Log):
        return lambda x: lib.log(f(x))
    if isinstance(e, Neg):
        return lambda x: -f(x)
    raise TypeError(f"unknown node {e!r}")


@lru_cache(maxsize=4096)
def _compiled_numpy(e: Expr):
    return _build(e, _NumpyLib)


def compile_expr(e: Expr, backend: str = "numpy") -> Callable:
    """Return a callable evaluating ``e``.

    ``backend`` is ``"numpy"`` (real or complex arrays, principal branches)
    or ``"mpmath"`` (arbitrary precision scalars).
    """
    if backend == "numpy":
        f = _compiled_numpy(e)

        def call(x):
            x = np.asarray(x) if not np.isscalar(x) else x
            if not np.iscomplexobj(x):
                x = np.asarray(x, dtype=float)
            with np.errstate(all="ignore"):
                out = f(x)
            return out[()] if isinstance(out, np.ndarray) and out.ndim == 0 else out

        return call
    if backend == "mpmath":
        return _build(e, _mp_lib())
    raise ValueError(f"unknown backend {backend!r}")


def evaluate(e: Expr, x, backend: str = "numpy"):
    return compile_expr(e, backend)(x)


def _signed_add(s1, l1, s2, l2):
    # sign/log-magnitude of s1*e^l1 + s2*e^l2
    s1, l1, s2, l2 = np.broadcast_arrays(s1, l1, s2, l2)
    hi = l1 >= l2
    sh = np.where(hi, s1, s2)
    lh = np.where(hi, l1, l2)
    sl = np.where(hi, s2, s1)
    ll = np.where(hi, l2, l1)
    d = ll - lh
    same = sh * sl >= 0
    zero_low = sl == 0
    with np.errstate(all="ignore"):
        add = lh + np.log1p(np.exp(d))
        sub = lh + np.log(-np.expm1(d))
    out_l = np.where(zero_low, lh, np.where(same, add, sub))
    out_s = np.where(zero_low, sh, np.where(same, sh, np.where(d == 0, 0.0, sh)))
    out_l = np.where(out_s == 0, -np.inf, out_l)
    both_inf = np.isinf(lh) & (lh > 0) & (lh == ll) & ~same
    out_l = np.where(both_inf, np.nan, out_l)
    return out_s, out_l


def _log_eval(e: Expr, x):
    if isinstance(e, Const):
        v = e.value
        with np.errstate(divide="ignore"):
            return np.full_like(x, np.sign(v)), np.full_like(x, np.log(abs(v)) if v else -np.inf)
    if isinstance(e, Var):
        with np.errstate(divide="ignore"):
            return np.sign(x), np.log(np.abs(x))
    if isinstance(e, Neg):
        s, l = _log_eval(e.arg, x)
        return -s, l
    if isinstance(e, (Add, Sub)):
        s1, l1 = _log_eval(e.left, x)
        s2, l2 = _log_eval(e.right, x)
        return _signed_add(s1, l1, -s2 if isinstance(e, Sub) else s2, l2)
    if isinstance(e, (Mul, Div)):
        s1, l1 = _log_eval(e.left, x)
        s2, l2 = _log_eval(e.right, x)
        if isinstance(e, Mul):
            l = np.where((s1 == 0) | (s2 == 0), -np.inf, l1 + l2)
            return s1 * s2, l
        with np.errstate(all="ignore"):
            s = np.where(s2 == 0, np.nan, s1 * s2)
            return s, np.where(s1 == 0, -np.inf, l1 - l2)
    if isinstance(e, Pow):
        s, l = _log_eval(e.base, x)
        p = e.exponent
        if p.is_integer():
            sign = s if int(p) % 2 else np.abs(s)
        else:
            sign = np.where(s < 0, np.nan, s)
        with np.errstate(all="ignore"):
            lp = np.where(s == 0, np.where(p > 0, -np.inf, np.inf), p * l)
        return np.where((s == 0) & (p == 0), 1.0, sign), np.where((s == 0) & (p == 0), 0.0, lp)
    if isinstance(e, Exp):
        s, l = _log_eval(e.arg, x)
        with np.errstate(all="ignore"):
            return np.ones_like(l), s * np.exp(l)
    if isinstance(e, Log):
        s, l = _log_eval(e.arg, x)
        # log(s e^l) = l for s > 0
        bad = s <= 0
        with np.errstate(all="ignore"):
            return np.where(bad, np.nan, np.sign(l)), np.where(bad, np.nan, np.log(np.abs(l)))
    raise TypeError(f"unknown node {e!r}")


def log_evaluate(e: Expr, x):
    """Return ``(sign, log|e(x)|)`` computed without forming ``e(x)``.

    Stays finite where ``e(x)`` itself over- or underflows, e.g.
    ``exp(-x^2)`` at ``x = 1e6``.
    """
    x = np.asarray(x, dtype=float)
    with np.errstate(all="ignore"):
        s, l = _log_eval(e, x)
    s, l = np.asarray(s, dtype=float), np.asarray(l, dtype=float)
    if s.ndim == 0:
        return float(s), float(l)
    return s, l


# ---------------------------------------------------------------- simplify / differentiate

def _is(e: Expr, v: float) -> bool:
    return isinstance(e, Const) and e.value == v


def _finite_const(v) -> Expr | None:
    try:
        v = float(v)
    except (TypeError, ValueError, OverflowError):
        return None
    return Const(v) if math.isfinite(v) else None


def _simp_node(e: Expr) -> Expr:
    C = Const
    if isinstance(e, Add):
        a, b = e.left, e.right
        if isinstance(a, C) and isinstance(b, C):
            return C(a.value + b.value)
        if _is(a, 0):
            return b
        if _is(b, 0):
            return a
        if isinstance(b, Neg):
            return Sub(a, b.arg)
        return e
    if isinstance(e, Sub):
        a, b = e.left, e.right
        if isinstance(a, C) and isinstance(b, C):
            return C(a.value - b.value)
        if _is(b, 0):
            return a
        if _is(a, 0):
            return _simp_node(Neg(b))
        if a == b:
            return C(0.0)
        return e
    if isinstance(e, Mul):
        a, b = e.left, e.right
        if isinstance(a, C) and isinstance(b, C):
            return C(a.value * b.value)
        if isinstance(b, C) and not isinstance(a, C):
            a, b = b, a
        if _is(a, 0) or _is(b, 0):
            return C(0.0)
        if _is(a, 1):
            return b
        if _is(b, 1):
            return a
        if _is(a, -1):
            return _simp_node(Neg(b))
        if isinstance(a, C) and isinstance(b, Mul) and isinstance(b.left, C):
            return _simp_node(Mul(C(a.value * b.left.value), b.right))
        if isinstance(a, C) and isinstance(b, Neg):
            return _simp_node(Mul(C(-a.value), b.arg))
        if isinstance(b, Div) and _is(b.left, 1):
            return Div(a, b.right)
        if isinstance(a, Div) and _is(a.left, 1):
            return Div(b, a.right)
        return Mul(a, b)
    if isinstance(e, Div):
        a, b = e.left, e.right
        if isinstance(a, C) and isinstance(b, C):
            return _finite_const(a.value / b.value) or e
        if _is(a, 0):
            return C(0.0)
        if _is(b, 1):
            return a
        if isinstance(b, C) and isinstance(a, Mul) and isinstance(a.left, C):
            return _simp_node(Mul(C(a.left.value / b.value), a.right))
        if a == b:
            return C(1.0)
        return e
    if isinstance(e, Pow):
        if e.exponent == 1:
            return e.base
        if e.exponent == 0:
            return C(1.0)
        if isinstance(e.base, C):
            if e.base.value > 0 or e.exponent.is_integer():
                return _finite_const(e.base.value ** e.exponent) or e
        return e
    if isinstance(e, Neg):
        if isinstance(e.arg, C):
            return C(-e.arg.value)
        if isinstance(e.arg, Neg):
            return e.arg.arg
        return e
    if isinstance(e, Exp) and isinstance(e.arg, C):
        return _finite_const(math.exp(e.arg.value)) if e.arg.value < 700 else e
    if isinstance(e, Log) and isinstance(e.arg, C) and e.arg.value > 0:
        return C(math.log(e.arg.value))
    return e


@lru_cache(maxsize=8192)
def simplify(e: Expr) -> Expr:
    """Light local simplification: constant folding and 0/1 identities."""
    if isinstance(e, _Binary):
        e = type(e)(simplify(e.left), simplify(e.right))
    elif isinstance(e, Pow):
        e = Pow(simplify(e.base), e.exponent)
    elif isinstance(e, _Unary):
        e = type(e)(simplify(e.arg))
    return _simp_node(e)


@lru_cache(maxsize=8192)
def _diff(e: Expr) -> Expr:
    if isinstance(e, Const):
        return Const(0.0)
    if isinstance(e, Var):
        return Const(1.0)
    if isinstance(e, Add):
        return Add(_diff(e.left), _diff(e.right))
    if isinstance(e, Sub):
        return Sub(_diff(e.left), _diff(e.right))
    if isinstance(e, Mul):
        return Add(Mul(_diff(e.left), e.right), Mul(e.left, _diff(e.right)))
    if isinstance(e, Div):
        a, b = e.left, e.right
        if isinstance(b, Const):
            return Div(_diff(a), b)
        return Div(Sub(Mul(_diff(a), b), Mul(a, _diff(b))), Pow(b, 2.0))
    if isinstance(e, Pow):
        return Mul(Mul(Const(e.exponent), Pow(e.base, e.exponent - 1.0)), _diff(e.base))
    if isinstance(e, Exp):
        return Mul(e, _diff(e.arg))
    if isinstance(e, Log):
        return Div(_diff(e.arg), e.arg)
    if isinstance(e, Neg):
        return Neg(_diff(e.arg))
    raise TypeError(f"unknown node {e!r}")


def differentiate(e: Expr, order: int = 1) -> Expr:
    for _ in range(order):
        e = simplify(simplify(_diff(simplify(e))))
    return e


def substitute(e: Expr, replacement: Expr) -> Expr:
    """Replace every occurrence of the variable by ``replacement``."""
    if isinstance(e, Var):
        return replacement
    if isinstance(e, Const):
        return e
    if isinstance(e, _Binary):
        return type(e)(substitute(e.left, replacement), substitute(e.right, replacement))
    if isinstance(e, Pow):
        return Pow(substitute(e.base, replacement), e.exponent)
    return type(e)(substitute(e.arg, replacement))


# ---------------------------------------------------------------- domain

def _scan_grid() -> np.ndarray:
    g = np.geomspace(1e-8, 1e8, 1601)
    return np.unique(np.concatenate([-g, [0.0], g, np.linspace(-20.0, 20.0, 4001)]))


_GRID = _scan_grid()


def _constraints(e: Expr):
    for node in walk(e):
        if isinstance(node, Log):
            yield node.arg, "pos"
        elif isinstance(node, Div):
            yield node.right, "nonzero"
        elif isinstance(node, Pow):
            p = node.exponent
            if not p.is_integer():
                yield node.base, "pos" if p < 0 else "nonneg"
            elif p < 0:
                yield node.base, "nonzero"


def _violates(g: Callable, kind: str, x: np.ndarray) -> np.ndarray:
    v = np.asarray(g(x), dtype=float)
    bad = ~np.isfinite(v)
    if kind == "pos":
        bad |= v <= 0
    elif kind == "nonneg":
        bad |= v < 0
    else:
        bad |= v == 0
    return bad


def domain_lower_bound(e: Expr) -> float:
    """Largest singular point of ``e``; the expression is defined on ``(a, inf)``.

    Scans every log argument, fractional-power base and denominator on a fixed
    grid, then bisects the last violation. Returns ``-inf`` when nothing is
    violated on the grid. Raises DomainError when no half-line exists.
    """
    a = -np.inf
    x = _GRID
    for sub, kind in _constraints(e):
        g = compile_expr(sub)
        bad = _violates(g, kind, x)
        if kind == "nonzero":
            v = np.asarray(g(x), dtype=float)
            sgn = np.sign(v)
            change = np.zeros_like(bad)
            change[:-1] |= (sgn[:-1] * sgn[1:]) < 0
            bad = bad | change
        if not bad.any():
            continue
        if bad[-1]:
            raise DomainError(f"{to_text(sub)} violates its constraint for large x; no half-line of definition")
        i = int(np.nonzero(bad)[0][-1])
        lo, hi = x[i], x[i + 1]
        if kind == "nonzero":
            s_hi = np.sign(float(g(hi)))
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                if mid in (lo, hi):
                    break
                vm = float(g(mid))
                if not np.isfinite(vm) or vm == 0 or np.sign(vm) != s_hi:
                    lo = mid
                else:
                    hi = mid
        else:
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                if mid in (lo, hi):
                    break
                if _violates(g, kind, np.array([mid]))[0]:
                    lo = mid
                else:
                    hi = mid
        a = max(a, float(hi) if kind != "nonzero" else float(lo))
    return a


# ---------------------------------------------------------------- asymptotics (sympy-backed limits)

@lru_cache(maxsize=4096)
def to_sympy(e: Expr):
    import sympy as sp

    def rat(v: float):
        return sp.Rational(repr(float(v)))

    def go(n):
        if isinstance(n, Const):
            return rat(n.value)
        if isinstance(n, Var):
            return sp.Symbol(n.name, positive=True)
        if isinstance(n, Add):
            return go(n.left) + go(n.right)
        if isinstance(n, Sub):
            return go(n.left) - go(n.right)
        if isinstance(n, Mul):
            return go(n.left) * go(n.right)
        if isinstance(n, Div):
            return go(n.left) / go(n.right)
        if isinstance(n, Pow):
            return go(n.base) ** rat(n.exponent)
        if isinstance(n, Exp):
            return sp.exp(go(n.arg))
        if isinstance(n, Log):
            return sp.log(go(n.arg))
        if isinstance(n, Neg):
            return -go(n.arg)
        raise TypeError(n)

    return go(e)


class _Timeout(Exception):
    pass


LIMIT_TIMEOUT = 20.0


def _limit_at_infinity(expr, var):
    """``lim_{var -> oo} expr`` or None when undecided (error, timeout, bounds)."""
    import sympy as sp

    use_alarm = threading.current_thread() is threading.main_thread() and hasattr(signal, "SIGALRM")

    def handler(signum, frame):
        raise _Timeout()

    old = None
    if use_alarm:
        old = signal.signal(signal.SIGALRM, handler)
        signal.setitimer(signal.ITIMER_REAL, LIMIT_TIMEOUT)
    try:
        val = sp.limit(expr, var, sp.oo)
    except (_Timeout, NotImplementedError, ValueError, TypeError, RecursionError, AttributeError):
        return None
    finally:
        if use_alarm:
            signal.setitimer(signal.ITIMER_REAL, 0)
            signal.signal(signal.SIGALRM, old)
    if val is None or val.has(sp.AccumBounds) or val.has(sp.nan) or val.has(sp.zoo):
        return None
    if val in (sp.oo, -sp.oo):
        return val
    if not val.is_real:
        return None
    return val


@lru_cache(maxsize=4096)
def _limit(key: tuple):
    kind, e = key[0], key[1]
    import sympy as sp

    fs = to_sympy(e)
    names = variables(e)
    x = sp.Symbol(next(iter(names)) if names else "x", positive=True)
    if kind == "value":
        return _limit_at_infinity(fs, x)
    if kind == "logpower":
        depth = key[2]
        shift = key[3]
        # (log f + sum of shifts) / log^{(depth+1)} x
        L = sp.log(fs)
        it = sp.log(x)
        for j in range(depth):
            L = L - sp.Rational(shift[j]) * it
            it = sp.log(it)
        return _limit_at_infinity(L / it, x)
    raise ValueError(kind)


class Convergence(str, enum.Enum):
    CONVERGES = "converges"
    DIVERGES = "diverges"
    INCONCLUSIVE = "inconclusive"


@dataclass
class ConvergenceVerdict:
    """Outcome of a convergence decision with the evidence that produced it."""

    verdict: Convergence
    method: str  # "symbolic" or "numeric-extrapolation"
    rule: str = ""
    diagnostics: dict[str, Any] = field(default_factory=dict)

    @property
    def converges(self) -> bool:
        return self.verdict is Convergence.CONVERGES

    @property
    def diverges(self) -> bool:
        return self.verdict is Convergence.DIVERGES

    @property
    def decided(self) -> bool:
        return self.verdict is not Convergence.INCONCLUSIVE

    def to_dict(self) -> dict:
        return {"verdict": self.verdict.value, "method": self.method, "rule": self.rule,
                "diagnostics": _jsonable(self.diagnostics)}

    @classmethod
    def from_dict(cls, d: dict) -> "ConvergenceVerdict":
        return cls(Convergence(d["verdict"]), d["method"], d.get("rule", ""), d.get("diagnostics", {}))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    return obj


@dataclass(frozen=True)
class AsymptoticOrder:
    """Leading behaviour at +infinity.

    ``level`` counts the exponentials stacked on top of a power-log monomial:
    level 0 means ``|f| ~ c x^p (log x)^q``; level k means the same holds for
    the k-fold iterated logarithm of ``|f|``. ``chain`` lists
    ``(power_of_x, power_of_log_x, coefficient)`` for that innermost monomial
    (coefficient may be 0 or inf when a loglog factor remains).
    """

    level: int
    chain: tuple[tuple[float, float, float], ...]
    sign: int = 1

    def key(self):
        p, q, c = self.chain[0]
        return (self.sign * self.level if self.sign > 0 else 0, p, q, c)


def asymptotic_order(e: Expr, max_level: int = 3) -> AsymptoticOrder | None:
    import sympy as sp

    f = e
    sign = 1
    s, _ = log_evaluate(e, np.array([1e6, 1e9]))
    if np.all(np.asarray(s) < 0):
        sign, f = -1, Neg(e)
    cur = f
    for level in range(max_level + 1):
        p = _limit(("logpower", cur, 0, ()))
        if p is None:
            return None
        if p not in (sp.oo, -sp.oo):
            q = _limit(("logpower", cur, 1, (str(p),)))
            if q is None or q in (sp.oo, -sp.oo):
                q_val = float("nan") if q is None else float(q)
                return AsymptoticOrder(level, ((float(p), q_val, float("nan")),), sign)
            x = next(iter(variables(cur)), "x")
            mono = Mul(Pow(Var(x), float(p)), Pow(Log(Var(x)), float(q)))
            c = _limit(("value", simplify(Div(cur, mono))))
            c_val = float("nan") if c is None else float(c)
            return AsymptoticOrder(level, ((float(p), float(q), c_val),), sign)
        if p == -sp.oo:
            # decays faster than any power: describe the decay rate of 1/|f|
            cur = Log(Div(Const(1.0), cur))
            sign = -sign if sign < 0 else sign
            continue
        cur = Log(cur)
    return None


def compare_asymptotic(f: Expr, g: Expr) -> str:
    """Compare germs at +infinity: ``"<<"``, ``"~"``, ``">>"`` or ``"unknown"``.

    ``~`` is the two-sided bound f = O(g), g = O(f) and is returned when
    lim |f/g| is finite and positive.
    """
    import sympy as sp

    ratio = simplify(Div(f, g))
    lim = _limit(("value", ratio))
    if lim is None:
        return "unknown"
    lim = abs(lim) if lim not in (sp.oo, -sp.oo) else sp.oo
    if lim == sp.oo:
        return ">>"
    if lim == 0:
        return "<<"
    if lim.is_positive:
        return "~"
    return "unknown"


def _eventually_positive(e: Expr, lower: float) -> bool:
    hi = max(lower, 1.0)
    pts = np.geomspace(hi * 2, max(hi * 2, 1.0) * 2.0 ** 30, 31)
    s, l = log_evaluate(e, pts)
    return bool(np.all(np.asarray(s) > 0) & np.all(~np.isnan(l)))


def _symbolic_ladder(f: Expr, max_depth: int = 3) -> ConvergenceVerdict | None:
    import sympy as sp

    shifts: list[str] = []
    trail = []
    for depth in range(max_depth + 1):
        key = ("logpower", f, depth, tuple(shifts))
        p = _limit(key)
        if p is None:
            return None
        trail.append(str(p))
        diag = {"exponents": trail}
        prefix = ["", "x^-1 * ", "(x log x)^-1 * ", "(x log x log log x)^-1 * "][depth]
        name = prefix + ["x", "(log x)", "(log log x)", "(log log log x)"][depth]
        if p == -sp.oo:
            return ConvergenceVerdict(Convergence.CONVERGES, "symbolic", f"faster decay than every {name}^p", diag)
        if p == sp.oo:
            return ConvergenceVerdict(Convergence.DIVERGES, "symbolic", f"slower decay than every {name}^p", diag)
        if p < -1:
            return ConvergenceVerdict(Convergence.CONVERGES, "symbolic", f"{name}^p with p = {p} < -1", diag)
        if p > -1:
            return ConvergenceVerdict(Convergence.DIVERGES, "symbolic", f"{name}^p with p = {p} > -1", diag)
        shifts.append("-1")
    return None


def converges(f: Expr, mode: str = "integral", lower: float = 1.0, *, symbolic: bool = True,
              config=None) -> ConvergenceVerdict:
    """Decide convergence of ``int_lower^inf f`` (``mode="integral"``) or
    ``sum_{n >= lower} f(n)`` (``mode="series"``).

    The symbolic path compares ``log f`` against the ladder
    ``log x, log log x, log log log x``: at each rung the exponent p of
    ``f ~ x^-1 (log x)^-1 ... (rung)^p`` decides unless ``p == -1``. Exp-log
    functions are eventually monotone, so the same ladder decides series.
    Anything the ladder leaves open goes to the numeric block extrapolation.
    """
    from . import oracle

    if mode not in ("integral", "series"):
        raise ValueError(f"mode must be 'integral' or 'series', not {mode!r}")
    if not _eventually_positive(f, lower):
        return ConvergenceVerdict(Convergence.INCONCLUSIVE, "symbolic", "not eventually positive on the sampled tail",
                                  {"expression": to_text(f)})
    if symbolic:
        v = _symbolic_ladder(f)
        if v is not None:
            v.diagnostics["expression"] = to_text(f)
            v.diagnostics["mode"] = mode
            return v

    def log_f(u):
        _, l = log_evaluate(f, u)
        return l

    return oracle.block_extrapolate(None, lower, mode, log_f=log_f, config=config)
