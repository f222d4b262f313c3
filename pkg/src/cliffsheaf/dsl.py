"""A small expression language for algebra elements and their traces.

Grammar::

    expr   := ['-'] term (('+' | '-') term)*
    term   := factor ('*' factor)*
    factor := scalar | gen | 'Tr' '(' expr ')' | 'Grade' '[' int ']' '(' expr ')' | '(' expr ')'
    gen    := 'M' | 'Mt' | ('F' | 'Ft') '[' name (',' name)* ']'
    scalar := real | real ('+' | '-') real 'i'

Complex literals are single tokens without inner whitespace (``2+3i``);
everywhere else whitespace is ignored.  Scalar factors of a term are
multiplied together and hoisted into a ``Scale`` node.
"""

from __future__ import annotations

import json
import math
import os
import re
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .algebra import (
    MAX_ARITY,
    AlgebraElement,
    EvalContext,
    _fmt_real,
    evaluate,
    format_complex,
    grade_part,
    make_generator,
)
from .errors import ArityError, ExprSyntaxError, NullVectorForM, UnknownForm
from .gamma import REP_IDS
from .metric import DEFAULT_NULL_TOL, Metric4, parse_signature
from .trace import TraceReport, trace_of_element

MAX_DEPTH = 200
REP_ENV_VAR = "CF_REP"


# AST -------------------------------------------------------------------------

_POS = dict(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Number:
    value: complex
    pos: tuple = field(**_POS)


@dataclass(frozen=True)
class GeneratorRef:
    kind: str
    forms: tuple = ()
    pos: tuple = field(**_POS)


@dataclass(frozen=True)
class TraceOf:
    arg: "Expr"
    pos: tuple = field(**_POS)


@dataclass(frozen=True)
class GradePart:
    k: int
    arg: "Expr"
    pos: tuple = field(**_POS)


@dataclass(frozen=True)
class Product:
    factors: tuple
    pos: tuple = field(**_POS)


@dataclass(frozen=True)
class Sum:
    terms: tuple
    pos: tuple = field(**_POS)


@dataclass(frozen=True)
class Scale:
    coeff: complex
    arg: "Expr"
    pos: tuple = field(**_POS)


Expr = Union[Number, GeneratorRef, TraceOf, GradePart, Product, Sum, Scale]


# lexer -------------------------------------------------------------------------

_REAL = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_TOKEN_RE = re.compile(
    rf"(?P<complex>{_REAL}[+-]{_REAL}i)"
    rf"|(?P<real>{_REAL})"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<punct>[()\[\],+\-*])"
    r"|(?P<ws>\s+)"
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def _norm(c: complex) -> complex:
    c = complex(c)
    return complex(c.real + 0.0, c.imag + 0.0)


def tokenize(src: str) -> list[Token]:
    toks = []
    i, line, col = 0, 1, 1
    while i < len(src):
        m = _TOKEN_RE.match(src, i)
        if m is None:
            raise ExprSyntaxError(f"unexpected character {src[i]!r}", line, col)
        text = m.group()
        kind = m.lastgroup
        if kind != "ws":
            toks.append(Token(kind if kind != "punct" else text, text, line, col))
        nl = text.count("\n")
        if nl:
            line += nl
            col = len(text) - text.rfind("\n")
        else:
            col += len(text)
        i = m.end()
    toks.append(Token("eof", "", line, col))
    return toks


def _parse_number(tok: Token) -> complex:
    if tok.kind == "real":
        v = complex(float(tok.text), 0.0)
    else:
        body = tok.text[:-1]
        m = re.fullmatch(rf"({_REAL})([+-]{_REAL})", body)
        v = complex(float(m.group(1)), float(m.group(2)))
    if not (math.isfinite(v.real) and math.isfinite(v.imag)):
        raise ExprSyntaxError(f"literal {tok.text!r} is not finite", tok.line, tok.col)
    return _norm(v)


# parser -----------------------------------------------------------------------


def negate(e: Expr) -> Expr:
    if isinstance(e, Number):
        return Number(_norm(-e.value), e.pos)
    if isinstance(e, Scale):
        return Scale(_norm(-e.coeff), e.arg, e.pos)
    return Scale(-1.0 + 0j, e, getattr(e, "pos", None))


class _Parser:
    def __init__(self, src: str):
        self.toks = tokenize(src)
        self.i = 0
        self.depth = 0

    def peek(self) -> Token:
        return self.toks[self.i]

    def advance(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, kind: str, what: str | None = None) -> Token:
        t = self.peek()
        if t.kind != kind:
            found = "end of input" if t.kind == "eof" else repr(t.text)
            raise ExprSyntaxError(f"expected {what or repr(kind)}, found {found}", t.line, t.col)
        return self.advance()

    def parse(self) -> Expr:
        if self.peek().kind == "eof":
            t = self.peek()
            raise ExprSyntaxError("empty expression", t.line, t.col)
        e = self.expr()
        t = self.peek()
        if t.kind != "eof":
            raise ExprSyntaxError(f"unexpected {t.text!r} after expression", t.line, t.col)
        return e

    def expr(self) -> Expr:
        self.depth += 1
        if self.depth > MAX_DEPTH:
            t = self.peek()
            raise ExprSyntaxError(f"nesting deeper than {MAX_DEPTH}", t.line, t.col)
        start = self.peek()
        neg = False
        if start.kind == "-":
            self.advance()
            neg = True
        first = self.term()
        terms = [negate(first) if neg else first]
        while self.peek().kind in ("+", "-"):
            op = self.advance()
            t = self.term()
            terms.append(negate(t) if op.kind == "-" else t)
        self.depth -= 1
        if len(terms) == 1:
            return terms[0]
        return Sum(tuple(terms), (start.line, start.col))

    def term(self) -> Expr:
        start = self.peek()
        factors = [self.factor()]
        while self.peek().kind == "*":
            self.advance()
            factors.append(self.factor())
        coeff = 1.0 + 0j
        scalars = 0
        rest = []
        for f in factors:
            if isinstance(f, Number):
                coeff *= f.value
                scalars += 1
            else:
                rest.append(f)
        pos = (start.line, start.col)
        if not rest:
            return Number(_norm(coeff), pos)
        body = rest[0] if len(rest) == 1 else Product(tuple(rest), pos)
        if scalars == 0:
            return body
        return Scale(_norm(coeff), body, pos)

    def factor(self) -> Expr:
        t = self.peek()
        pos = (t.line, t.col)
        if t.kind in ("real", "complex"):
            self.advance()
            return Number(_parse_number(t), pos)
        if t.kind == "(":
            self.advance()
            e = self.expr()
            self.expect(")", "')'")
            return e
        if t.kind == "name":
            if t.text == "Tr":
                self.advance()
                self.expect("(", "'(' after Tr")
                e = self.expr()
                self.expect(")", "')'")
                return TraceOf(e, pos)
            if t.text == "Grade":
                self.advance()
                self.expect("[", "'[' after Grade")
                k = self.expect("real", "grade index")
                if not re.fullmatch(r"\d+", k.text):
                    raise ExprSyntaxError(f"grade index must be a non-negative integer, got {k.text!r}",
                                          k.line, k.col)
                self.expect("]", "']'")
                self.expect("(", "'('")
                e = self.expr()
                self.expect(")", "')'")
                return GradePart(int(k.text), e, pos)
            if t.text in ("M", "Mt"):
                self.advance()
                return GeneratorRef(t.text, (), pos)
            if t.text in ("F", "Ft"):
                self.advance()
                self.expect("[", f"'[' after {t.text}")
                names = []
                if self.peek().kind == "name":
                    names.append(self.advance().text)
                    while self.peek().kind == ",":
                        self.advance()
                        names.append(self.expect("name", "form name").text)
                if not names or len(names) > MAX_ARITY:
                    raise ArityError(f"{t.text} takes 1 to {MAX_ARITY} forms, got {len(names)}",
                                     t.line, t.col)
                self.expect("]", "']'")
                return GeneratorRef(t.text, tuple(names), pos)
            raise ExprSyntaxError(f"unknown name {t.text!r}", t.line, t.col)
        found = "end of input" if t.kind == "eof" else repr(t.text)
        raise ExprSyntaxError(f"expected a factor, found {found}", t.line, t.col)


def parse(src: str) -> Expr:
    return _Parser(src).parse()


# printer ---------------------------------------------------------------------


def _is_negative(c: complex) -> bool:
    return c.real < 0 or (c.real == 0 and c.imag < 0)


def _fmt_scalar(c: complex) -> str:
    c = _norm(c)
    if c.imag == 0:
        return _fmt_real(c.real)
    return format_complex(c)


def _signed_scalar(c: complex) -> str:
    return "-" + _fmt_scalar(-c) if _is_negative(c) else _fmt_scalar(c)


def _factor_text(e: Expr) -> str:
    if isinstance(e, (Sum, Product, Scale, Number)):
        return f"({print_canonical(e)})"
    return print_canonical(e)


def print_canonical(e: Expr) -> str:
    if isinstance(e, Number):
        return _signed_scalar(e.value)
    if isinstance(e, GeneratorRef):
        if e.kind in ("M", "Mt"):
            return e.kind
        return f"{e.kind}[{','.join(e.forms)}]"
    if isinstance(e, TraceOf):
        return f"Tr({print_canonical(e.arg)})"
    if isinstance(e, GradePart):
        return f"Grade[{e.k}]({print_canonical(e.arg)})"
    if isinstance(e, Product):
        if not e.factors:
            return "1"
        return "*".join(_factor_text(f) for f in e.factors)
    if isinstance(e, Scale):
        if isinstance(e.arg, Product) and len(e.arg.factors) > 1:
            body = print_canonical(e.arg)
        else:
            body = _factor_text(e.arg)
        return f"{_signed_scalar(e.coeff)}*{body}"
    if isinstance(e, Sum):
        parts = []
        for i, t in enumerate(e.terms):
            text = f"({print_canonical(t)})" if isinstance(t, Sum) else None
            if i == 0:
                parts.append(text or print_canonical(t))
            elif text is None and isinstance(t, (Number, Scale)) and _is_negative(
                    t.value if isinstance(t, Number) else t.coeff):
                parts.append(" - " + print_canonical(negate(t)))
            else:
                parts.append(" + " + (text or print_canonical(t)))
        return "".join(parts)
    raise TypeError(f"not an expression node: {e!r}")


# evaluation -------------------------------------------------------------------


def _walk(e: Expr):
    yield e
    if isinstance(e, (TraceOf, GradePart, Scale)):
        yield from _walk(e.arg)
    elif isinstance(e, Product):
        for f in e.factors:
            yield from _walk(f)
    elif isinstance(e, Sum):
        for t in e.terms:
            yield from _walk(t)


def _where(pos) -> str:
    return f"{pos[0]}:{pos[1]}: " if pos else ""


def _check_bindings(e: Expr, ctx: EvalContext):
    for node in _walk(e):
        if isinstance(node, GeneratorRef):
            for name in node.forms:
                if name not in ctx.forms:
                    exc = UnknownForm(f"{_where(node.pos)}form {name!r} is not bound in the context")
                    exc.location = node.pos
                    raise exc


def _first_m(e: Expr):
    for node in _walk(e):
        if isinstance(node, GeneratorRef) and node.kind in ("M", "Mt"):
            return node.pos
    return None


def _value(e: Expr, ctx: EvalContext):
    """complex for scalar results, AlgebraElement otherwise."""
    if isinstance(e, Number):
        return e.value
    if isinstance(e, GeneratorRef):
        return AlgebraElement.of(make_generator(e.kind, *e.forms))
    if isinstance(e, Scale):
        return e.coeff * _value(e.arg, ctx)
    if isinstance(e, Product):
        out = 1.0 + 0j
        for f in e.factors:
            out = out * _value(f, ctx)
        return out
    if isinstance(e, Sum):
        out = 0j
        for t in e.terms:
            out = out + _value(t, ctx)
        return out
    if isinstance(e, GradePart):
        v = _value(e.arg, ctx)
        if isinstance(v, AlgebraElement):
            return grade_part(v, e.k)
        return v if e.k == 0 else 0j
    if isinstance(e, TraceOf):
        v = _value(e.arg, ctx)
        if not isinstance(v, AlgebraElement):
            v = AlgebraElement.one(v)
        return _traced(v, e, ctx).numeric_value
    raise TypeError(f"not an expression node: {e!r}")


def _traced(v: AlgebraElement, e: Expr, ctx: EvalContext, symbolic: bool = False) -> TraceReport:
    try:
        return trace_of_element(v, ctx, symbolic=symbolic)
    except NullVectorForM as exc:
        pos = _first_m(e)
        err = NullVectorForM(f"{_where(pos)}{exc}")
        err.location = pos
        raise err from None


def to_element(e: Expr, ctx: EvalContext) -> AlgebraElement:
    """Algebra element denoted by ``e`` (inner traces are evaluated at ``ctx``)."""
    _check_bindings(e, ctx)
    v = _value(e, ctx)
    return v if isinstance(v, AlgebraElement) else AlgebraElement.one(v)


def eval_expr(e: Expr, ctx: EvalContext):
    """complex for scalar expressions, a 4x4 matrix for algebra expressions."""
    if isinstance(e, str):
        e = parse(e)
    _check_bindings(e, ctx)
    v = _value(e, ctx)
    if not isinstance(v, AlgebraElement):
        return complex(v)
    try:
        return evaluate(v, ctx)
    except NullVectorForM as exc:
        pos = _first_m(e)
        err = NullVectorForM(f"{_where(pos)}{exc}")
        err.location = pos
        raise err from None


def trace_report(e: Expr, ctx: EvalContext) -> TraceReport:
    """Dual-path report for a top-level ``Tr(...)`` expression."""
    if not isinstance(e, TraceOf):
        raise ValueError("trace_report needs a Tr(...) expression")
    el = to_element(e.arg, ctx)
    rep = _traced(el, e, ctx, symbolic=True)
    return TraceReport(print_canonical(e), rep.numeric_value, rep.symbolic_value, rep.residual)


# context files -------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ContextFile:
    metric: Metric4
    forms: dict
    y: tuple
    rep_id: str = "dirac"
    tolerances: dict = field(default_factory=lambda: {"null": DEFAULT_NULL_TOL})

    @property
    def signature(self):
        return self.metric.signature

    def to_eval_context(self, rep: str | None = None) -> EvalContext:
        rep = rep or self.rep_id
        return EvalContext.create(self.y, self.forms, self.metric, rep,
                                  float(self.tolerances.get("null", DEFAULT_NULL_TOL)))

    def to_json(self) -> dict:
        return {
            "metric": self.metric.to_json(),
            "forms": {k: list(v) for k, v in self.forms.items()},
            "y": list(self.y),
            "rep": self.rep_id,
            "tolerances": dict(self.tolerances),
        }


def _vector(v, what):
    try:
        arr = [float(x) for x in v]
    except (TypeError, ValueError):
        raise ValueError(f"{what} must be a list of four numbers") from None
    if len(arr) != 4 or not all(math.isfinite(x) for x in arr):
        raise ValueError(f"{what} must be a list of four finite numbers")
    return tuple(arr)


def load_context(src) -> ContextFile:
    """Load a context from a dict, a JSON string or a path.

    ``CF_REP`` in the environment overrides the representation.
    """
    if isinstance(src, dict):
        obj = src
    elif isinstance(src, str) and src.lstrip().startswith("{"):
        obj = json.loads(src)
    else:
        with open(src) as fh:
            obj = json.load(fh)
    if not isinstance(obj, dict):
        raise ValueError("context must be a JSON object")
    unknown = set(obj) - {"metric", "forms", "y", "rep", "signature", "tolerances"}
    if unknown:
        raise ValueError(f"unknown context keys: {sorted(unknown)}")
    mobj = dict(obj.get("metric") or {})
    if "signature" in obj:
        mobj.setdefault("signature", list(parse_signature(obj["signature"])))
    if not mobj:
        mobj = {"signature": [-1, 1, 1, 1]}
    metric = Metric4.from_json(mobj)
    forms = {str(k): _vector(v, f"form {k!r}") for k, v in (obj.get("forms") or {}).items()}
    if "y" not in obj:
        raise ValueError("context needs a tangent vector 'y'")
    y = _vector(obj["y"], "y")
    rep = os.environ.get(REP_ENV_VAR) or obj.get("rep", "dirac")
    if rep not in REP_IDS:
        raise ValueError(f"rep must be one of {REP_IDS}, got {rep!r}")
    tol = dict(obj.get("tolerances") or {})
    tol.setdefault("null", DEFAULT_NULL_TOL)
    if float(tol["null"]) < 0:
        raise ValueError("null tolerance must be non-negative")
    return ContextFile(metric, forms, y, rep, tol)


def matrix_to_json(m: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]
