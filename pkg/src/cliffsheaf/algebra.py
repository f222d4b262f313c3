"""The stalk algebra: formal graded words in M, Mt, F, Ft and their multi-form kin.

Elements are kept formal (sorted words with merged coefficients) so that
the grading survives; ``evaluate`` maps them to 4x4 matrices at a point.

Generator meanings at a point y, with S = gamma_i y^i in an orthonormal frame
and n = |eta(y,y)|^(1/2):

    M   = S/n - 1            Mt   = S/n + 1
    F_A = S - (A.y) 1        Ft_A = S + (A.y) 1
    F_AB = S^2 - (A.y)(B.y) 1,  Ft_AB = S^2 + (A.y)(B.y) 1
    F_ABC = S^3 -/+ (A.y)(B.y)(C.y) 1   (inferred arity-3 pattern)
"""

from __future__ import annotations

from dataclasses import dataclass, field
from numbers import Number
from typing import Mapping

import numpy as np

from .errors import NullVectorForM, UnknownForm, UnsupportedArity
from .gamma import I4, GammaRep, build_representation, slash
from .metric import (
    DEFAULT_NULL_TOL,
    Frame4,
    Metric4,
    OneForm,
    Tangent,
    orthonormal_frame,
)

KINDS = ("M", "Mt", "F", "Ft", "F2", "Ft2")
_RANK = {k: i for i, k in enumerate(KINDS)}
MAX_ARITY = 3


@dataclass(frozen=True, order=False)
class Generator:
    kind: str
    forms: tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind not in _RANK:
            raise ValueError(f"unknown generator kind {self.kind!r}")
        forms = tuple(self.forms)
        n = len(forms)
        if self.kind in ("M", "Mt") and n != 0:
            raise UnsupportedArity(f"{self.kind} takes no forms")
        if self.kind in ("F", "Ft") and n != 1:
            raise UnsupportedArity(f"{self.kind} takes exactly one form")
        if self.kind in ("F2", "Ft2"):
            if n > MAX_ARITY:
                raise UnsupportedArity(f"arity {n} > {MAX_ARITY} is not supported")
            if n < 2:
                raise UnsupportedArity(f"{self.kind} needs at least two forms")
            # F_AB is symmetric in its forms
            forms = tuple(sorted(forms))
        object.__setattr__(self, "forms", forms)

    @property
    def degree(self) -> int:
        return len(self.forms)

    @property
    def tilde(self) -> bool:
        return self.kind in ("Mt", "Ft", "Ft2")

    def sort_key(self):
        return (_RANK[self.kind], self.forms)

    def text(self) -> str:
        if not self.forms:
            return self.kind
        base = "Ft" if self.tilde else "F"
        return f"{base}[{','.join(self.forms)}]"


def make_generator(kind: str, *forms: str) -> Generator:
    """Build M/Mt or F/Ft with any arity; F with 2+ forms becomes F2."""
    if kind in ("F", "Ft") and len(forms) >= 2:
        kind = kind + "2"
    if kind in ("F", "Ft") and len(forms) == 0:
        raise UnsupportedArity(f"{kind} needs at least one form")
    return Generator(kind, tuple(forms))


def _fmt_real(x: float) -> str:
    x = float(x) + 0.0
    s = repr(x)
    if s.endswith(".0"):
        s = s[:-2]
    return s


def format_complex(c: complex) -> str:
    c = complex(c)
    im = c.imag + 0.0
    sign = "-" if np.signbit(im) else "+"
    return f"{_fmt_real(c.real)}{sign}{_fmt_real(abs(im))}i"


@dataclass(frozen=True)
class Word:
    factors: tuple[Generator, ...]
    coefficient: complex = 1.0

    @property
    def degree(self) -> int:
        return sum(g.degree for g in self.factors)


def _word_key(factors):
    return tuple(g.sort_key() for g in factors)


@dataclass(frozen=True)
class AlgebraElement:
    """Finite complex combination of canonically ordered words."""

    terms: tuple = field(default=())

    @classmethod
    def from_terms(cls, pairs) -> "AlgebraElement":
        acc: dict = {}
        for factors, coeff in pairs:
            factors = tuple(sorted(factors, key=Generator.sort_key))
            acc[factors] = acc.get(factors, 0j) + complex(coeff)
        items = [(f, c) for f, c in acc.items() if c != 0]
        items.sort(key=lambda fc: (len(fc[0]), _word_key(fc[0])))
        return cls(tuple(items))

    @classmethod
    def zero(cls) -> "AlgebraElement":
        return cls(())

    @classmethod
    def one(cls, coeff: complex = 1.0) -> "AlgebraElement":
        return cls.from_terms([((), coeff)])

    @classmethod
    def of(cls, g: Generator, coeff: complex = 1.0) -> "AlgebraElement":
        return cls.from_terms([((g,), coeff)])

    @property
    def words(self) -> list[Word]:
        return [Word(f, c) for f, c in self.terms]

    def is_zero(self) -> bool:
        return not self.terms

    def degrees(self) -> set[int]:
        return {w.degree for w in self.words}

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return add(self, other)

    __radd__ = __add__

    def __neg__(self):
        return scale(-1.0, self)

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return add(self, scale(-1.0, other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, Number):
            return scale(other, self)
        if isinstance(other, AlgebraElement):
            return multiply(self, other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, Number):
            return scale(other, self)
        return NotImplemented

    def text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for factors, c in self.terms:
            parts.append("*".join([f"({format_complex(c)})"] + [g.text() for g in factors]))
        return " + ".join(parts)

    __str__ = text


def _coerce(x):
    if isinstance(x, AlgebraElement):
        return x
    if isinstance(x, Number):
        return AlgebraElement.one(x)
    return NotImplemented


def M() -> AlgebraElement:
    return AlgebraElement.of(Generator("M"))


def Mt() -> AlgebraElement:
    return AlgebraElement.of(Generator("Mt"))


def F(*forms: str) -> AlgebraElement:
    return AlgebraElement.of(make_generator("F", *forms))


def Ft(*forms: str) -> AlgebraElement:
    return AlgebraElement.of(make_generator("Ft", *forms))


def add(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    return AlgebraElement.from_terms(list(a.terms) + list(b.terms))


def scale(c: complex, a: AlgebraElement) -> AlgebraElement:
    return AlgebraElement.from_terms([(f, complex(c) * k) for f, k in a.terms])


def multiply(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    # factors may be reordered freely: the algebra is commutative
    return AlgebraElement.from_terms(
        [(fa + fb, ca * cb) for fa, ca in a.terms for fb, cb in b.terms]
    )


def grade_decompose(a: AlgebraElement) -> dict[int, AlgebraElement]:
    parts: dict[int, list] = {}
    for f, c in a.terms:
        parts.setdefault(sum(g.degree for g in f), []).append((f, c))
    return {k: AlgebraElement.from_terms(v) for k, v in sorted(parts.items())}


def grade_part(a: AlgebraElement, k: int) -> AlgebraElement:
    return grade_decompose(a).get(k, AlgebraElement.zero())


@dataclass(frozen=True, eq=False)
class EvalContext:
    """Everything needed to evaluate elements at one point (x, y).

    Frame components of ``y`` and of every form are derived once on
    construction; ``eta_yy`` is eta(y, y) in the frame.
    """

    metric: Metric4
    frame: Frame4
    forms: Mapping[str, OneForm]
    y: Tangent
    rep: GammaRep
    tol_null: float = DEFAULT_NULL_TOL
    y_frame: np.ndarray = field(init=False, repr=False)
    forms_frame: Mapping[str, np.ndarray] = field(init=False, repr=False)
    eta_yy: float = field(init=False)

    def __post_init__(self):
        if tuple(self.rep.signature) != tuple(self.frame.eta):
            raise ValueError("representation signature must equal the frame eta")
        yf = self.frame.vector_components(self.y)
        yf.setflags(write=False)
        object.__setattr__(self, "y_frame", yf)
        ff = {}
        for name, a in self.forms.items():
            v = self.frame.form_components(a)
            v.setflags(write=False)
            ff[name] = v
        object.__setattr__(self, "forms_frame", ff)
        eta = np.array(self.frame.eta, dtype=float)
        object.__setattr__(self, "eta_yy", float(np.sum(eta * yf * yf)))

    @classmethod
    def create(cls, y, forms=None, metric: Metric4 | None = None, rep="dirac",
               tol_null: float = DEFAULT_NULL_TOL) -> "EvalContext":
        """Convenience constructor; ``forms`` maps names to 4-vectors or OneForms."""
        metric = metric if metric is not None else Metric4.from_signature()
        frame = orthonormal_frame(metric)
        if isinstance(rep, str):
            rep = build_representation(rep, frame.eta)
        fs = {}
        for name, a in (forms or {}).items():
            fs[name] = a if isinstance(a, OneForm) else OneForm(np.asarray(a, float), name)
        y = y if isinstance(y, Tangent) else Tangent(np.asarray(y, float))
        return cls(metric, frame, fs, y, rep, tol_null)

    def with_y(self, y) -> "EvalContext":
        y = y if isinstance(y, Tangent) else Tangent(np.asarray(y, float))
        return EvalContext(self.metric, self.frame, self.forms, y, self.rep, self.tol_null)

    def with_rep(self, rep) -> "EvalContext":
        if isinstance(rep, str):
            rep = build_representation(rep, self.frame.eta)
        return EvalContext(self.metric, self.frame, self.forms, self.y, rep, self.tol_null)

    def pairing(self, name: str) -> float:
        """A_j y^j for the named form, in frame components."""
        try:
            a = self.forms_frame[name]
        except KeyError:
            raise UnknownForm(f"form {name!r} is not bound in the context") from None
        return float(a @ self.y_frame)

    def norm(self) -> float:
        """|eta(y,y)|^(1/2), refusing the null cone."""
        if abs(self.eta_yy) <= self.tol_null:
            raise NullVectorForM(
                f"M/Mt need a non-null y; |eta(y,y)| = {abs(self.eta_yy):.3e} <= {self.tol_null:.1e}"
            )
        return float(np.sqrt(abs(self.eta_yy)))

    def slash_y(self) -> np.ndarray:
        return slash(self.rep, self.y_frame)


def evaluate_generator(g: Generator, ctx: EvalContext) -> np.ndarray:
    """Matrix of one generator at ``ctx``.

    F-type generators with k forms evaluate to S^k -/+ prod_i (A_i . y) 1.
    For k = 3 the S^3 leading term is an extrapolation of the k = 1, 2 cases.
    """
    s = ctx.slash_y()
    if g.kind in ("M", "Mt"):
        sign = 1.0 if g.tilde else -1.0
        return s / ctx.norm() + sign * I4
    prod = 1.0
    for name in g.forms:
        prod *= ctx.pairing(name)
    lead = np.linalg.matrix_power(s, g.degree)
    sign = 1.0 if g.tilde else -1.0
    return lead + sign * prod * I4


def evaluate(a: AlgebraElement, ctx: EvalContext) -> np.ndarray:
    cache: dict = {}
    out = np.zeros((4, 4), dtype=complex)
    for factors, c in a.terms:
        mat = I4
        for g in factors:
            if g not in cache:
                cache[g] = evaluate_generator(g, ctx)
            mat = mat @ cache[g]
        out = out + c * mat
    return out


def commutator(a: AlgebraElement, b: AlgebraElement, ctx: EvalContext) -> np.ndarray:
    ea, eb = evaluate(a, ctx), evaluate(b, ctx)
    return ea @ eb - eb @ ea


def span_residual(x: np.ndarray, s: np.ndarray) -> float:
    """Least-squares distance of ``x`` from span{1, s} (Frobenius, max-entry reported)."""
    basis = np.stack([I4.ravel(), s.ravel()], axis=1)
    coef, *_ = np.linalg.lstsq(basis, x.ravel(), rcond=None)
    return float(np.max(np.abs(basis @ coef - x.ravel())))
