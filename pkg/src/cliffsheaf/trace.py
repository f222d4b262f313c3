"""Numeric and symbolic traces.

The symbolic side never touches a matrix. It applies the contraction rule

    Tr(g_1 g_2 ... g_n) = sum_{k=2..n} (-1)^k eta(1, k) Tr(word without slots 1, k)

with Tr(1) = 4 and odd words vanishing. The slots may be basis indices
(``symbolic_trace``) or arbitrary frame vectors (``slashed_trace``).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .algebra import AlgebraElement, EvalContext, Generator, evaluate

DISPLAY_IMAG_TOL = 1e-12


def numeric_trace(m: np.ndarray) -> complex:
    return complex(np.trace(m))


def contraction_trace(n_slots: int, pair: Callable[[int, int], object], unit=4):
    """Trace of an n-slot gamma word given the slot pairing ``pair(a, b)``.

    ``pair`` may return floats or sympy expressions; the recursion is
    memoised on the tuple of remaining slots for this call only.
    """
    memo: dict = {}

    def rec(slots):
        if not slots:
            return unit
        if len(slots) % 2:
            return 0
        if slots in memo:
            return memo[slots]
        first, rest = slots[0], slots[1:]
        total = 0
        for pos, k in enumerate(rest):
            # pos 0 corresponds to the second slot of the word: sign (+)
            c = pair(first, k)
            if c == 0:
                continue
            sub = rec(rest[:pos] + rest[pos + 1:])
            total = total + c * sub if pos % 2 == 0 else total - c * sub
        memo[slots] = total
        return total

    return rec(tuple(range(n_slots)))


def symbolic_trace(word: Sequence[int], eta) -> float:
    """Trace of gamma_{i1} ... gamma_{in} for 1-based indices and diagonal ``eta``."""
    idx = [int(i) for i in word]
    if any(i < 1 or i > 4 for i in idx):
        raise ValueError("gamma indices run over 1..4")
    eta = [float(e) for e in eta]

    def pair(a, b):
        ia, ib = idx[a], idx[b]
        return eta[ia - 1] if ia == ib else 0.0

    return float(contraction_trace(len(idx), pair))


def slashed_trace(vectors: Sequence[np.ndarray], eta) -> float:
    """Trace of slash(v_1) ... slash(v_n) for frame-component vectors."""
    eta = np.asarray(eta, dtype=float)
    vs = [np.asarray(v, dtype=float) for v in vectors]

    def pair(a, b):
        return float(np.sum(eta * vs[a] * vs[b]))

    return float(contraction_trace(len(vs), pair))


def gamma_word_matrix(rep, word: Sequence[int]) -> np.ndarray:
    out = np.eye(4, dtype=complex)
    for i in word:
        out = out @ rep.gammas[int(i) - 1]
    return out


@dataclass(frozen=True)
class TraceReport:
    expression: str
    numeric_value: complex
    symbolic_value: complex | None
    residual: float

    def to_json(self) -> dict:
        return {
            "expr": self.expression,
            "numeric": [self.numeric_value.real, self.numeric_value.imag],
            "symbolic": None if self.symbolic_value is None
            else [self.symbolic_value.real, self.symbolic_value.imag],
            "residual": self.residual,
        }


def _generator_polynomial(g: Generator, ctx: EvalContext) -> dict[int, complex]:
    """Generator as a polynomial in S = slash(y): {power: coefficient}."""
    sign = 1.0 if g.tilde else -1.0
    if g.kind in ("M", "Mt"):
        return {1: 1.0 / ctx.norm(), 0: sign}
    prod = 1.0
    for name in g.forms:
        prod *= ctx.pairing(name)
    return {g.degree: 1.0, 0: sign * prod}


def _poly_mul(p, q):
    out: dict = {}
    for i, a in p.items():
        for j, b in q.items():
            out[i + j] = out.get(i + j, 0) + a * b
    return out


def symbolic_element_trace(a: AlgebraElement, ctx: EvalContext) -> complex:
    """Expand every word into slashed-y gamma words and trace them by contraction."""
    total = {}
    for factors, c in a.terms:
        poly = {0: 1.0}
        for g in factors:
            poly = _poly_mul(poly, _generator_polynomial(g, ctx))
        for k, v in poly.items():
            total[k] = total.get(k, 0) + c * v
    out = 0j
    eta = ctx.frame.eta
    for k, v in total.items():
        if v == 0 or k % 2:
            continue
        out += v * slashed_trace([ctx.y_frame] * k, eta)
    return complex(out)


def trace_of_element(a: AlgebraElement, ctx: EvalContext, symbolic: bool = True) -> TraceReport:
    num = numeric_trace(evaluate(a, ctx))
    sym = symbolic_element_trace(a, ctx) if symbolic else None
    res = abs(num - sym) if sym is not None else 0.0
    return TraceReport(a.text(), num, sym, float(res))


def display_value(z: complex):
    """Real when the imaginary part is negligible, else the complex number."""
    z = complex(z)
    if abs(z.imag) <= DISPLAY_IMAG_TOL:
        return z.real
    return z
