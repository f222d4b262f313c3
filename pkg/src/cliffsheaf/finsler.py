"""Finsler-type structures recovered from traces of algebra elements.

Randers function, angular-metric Lagrangian, the second-order Randers
Lagrangian, fundamental tensors by finite differences, and the null-cone
limits that glue the causal branches together.

Which generator product reproduces the Randers function on each causal
branch is fixed by ``run_pairing_oracle`` (explicit Dirac-representation
matrix products) and frozen in ``ORACLE_PAIRING``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .algebra import EvalContext, F, Ft, M, Mt, evaluate
from .errors import NotNull, NumericalBreakdown
from .gamma import build_representation
from .metric import (
    DEFAULT_NULL_TOL,
    NULL,
    SPACELIKE,
    TIMELIKE,
    Metric4,
    OneForm,
    _vec,
    causal_character,
    dual_norm_squared,
    norm_squared,
    orthonormal_frame,
)
from .trace import numeric_trace

# branch -> (left generator, right generator, prefactor on the trace)
ORACLE_PAIRING = {
    TIMELIKE: ("M", "Ft", -0.25),
    SPACELIKE: ("M", "F", 0.25),
}
PAIRING_CANDIDATES = (("M", "F"), ("M", "Ft"), ("Mt", "F"))

NULL_SEQUENCE_OFFSET = 2
REGULARITY_RTOL = 1e-12
FD_REL_STEP = 1e-2
ASYMMETRY_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class RandersData:
    metric: Metric4
    A: OneForm

    def __post_init__(self):
        if not self.metric.is_lorentzian:
            raise ValueError("Randers data needs a Lorentzian metric")
        if not isinstance(self.A, OneForm):
            object.__setattr__(self, "A", OneForm(np.asarray(self.A, float), "A"))

    @classmethod
    def create(cls, A, metric: Metric4 | None = None) -> "RandersData":
        metric = metric if metric is not None else Metric4.from_signature()
        return cls(metric, A if isinstance(A, OneForm) else OneForm(np.asarray(A, float), "A"))

    def context(self, y, rep="dirac", tol_null: float = DEFAULT_NULL_TOL) -> EvalContext:
        return EvalContext.create(y, {"A": self.A}, self.metric, rep, tol_null)


_GENS = {"M": M, "Mt": Mt, "F": lambda: F("A"), "Ft": lambda: Ft("A")}


def pairing_trace(left: str, right: str, ctx: EvalContext) -> float:
    """Tr(left . right) for generators named 'M', 'Mt', 'F', 'Ft' (form 'A')."""
    el = _GENS[left]() * _GENS[right]()
    return numeric_trace(evaluate(el, ctx)).real


# pairing oracle -------------------------------------------------------------


def _oracle_matrices(y, a_vec, eta, gam):
    s = sum(y[i] * gam[i] for i in range(4))
    q = float(np.sum(np.asarray(eta) * y * y))
    n = np.sqrt(abs(q))
    ay = float(a_vec @ y)
    one = np.eye(4)
    mats = {"M": s / n - one, "Mt": s / n + one, "F": s - ay * one, "Ft": s + ay * one}
    return mats, q, n, ay


def run_pairing_oracle(n_samples: int = 64, seed: int = 20240917, tol: float = 1e-10) -> dict:
    """Decide, by explicit 4x4 products in the Dirac representation, which
    (prefactor, pairing) reproduces |g(y,y)|^(1/2) + A.y on each branch.

    Candidates are tried in the order of ``PAIRING_CANDIDATES`` with
    prefactor -1/4 before +1/4; the first that matches every sample wins.
    """
    rng = np.random.default_rng(seed)
    eta = (-1, 1, 1, 1)
    gam = build_representation("dirac", eta).gammas
    samples = {TIMELIKE: [], SPACELIKE: []}
    while min(len(v) for v in samples.values()) < n_samples:
        y = rng.normal(size=4)
        a = rng.uniform(-0.5, 0.5, size=4)
        q = float(np.sum(np.array(eta) * y * y))
        if abs(q) < 1e-3:
            continue
        branch = TIMELIKE if q < 0 else SPACELIKE
        if len(samples[branch]) < n_samples:
            samples[branch].append((y, a))
    transcript = {"representation": "dirac", "signature": list(eta), "seed": seed,
                  "n_samples": n_samples, "target": "|g(y,y)|^(1/2) + A.y", "branches": {}}
    for branch, pts in samples.items():
        rows = []
        selected = None
        for left, right in PAIRING_CANDIDATES:
            for pref in (-0.25, 0.25):
                worst = 0.0
                for y, a in pts:
                    mats, q, n, ay = _oracle_matrices(y, a, eta, gam)
                    val = pref * np.trace(mats[left] @ mats[right]).real
                    worst = max(worst, abs(val - (n + ay)) / max(1.0, n + abs(ay)))
                ok = worst <= tol
                rows.append({"pairing": f"{left}*{right}", "prefactor": pref,
                             "max_rel_residual": float(worst), "matches": bool(ok)})
                if ok and selected is None:
                    selected = (left, right, pref)
        transcript["branches"][branch] = {"candidates": rows, "selected": list(selected) if selected else None}
    return transcript


def frozen_pairing_matches(transcript: dict) -> bool:
    return all(
        tuple(transcript["branches"][b]["selected"]) == ORACLE_PAIRING[b] for b in ORACLE_PAIRING
    )


# Randers --------------------------------------------------------------------


def randers_norm_closed(d: RandersData, y, tol: float = DEFAULT_NULL_TOL) -> float:
    """|g(y,y)|^(1/2) + A.y, with the null branch A.y."""
    q = norm_squared(d.metric, y)
    ay = d.A(y)
    if abs(q) <= tol:
        return ay
    return float(np.sqrt(abs(q)) + ay)


def randers_norm(d: RandersData, y, rep="dirac", tol: float = DEFAULT_NULL_TOL) -> float:
    """Glued Randers function computed from traces of the oracle pairing."""
    char = causal_character(d.metric, y, tol)
    if char == NULL:
        return d.A(y)
    left, right, pref = ORACLE_PAIRING[char]
    return pref * pairing_trace(left, right, d.context(y, rep, tol))


def approach_sequence(metric: Metric4, y_null, side: str, length: int = 12):
    """Vectors y_n -> y_null from the timelike or spacelike side.

    In the orthonormal frame the majority-sign block of y_null is rescaled:
    first to make y exactly null, then by (1 +/- delta_n) with
    delta_n = 10^-(n+2), n = 1..length.  Returns (exact_null, [y_n], [delta_n]).
    """
    if side not in (TIMELIKE, SPACELIKE):
        raise ValueError("side must be 'timelike' or 'spacelike'")
    frame = orthonormal_frame(metric)
    eta = np.array(frame.eta, dtype=float)
    maj_sign = 1.0 if np.sum(eta > 0) > np.sum(eta < 0) else -1.0
    maj = eta == maj_sign
    yf = frame.vector_components(y_null)
    q_maj = float(np.sum(eta[maj] * yf[maj] ** 2))
    q_min = float(np.sum(eta[~maj] * yf[~maj] ** 2))
    if q_maj == 0.0 or q_min == 0.0:
        raise ValueError("cannot approach the zero vector")
    yf = yf.copy()
    yf[maj] *= np.sqrt(-q_min / q_maj)
    exact = frame.vector_from_frame(yf)
    want = -1.0 if side == TIMELIKE else 1.0
    direction = want * maj_sign
    seq, deltas = [], []
    for n in range(1, length + 1):
        delta = 10.0 ** -(n + NULL_SEQUENCE_OFFSET)
        zf = yf.copy()
        zf[maj] *= 1.0 + direction * delta
        seq.append(frame.vector_from_frame(zf))
        deltas.append(delta)
    return exact, seq, deltas


def sqrt_richardson(values, deltas) -> float:
    """Limit of v(delta) = L + c delta^(1/2) + O(delta) from the last two samples."""
    v1, v2 = values[-2], values[-1]
    r = np.sqrt(deltas[-2] / deltas[-1])
    return float((r * v2 - v1) / (r - 1.0))


@dataclass
class OneSidedLimit:
    pairing: str
    target: float
    timelike_values: list
    spacelike_values: list

    @property
    def limit_timelike(self) -> float:
        return self.timelike_values[-1]

    @property
    def limit_spacelike(self) -> float:
        return self.spacelike_values[-1]

    def residuals(self, side: str) -> list:
        vals = self.timelike_values if side == TIMELIKE else self.spacelike_values
        return [abs(v - self.target) for v in vals]

    def tail_decreasing(self, n_tail: int = 4) -> bool:
        for side in (TIMELIKE, SPACELIKE):
            r = self.residuals(side)[-n_tail:]
            if not all(b < a for a, b in zip(r, r[1:])):
                return False
        return True

    def to_json(self) -> dict:
        return {
            "pairing": self.pairing,
            "target": self.target,
            "limit_timelike": self.limit_timelike,
            "limit_spacelike": self.limit_spacelike,
            "final_residual_timelike": self.residuals(TIMELIKE)[-1],
            "final_residual_spacelike": self.residuals(SPACELIKE)[-1],
            "tail_decreasing": self.tail_decreasing(),
        }


@dataclass
class NullLimitReport:
    y_null: np.ndarray
    a_dot_y: float
    deltas: list
    traces: dict = field(default_factory=dict)
    randers: OneSidedLimit | None = None

    @property
    def one_sided_gap(self) -> float:
        """Largest |timelike-side limit - spacelike-side limit| over the traced pairings."""
        return max(abs(t.limit_timelike - t.limit_spacelike) for t in self.traces.values())

    def to_json(self) -> dict:
        return {
            "y_null": self.y_null.tolist(),
            "a_dot_y": self.a_dot_y,
            "deltas": self.deltas,
            "traces": {k: v.to_json() for k, v in self.traces.items()},
            "randers": self.randers.to_json() if self.randers else None,
        }


def null_limit_check(d: RandersData, y_null, sequence_len: int = 12, rep="dirac",
                     tol: float = DEFAULT_NULL_TOL) -> NullLimitReport:
    """Trace expressions along sequences approaching a null vector from both sides.

    Tr(M.F_A) tends to 4 A.y and Tr(M.Ft_A) to -4 A.y; the glued Randers
    function tends to A.y.
    """
    if sequence_len < 4:
        raise ValueError("sequence_len must be at least 4")
    if causal_character(d.metric, y_null, tol) != NULL:
        raise NotNull(f"y is not null within {tol:g}: g(y,y) = {norm_squared(d.metric, y_null):.3e}")
    exact, tl_seq, deltas = approach_sequence(d.metric, y_null, TIMELIKE, sequence_len)
    _, sl_seq, _ = approach_sequence(d.metric, y_null, SPACELIKE, sequence_len)
    ay = d.A(exact)
    targets = {("M", "F"): 4.0 * ay, ("M", "Ft"): -4.0 * ay}
    report = NullLimitReport(exact, ay, deltas)
    for (left, right), target in targets.items():
        vals = {}
        for side, seq in ((TIMELIKE, tl_seq), (SPACELIKE, sl_seq)):
            vals[side] = [pairing_trace(left, right, d.context(y, rep, 0.0)) for y in seq]
        report.traces[f"{left}*{right}"] = OneSidedLimit(
            f"{left}*{right}", target, vals[TIMELIKE], vals[SPACELIKE]
        )
    report.randers = OneSidedLimit(
        "randers", ay,
        [randers_norm(d, y, rep, 0.0) for y in tl_seq],
        [randers_norm(d, y, rep, 0.0) for y in sl_seq],
    )
    return report


# angular metric ---------------------------------------------------------------


def angular_lagrangian_closed(d: RandersData, y, variant: str = "minus") -> float:
    q = norm_squared(d.metric, y)
    ay2 = d.A(y) ** 2
    return q - ay2 if variant == "minus" else q + ay2


def angular_lagrangian(d: RandersData, y, variant: str = "minus", rep="dirac") -> float:
    """1/4 Tr(F_A . Ft_A) (``minus``) or 1/4 Tr(F_A . F_A) (``plus``)."""
    if variant not in ("minus", "plus"):
        raise ValueError("variant is 'minus' or 'plus'")
    right = "Ft" if variant == "minus" else "F"
    ctx = d.context(y, rep, 0.0)
    return 0.25 * pairing_trace("F", right, ctx)


# second-order Randers -------------------------------------------------------------


@dataclass(frozen=True)
class SecondOrderLagrangian:
    """(|g(y,y)|^(1/2) + A.y)^2 by three routes.

    ``trace_squared`` is (1/16) Tr^2 of the oracle pairing; ``trace_quartic``
    is 1/4 Tr(M.M.P.P) for the same pairing P.  Null points use the
    timelike-side limit of each trace route.
    """

    causal: str
    direct: float
    trace_squared: float
    trace_quartic: float

    @property
    def value(self) -> float:
        return self.direct


def _second_order_traces(d, y, rep, char):
    left, right, _ = ORACLE_PAIRING[char]
    ctx = d.context(y, rep, 0.0)
    g = {"M": M(), "F": F("A"), "Ft": Ft("A")}
    p = g[left] * g[right]
    tr = numeric_trace(evaluate(p, ctx)).real
    quart = numeric_trace(evaluate(p * p, ctx)).real
    return tr * tr / 16.0, quart / 4.0


def second_order_lagrangian(d: RandersData, y, rep="dirac",
                            tol: float = DEFAULT_NULL_TOL) -> SecondOrderLagrangian:
    char = causal_character(d.metric, y, tol)
    direct = randers_norm_closed(d, y, tol) ** 2
    if char != NULL:
        sq, quart = _second_order_traces(d, y, rep, char)
        return SecondOrderLagrangian(char, direct, sq, quart)
    _, seq, deltas = approach_sequence(d.metric, y, TIMELIKE, 12)
    sq_vals, q_vals = zip(*(_second_order_traces(d, z, rep, TIMELIKE) for z in seq))
    return SecondOrderLagrangian(char, direct, sqrt_richardson(sq_vals, deltas),
                                 sqrt_richardson(q_vals, deltas))


# fundamental tensor ---------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class FundamentalTensor:
    components: np.ndarray
    regular: bool
    condition_value: float | None
    det: float
    step: float
    step_change: float
    asymmetry: float

    @property
    def recommended(self) -> bool | None:
        """Regularity recommendation from |g*(A,A)| < 1 (None without a form)."""
        if self.condition_value is None:
            return None
        return abs(self.condition_value) < 1.0

    def to_json(self) -> dict:
        return {
            "components": self.components.tolist(),
            "regular": self.regular,
            "condition_value": self.condition_value,
            "recommended": self.recommended,
            "det": self.det,
            "step": self.step,
            "step_change": self.step_change,
            "asymmetry": self.asymmetry,
        }


def _half_hessian(L, y0, h):
    """g_ij = 1/2 d^2 L / dy^i dy^j by central differences (mixed and pure)."""
    e = np.eye(4) * h
    H = np.empty((4, 4))
    for i in range(4):
        for j in range(4):
            H[i, j] = (L(y0 + e[i] + e[j]) - L(y0 + e[i] - e[j])
                       - L(y0 - e[i] + e[j]) + L(y0 - e[i] - e[j])) / (4.0 * h * h)
    return 0.5 * H


def fundamental_tensor(L: Callable[[np.ndarray], float], y0, h: float | None = None,
                       metric: Metric4 | None = None, form=None) -> FundamentalTensor:
    """Half the y-Hessian of ``L`` at ``y0``; also evaluated at h/2."""
    y0 = _vec(y0)
    if h is None:
        h = FD_REL_STEP * max(1.0, float(np.linalg.norm(y0)))
    H = _half_hessian(L, y0, h)
    H2 = _half_hessian(L, y0, h / 2.0)
    if not (np.all(np.isfinite(H)) and np.all(np.isfinite(H2))):
        raise NumericalBreakdown("non-finite Lagrangian values in the difference stencil")
    scale = max(1.0, float(np.max(np.abs(H))))
    asym = float(np.max(np.abs(H - H.T)))
    if asym > ASYMMETRY_TOL * scale:
        raise NumericalBreakdown(f"Hessian asymmetry {asym:.3e} exceeds tolerance")
    G = 0.5 * (H + H.T)
    det = float(np.linalg.det(G))
    regular = abs(det) > REGULARITY_RTOL * scale**4
    cond = None
    if form is not None:
        if metric is None:
            raise ValueError("the regularity condition needs the metric")
        cond = dual_norm_squared(metric, form)
    return FundamentalTensor(G, bool(regular), cond, det, h,
                             float(np.max(np.abs(H - H2))), asym)


def angular_fundamental_tensor(d: RandersData, y0, variant: str = "minus", rep="dirac",
                               h: float | None = None) -> FundamentalTensor:
    """Fundamental tensor of the trace-built angular Lagrangian."""
    return fundamental_tensor(lambda y: angular_lagrangian(d, y, variant, rep), y0, h,
                              d.metric, d.A)
