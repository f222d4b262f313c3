"""Flat-space Dirac-type operators, their symbols and a lattice check.

Plane waves use the phase exp(-i p_j x^j), so i d_j acts as +p_j and an
operator i gamma^j d_j - m has symbol slash(p_raised) - m.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import EvalContext, M, evaluate
from .errors import FlatOnly, IncommensurateMomentum, MassRequired
from .gamma import I4, GammaRep, slash
from .metric import Metric4, _vec
from .trace import numeric_trace

KINDS = ("dirac_mass", "dirac_A", "u1_covariant")
DEFAULT_LENGTH = 2.0 * np.pi
BASE_EXTENT = 8
HOMOGENEITY_LAMBDAS = (0.5, 2.0, 4.0)


@dataclass(frozen=True, eq=False)
class FlatOperator:
    kind: str
    m: float = 0.0
    A: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        if self.m < 0:
            raise ValueError("mass must be non-negative")
        if self.kind == "dirac_mass" and not self.m > 0:
            raise MassRequired("dirac_mass needs m > 0")
        if self.kind != "dirac_mass":
            if self.A is None:
                raise ValueError(f"{self.kind} needs a one-form A")
            object.__setattr__(self, "A", _vec(self.A))


@dataclass(frozen=True, eq=False)
class PlaneWave:
    p: np.ndarray
    u: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "p", _vec(self.p))
        u = np.asarray(self.u, dtype=complex)
        if u.shape != (4,) or not np.any(u):
            raise ValueError("amplitude must be a non-zero 4-spinor")
        object.__setattr__(self, "u", u)


@dataclass(frozen=True)
class Lattice:
    """Periodic hypercubic lattice with ``extent`` sites per axis."""

    h: float
    extent: int

    def __post_init__(self):
        if self.extent < 8:
            raise ValueError("extent must be at least 8")
        if not self.h > 0:
            raise ValueError("spacing must be positive")

    @classmethod
    def periodic(cls, extent: int, length: float = DEFAULT_LENGTH) -> "Lattice":
        return cls(length / extent, extent)

    @property
    def length(self) -> float:
        return self.h * self.extent


def _eta(rep: GammaRep) -> np.ndarray:
    return np.array(rep.signature, dtype=float)


def _check_flat(rep: GammaRep, metric: Metric4 | None):
    if metric is None:
        return
    if not metric.is_orthonormal() or tuple(metric.signature) != tuple(rep.signature):
        raise FlatOnly("operators are defined for constant orthonormal (flat) metrics only")


def symbol_matrix(op: FlatOperator, p, rep: GammaRep, metric: Metric4 | None = None) -> np.ndarray:
    """Matrix obtained by replacing i d_j with p_j."""
    _check_flat(rep, metric)
    eta = _eta(rep)
    p = _vec(p)
    sp = slash(rep, eta * p)
    if op.kind == "dirac_mass":
        return sp - op.m * I4
    a_up = eta * op.A
    if op.kind == "dirac_A":
        return sp - float(a_up @ p) * I4
    return sp - slash(rep, a_up)


def _check_commensurate(p, lat: Lattice):
    modes = p * lat.length / (2.0 * np.pi)
    if np.max(np.abs(modes - np.round(modes))) > 1e-9:
        raise IncommensurateMomentum(
            f"p*L/(2 pi) = {modes} is not integral for box length {lat.length:g}"
        )


def sample_wave(w: PlaneWave, lat: Lattice) -> np.ndarray:
    """u exp(-i p.x) on the lattice, shape (4, N, N, N, N)."""
    x = np.arange(lat.extent) * lat.h
    phases = [np.exp(-1j * w.p[j] * x) for j in range(4)]
    phase = np.einsum("a,b,c,d->abcd", *phases)
    return w.u[:, None, None, None, None] * phase[None]


def apply_discrete(op: FlatOperator, w: PlaneWave, lat: Lattice, rep: GammaRep) -> np.ndarray:
    """Apply the operator with central differences on the periodic lattice."""
    _check_commensurate(w.p, lat)
    psi = sample_wave(w, lat)
    eta = _eta(rep)
    gam = np.asarray(rep.gammas)
    out = np.zeros_like(psi)
    for j in range(4):
        # i * central difference along axis j
        d = 1j * (np.roll(psi, -1, axis=j + 1) - np.roll(psi, 1, axis=j + 1)) / (2.0 * lat.h)
        gup = eta[j] * gam[j]
        out += np.einsum("ab,b...->a...", gup, d)
        if op.kind == "dirac_A":
            out -= eta[j] * op.A[j] * d
    if op.kind == "dirac_mass":
        out -= op.m * psi
    elif op.kind == "u1_covariant":
        out -= np.einsum("ab,b...->a...", slash(rep, eta * op.A), psi)
    return out


def discretization_error(op: FlatOperator, w: PlaneWave, lat: Lattice, rep: GammaRep) -> float:
    """max over sites of |D_h psi - symbol . u . phase|."""
    got = apply_discrete(op, w, lat, rep)
    want = np.einsum("ab,b...->a...", symbol_matrix(op, w.p, rep), sample_wave(w, lat))
    return float(np.max(np.abs(got - want)))


@dataclass
class ConvergenceReport:
    spacings: list
    max_errors: list
    orders: list
    symbol_residual: float | None = None

    @property
    def order_estimate(self) -> float:
        return float(np.mean(self.orders))

    def to_json(self) -> dict:
        return {
            "order_estimate": self.order_estimate,
            "orders": self.orders,
            "spacings": self.spacings,
            "max_errors": self.max_errors,
            "symbol_residual": self.symbol_residual,
        }


def convergence_study(op: FlatOperator, w: PlaneWave, rep: GammaRep, levels: int = 3,
                      base_extent: int = BASE_EXTENT,
                      length: float = DEFAULT_LENGTH) -> ConvergenceReport:
    """Errors over ``levels`` lattices, halving h each time at fixed box length."""
    if levels < 2:
        raise ValueError("need at least two refinement levels")
    hs, errs = [], []
    for k in range(levels):
        lat = Lattice.periodic(base_extent * 2**k, length)
        hs.append(lat.h)
        errs.append(discretization_error(op, w, lat, rep))
    orders = [float(np.log2(errs[i] / errs[i + 1])) for i in range(levels - 1)]
    return ConvergenceReport(hs, errs, orders)


def mass_shell_symbol_residual(p, rep: GammaRep) -> float:
    """max |symbol(dirac_mass, p) - m M(y = p*/m)| with m = |g*(p,p)|^(1/2)."""
    eta = _eta(rep)
    p = _vec(p)
    m = float(np.sqrt(abs(np.sum(eta * p * p))))
    op = FlatOperator("dirac_mass", m)
    ctx = EvalContext.create(eta * p / m, metric=Metric4.from_signature(rep.signature), rep=rep)
    return float(np.max(np.abs(symbol_matrix(op, p, rep) - m * evaluate(M(), ctx))))


@dataclass(frozen=True)
class GammaNormTrace:
    """f = 1/4 Tr(M . Gamma_{A,m}) split as f1 (1-homogeneous) + f0 (0-homogeneous)."""

    value: float
    f1: float
    f0: float
    reconstruction_residual: float

    @property
    def homogeneous(self) -> bool:
        return abs(self.f0) <= 1e-12 * max(1.0, abs(self.f1))


def _gamma_norm_parts(ctx: EvalContext, a, m: float):
    eta = np.array(ctx.frame.eta, dtype=float)
    a_frame = ctx.frame.form_components(a)
    mm = evaluate(M(), ctx)
    f1 = 0.25 * numeric_trace(mm @ ctx.slash_y()).real
    f0 = -m * 0.25 * numeric_trace(mm @ slash(ctx.rep, eta * a_frame)).real
    return f1, f0


def gamma_norm_trace(ctx: EvalContext, a, m: float = 1.0) -> GammaNormTrace:
    """Norm function of Gamma_{A,m} = slash(y) - m slash(A_raised), kept as a matrix."""
    a = _vec(a)
    eta = np.array(ctx.frame.eta, dtype=float)
    gam = ctx.slash_y() - m * slash(ctx.rep, eta * ctx.frame.form_components(a))
    value = 0.25 * numeric_trace(evaluate(M(), ctx) @ gam).real
    f1, f0 = _gamma_norm_parts(ctx, a, m)
    worst = abs(value - f1 - f0)
    for lam in HOMOGENEITY_LAMBDAS:
        cl = ctx.with_y(lam * ctx.y.components)
        gl = cl.slash_y() - m * slash(cl.rep, eta * cl.frame.form_components(a))
        fl = 0.25 * numeric_trace(evaluate(M(), cl) @ gl).real
        worst = max(worst, abs(fl - lam * f1 - f0))
    return GammaNormTrace(float(value), float(f1), float(f0) + 0.0, float(worst))
