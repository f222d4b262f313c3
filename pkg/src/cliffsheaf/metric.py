"""Constant 4D pseudo-Riemannian metrics, norms and orthonormal frames.

Tangent vectors carry upper indices, one-forms lower indices. Every
downstream evaluation happens in an orthonormal frame where the metric
has components ``diag(eta)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DegenerateMetric, InvalidSignature

DEFAULT_SIGNATURE = (-1, 1, 1, 1)
DEFAULT_NULL_TOL = 1e-12
DEGENERACY_RTOL = 1e-12
FRAME_TOL = 1e-12

TIMELIKE = "timelike"
NULL = "null"
SPACELIKE = "spacelike"


def _readonly(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def _vec(v) -> np.ndarray:
    v = getattr(v, "components", v)
    v = np.asarray(v, dtype=float)
    if v.shape != (4,):
        raise ValueError(f"expected a 4-vector, got shape {v.shape}")
    return v


def parse_signature(sig) -> tuple[int, ...]:
    """Accept ``(-1, 1, 1, 1)``, ``"-1,1,1,1"`` or ``"-+++"``."""
    if isinstance(sig, str):
        s = sig.strip()
        if s and set(s) <= {"+", "-"}:
            out = tuple(1 if c == "+" else -1 for c in s)
        else:
            try:
                out = tuple(int(float(t)) for t in s.split(","))
            except ValueError:
                raise InvalidSignature(f"cannot parse signature {sig!r}") from None
    else:
        out = tuple(int(x) for x in sig)
    if len(out) != 4 or any(x not in (-1, 1) for x in out):
        raise InvalidSignature(f"signature must be four entries in {{+1,-1}}, got {sig!r}")
    return out


@dataclass(frozen=True)
class Tangent:
    components: np.ndarray

    def __post_init__(self):
        c = _vec(self.components)
        if not np.all(np.isfinite(c)):
            raise ValueError("tangent components must be finite")
        object.__setattr__(self, "components", _readonly(c))

    def __mul__(self, lam):
        return Tangent(self.components * float(lam))

    __rmul__ = __mul__


@dataclass(frozen=True)
class OneForm:
    components: np.ndarray
    name: str = "A"

    def __post_init__(self):
        c = _vec(self.components)
        if not np.all(np.isfinite(c)):
            raise ValueError("one-form components must be finite")
        object.__setattr__(self, "components", _readonly(c))

    def __call__(self, y) -> float:
        return float(self.components @ _vec(y))


@dataclass(frozen=True, eq=False)
class Metric4:
    """Symmetric non-degenerate 4x4 metric with an ordered signature.

    ``signature`` fixes the slot order of ``eta`` in orthonormal frames; its
    sign counts must agree with the eigenvalues of ``components``.
    """

    components: np.ndarray
    signature: tuple[int, ...] = field(default=None)

    def __post_init__(self):
        c = np.asarray(self.components, dtype=float)
        if c.shape != (4, 4):
            raise ValueError(f"metric must be 4x4, got shape {c.shape}")
        if not np.all(np.isfinite(c)):
            raise ValueError("metric components must be finite")
        c = 0.5 * (c + c.T)
        scale = np.max(np.abs(c))
        if scale == 0.0 or abs(np.linalg.det(c)) < DEGENERACY_RTOL * scale**4:
            raise DegenerateMetric("metric determinant below degeneracy threshold")
        eig = np.linalg.eigvalsh(c)
        n_neg = int(np.sum(eig < 0))
        if self.signature is None:
            if n_neg == 1:
                sig = DEFAULT_SIGNATURE
            else:
                sig = (-1,) * n_neg + (1,) * (4 - n_neg)
        else:
            sig = parse_signature(self.signature)
            if sig.count(-1) != n_neg:
                raise InvalidSignature(
                    f"signature {sig} has {sig.count(-1)} negative entries, "
                    f"metric eigenvalues have {n_neg}"
                )
        object.__setattr__(self, "components", _readonly(c))
        object.__setattr__(self, "signature", sig)

    @classmethod
    def from_signature(cls, signature=DEFAULT_SIGNATURE) -> "Metric4":
        sig = parse_signature(signature)
        return cls(np.diag(np.array(sig, dtype=float)), sig)

    @property
    def is_lorentzian(self) -> bool:
        return self.signature.count(-1) in (1, 3)

    def is_orthonormal(self) -> bool:
        return bool(np.array_equal(self.components, np.diag(np.array(self.signature, float))))

    def to_json(self) -> dict:
        if self.is_orthonormal():
            return {"signature": list(self.signature)}
        return {"components": self.components.tolist(), "signature": list(self.signature)}

    @classmethod
    def from_json(cls, obj: dict) -> "Metric4":
        if "components" in obj:
            return cls(np.asarray(obj["components"], dtype=float), obj.get("signature"))
        if "signature" in obj:
            return cls.from_signature(obj["signature"])
        raise ValueError("metric JSON needs 'signature' or 'components'")


@dataclass(frozen=True, eq=False)
class Frame4:
    """Columns of ``basis`` are orthonormal: basis.T @ G @ basis = diag(eta)."""

    basis: np.ndarray
    eta: tuple[int, ...]

    def vector_components(self, y) -> np.ndarray:
        return np.linalg.solve(self.basis, _vec(y))

    def form_components(self, a) -> np.ndarray:
        return self.basis.T @ _vec(a)

    def vector_from_frame(self, yf) -> np.ndarray:
        return self.basis @ np.asarray(yf, dtype=float)


def norm_bilinear(m: Metric4, y, z) -> float:
    y, z = _vec(y), _vec(z)
    # symmetrised explicitly so that swapping y and z is bit-identical
    return float(0.5 * (y @ m.components @ z + z @ m.components @ y))


def norm_squared(m: Metric4, y) -> float:
    y = _vec(y)
    return float(y @ m.components @ y)


def causal_character(m: Metric4, y, tol: float = DEFAULT_NULL_TOL) -> str:
    if tol < 0:
        raise ValueError("tol must be non-negative")
    q = norm_squared(m, y)
    if q < -tol:
        return TIMELIKE
    if abs(q) <= tol:
        return NULL
    return SPACELIKE


def dual_metric(m: Metric4) -> Metric4:
    inv = np.linalg.inv(m.components)
    return Metric4(inv, m.signature)


def dual_norm_squared(m: Metric4, a) -> float:
    a = _vec(a)
    return float(a @ dual_metric(m).components @ a)


def raise_index(m: Metric4, a) -> np.ndarray:
    return np.linalg.solve(m.components, _vec(a))


def lower_index(m: Metric4, y) -> np.ndarray:
    return m.components @ _vec(y)


def orthonormal_frame(m: Metric4) -> Frame4:
    """Orthonormal frame ordered to match ``m.signature``.

    Uses a symmetric eigendecomposition; eigenvectors are sign-normalised
    (largest entry positive) and scaled by |lambda|^(-1/2).
    """
    g = m.components
    sig = m.signature
    if np.count_nonzero(g - np.diag(np.diag(g))) == 0:
        lam = np.diag(g).copy()
        vecs = np.eye(4)
    else:
        lam, vecs = np.linalg.eigh(g)
    neg = [i for i in range(4) if lam[i] < 0]
    pos = [i for i in range(4) if lam[i] > 0]
    order = []
    for s in sig:
        order.append(neg.pop(0) if s < 0 else pos.pop(0))
    basis = np.empty((4, 4))
    for slot, k in enumerate(order):
        v = vecs[:, k]
        if v[np.argmax(np.abs(v))] < 0:
            v = -v
        basis[:, slot] = v / np.sqrt(abs(lam[k]))
    basis.setflags(write=False)
    return Frame4(basis, sig)


def frame_residual(m: Metric4, frame: Frame4) -> float:
    return float(np.max(np.abs(frame.basis.T @ m.components @ frame.basis - np.diag(frame.eta))))


def random_metric(rng: np.random.Generator, signature: Sequence[int] = DEFAULT_SIGNATURE,
                  cond: float = 10.0) -> Metric4:
    """Random well-conditioned metric with the given signature (for tests and scripts)."""
    sig = parse_signature(signature)
    q, _ = np.linalg.qr(rng.normal(size=(4, 4)))
    mags = np.exp(rng.uniform(0.0, np.log(cond), size=4))
    g = q @ np.diag(np.array(sig) * mags) @ q.T
    return Metric4(g, sig)
