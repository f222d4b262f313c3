"""Concrete 4x4 gamma-matrix representations for any 4D signature.

Each representation starts from a standard set for signature (+,-,-,-);
generators whose square has the wrong sign for the requested signature
are multiplied by the imaginary unit.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .metric import DEFAULT_SIGNATURE, parse_signature

REP_IDS = ("dirac", "weyl", "majorana")
BASE_SIGNATURE = (1, -1, -1, -1)
CLIFFORD_TOL = 1e-12

I4 = np.eye(4, dtype=complex)
I4.setflags(write=False)

_I2 = np.eye(2, dtype=complex)
_Z2 = np.zeros((2, 2), dtype=complex)
_SX = np.array([[0, 1], [1, 0]], dtype=complex)
_SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
_SZ = np.array([[1, 0], [0, -1]], dtype=complex)


def _blk(a, b, c, d):
    return np.block([[a, b], [c, d]])


def _base(rep_id):
    if rep_id == "dirac":
        g0 = _blk(_I2, _Z2, _Z2, -_I2)
        rest = [_blk(_Z2, s, -s, _Z2) for s in (_SX, _SY, _SZ)]
        return [g0] + rest
    if rep_id == "weyl":
        g0 = _blk(_Z2, _I2, _I2, _Z2)
        rest = [_blk(_Z2, s, -s, _Z2) for s in (_SX, _SY, _SZ)]
        return [g0] + rest
    if rep_id == "majorana":
        return [
            _blk(_Z2, _SY, _SY, _Z2),
            _blk(1j * _SZ, _Z2, _Z2, 1j * _SZ),
            _blk(_Z2, -_SY, _SY, _Z2),
            _blk(-1j * _SX, _Z2, _Z2, -1j * _SX),
        ]
    raise ValueError(f"unknown representation {rep_id!r}; choose from {REP_IDS}")


def anticommutator_residual(gammas, signature) -> float:
    worst = 0.0
    for i in range(4):
        for j in range(4):
            ac = gammas[i] @ gammas[j] + gammas[j] @ gammas[i]
            target = 2.0 * signature[i] * (i == j) * I4
            worst = max(worst, float(np.max(np.abs(ac - target))))
    return worst


@dataclass(frozen=True, eq=False)
class GammaRep:
    gammas: tuple
    signature: tuple[int, ...]
    rep_id: str

    def __post_init__(self):
        res = anticommutator_residual(self.gammas, self.signature)
        if res > CLIFFORD_TOL:
            raise ValueError(f"Clifford relation violated (residual {res:.3e})")
        for g in self.gammas:
            if abs(np.trace(g)) > CLIFFORD_TOL:
                raise ValueError("gamma matrices must be traceless")

    def __getitem__(self, i):
        return self.gammas[i]

    def to_json(self) -> dict:
        return {
            "rep": self.rep_id,
            "signature": list(self.signature),
            "gammas": [[[[z.real, z.imag] for z in row] for row in g] for g in self.gammas],
        }


def build_representation(rep_id: str = "dirac", signature=DEFAULT_SIGNATURE) -> GammaRep:
    return _build(rep_id, parse_signature(signature))


@lru_cache(maxsize=None)
def _build(rep_id: str, sig: tuple) -> GammaRep:
    # GammaRep is immutable (read-only matrices), so instances can be shared
    gammas = []
    for g, want, have in zip(_base(rep_id), sig, BASE_SIGNATURE):
        g = g.astype(complex)
        if want != have:
            g = 1j * g
        g.setflags(write=False)
        gammas.append(g)
    return GammaRep(tuple(gammas), sig, rep_id)


def slash(rep: GammaRep, v) -> np.ndarray:
    """sum_i v^i gamma_i for frame components v."""
    v = np.asarray(v)
    return np.einsum("i,iab->ab", v, np.asarray(rep.gammas))
