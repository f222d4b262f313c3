import numpy as np
import pytest

from cliffsheaf.algebra import EvalContext, M, evaluate
from cliffsheaf.diracop import (
    KINDS,
    FlatOperator,
    Lattice,
    PlaneWave,
    apply_discrete,
    convergence_study,
    discretization_error,
    gamma_norm_trace,
    mass_shell_symbol_residual,
    sample_wave,
    symbol_matrix,
)
from cliffsheaf.errors import FlatOnly, IncommensurateMomentum, MassRequired
from cliffsheaf.gamma import I4, build_representation, slash
from cliffsheaf.metric import Metric4, random_metric

from conftest import REPS

REP = build_representation("dirac")
U = np.array([1.0, 0.5, -0.25j, 0.125])
A = np.array([0.3, -0.2, 0.1, 0.4])


def op_of(kind, m=1.0):
    return FlatOperator(kind, m if kind == "dirac_mass" else 0.7, None if kind == "dirac_mass" else A)


def test_operator_validation():
    with pytest.raises(MassRequired):
        FlatOperator("dirac_mass", 0.0)
    with pytest.raises(ValueError):
        FlatOperator("dirac_A", 1.0)
    with pytest.raises(ValueError):
        FlatOperator("nope", 1.0)
    with pytest.raises(ValueError):
        PlaneWave([0, 0, 0, 0], np.zeros(4))
    with pytest.raises(ValueError):
        Lattice(0.1, 4)


def test_symbol_at_unit_timelike_momentum():
    # p lower = (-1,0,0,0) raises to p* = (1,0,0,0)
    sym = symbol_matrix(FlatOperator("dirac_mass", 1.0), [-1.0, 0, 0, 0], REP)
    ctx = EvalContext.create([1.0, 0, 0, 0])
    assert np.max(np.abs(sym - evaluate(M(), ctx))) <= 1e-12


def test_symbol_trivial_cases():
    assert np.allclose(symbol_matrix(FlatOperator("dirac_mass", 2.0), np.zeros(4), REP), -2 * I4)
    p = np.array([0.3, 1.0, -2.0, 0.5])
    eta = np.array([-1.0, 1, 1, 1])
    sym = symbol_matrix(FlatOperator("dirac_A", 0.0, np.zeros(4)), p, REP)
    assert np.allclose(sym, slash(REP, eta * p))


@pytest.mark.parametrize("rep_id", REPS)
@pytest.mark.parametrize("sig", [(-1, 1, 1, 1), (1, -1, -1, -1)])
def test_mass_shell_symbol_consistency(rep_id, sig):
    rep = build_representation(rep_id, sig)
    rng = np.random.default_rng(5)
    for _ in range(50):
        p = rng.normal(size=4)
        assert mass_shell_symbol_residual(p, rep) <= 1e-12


@pytest.mark.parametrize("sig", [(-1, 1, 1, 1), (1, -1, -1, -1)])
def test_symbol_singular_where_dual_norm_equals_plus_m_squared(sig):
    # S^2 = g*(p,p) 1, so (S - m)(S + m) = (g*(p,p) - m^2) 1
    rep = build_representation("dirac", sig)
    eta = np.array(sig, float)
    rng = np.random.default_rng(9)
    seen = {1: 0, -1: 0}
    while min(seen.values()) < 10:
        p = rng.normal(size=4)
        q = np.sum(eta * p * p)
        if abs(q) < 0.1:
            continue
        m = np.sqrt(abs(q))
        det = np.linalg.det(symbol_matrix(FlatOperator("dirac_mass", m), p, rep))
        if q > 0:
            assert abs(det) <= 1e-9
        else:
            # g*(p,p) = -m^2 gives det = (2 m^2)^2, never zero
            assert abs(det) == pytest.approx(4 * m**4, rel=1e-9)
        seen[int(np.sign(q))] += 1


def test_physical_shell_in_mostly_minus():
    rep = build_representation("dirac", (1, -1, -1, -1))
    m, k = 1.3, np.array([0.4, -0.2, 0.7])
    p = np.concatenate([[np.sqrt(m**2 + k @ k)], k])
    assert abs(np.linalg.det(symbol_matrix(FlatOperator("dirac_mass", m), p, rep))) <= 1e-9


def test_flat_only():
    with pytest.raises(FlatOnly):
        symbol_matrix(FlatOperator("dirac_mass", 1.0), np.zeros(4), REP,
                      random_metric(np.random.default_rng(0)))
    symbol_matrix(FlatOperator("dirac_mass", 1.0), np.zeros(4), REP, Metric4.from_signature())


def test_constant_wave():
    lat = Lattice.periodic(8)
    op = FlatOperator("dirac_mass", 1.5)
    out = apply_discrete(op, PlaneWave(np.zeros(4), U), lat, REP)
    assert np.allclose(out, -1.5 * U[:, None, None, None, None])


def test_incommensurate():
    with pytest.raises(IncommensurateMomentum):
        apply_discrete(FlatOperator("dirac_mass", 1.0), PlaneWave([0.5, 0, 0, 0], U),
                       Lattice.periodic(8), REP)


def test_sample_wave_shape_and_phase():
    lat = Lattice.periodic(8)
    psi = sample_wave(PlaneWave([1.0, 0, 0, 0], U), lat)
    assert psi.shape == (4, 8, 8, 8, 8)
    assert np.allclose(psi[:, 1, 0, 0, 0], U * np.exp(-1j * lat.h))


def test_error_ratio_on_halving():
    w = PlaneWave([1.0, -1.0, 0.0, 1.0], U)
    e1 = discretization_error(op_of("dirac_mass"), w, Lattice.periodic(16), REP)
    e2 = discretization_error(op_of("dirac_mass"), w, Lattice.periodic(32), REP)
    assert 3.6 <= e1 / e2 <= 4.4


@pytest.mark.parametrize("kind", KINDS)
def test_convergence_order(kind):
    w = PlaneWave([1.0, 1.0, 0.0, -1.0], U)
    rep = convergence_study(op_of(kind), w, REP, levels=3)
    assert 1.9 <= rep.order_estimate <= 2.1
    assert rep.max_errors[0] > rep.max_errors[1] > rep.max_errors[2]
    assert set(rep.to_json()) >= {"order_estimate", "max_errors", "symbol_residual"}


def test_gamma_norm_trace_unit_timelike():
    g = gamma_norm_trace(EvalContext.create([1.0, 0, 0, 0]), np.zeros(4), 1.0)
    assert g.value == pytest.approx(-1.0)
    assert g.f0 == 0.0 and g.homogeneous
    assert g.reconstruction_residual <= 1e-9


def test_gamma_norm_trace_non_homogeneous():
    ctx = EvalContext.create([1.0, 0, 0, 0])
    g = gamma_norm_trace(ctx, [0.1, 0, 0, 0], 1.0)
    assert g.f0 == pytest.approx(-0.1)
    assert not g.homogeneous
    g2 = gamma_norm_trace(ctx.with_y([2.0, 0, 0, 0]), [0.1, 0, 0, 0], 1.0)
    assert abs(g2.value - 2 * g.value) > 1e-6


def test_gamma_norm_trace_decomposition_random():
    rng = np.random.default_rng(3)
    for _ in range(100):
        y = rng.normal(size=4)
        if abs(-y[0] ** 2 + y[1:] @ y[1:]) < 1e-3:
            continue
        g = gamma_norm_trace(EvalContext.create(y), rng.uniform(-0.5, 0.5, 4), rng.uniform(0, 2))
        assert g.reconstruction_residual <= 1e-9
