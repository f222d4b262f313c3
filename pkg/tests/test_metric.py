import json

import numpy as np
import pytest
from hypothesis import given, settings

from cliffsheaf.errors import DegenerateMetric, InvalidSignature
from cliffsheaf.metric import (
    NULL,
    SPACELIKE,
    TIMELIKE,
    Metric4,
    OneForm,
    Tangent,
    causal_character,
    dual_norm_squared,
    frame_residual,
    lower_index,
    norm_squared,
    orthonormal_frame,
    parse_signature,
    raise_index,
    random_metric,
)

from conftest import ETA, vec4


def test_norm_squared_examples():
    assert norm_squared(ETA, [0, 3, 4, 0]) == 25
    assert norm_squared(ETA, [2, 1, 0, 0]) == -3


def test_causal_character():
    assert causal_character(ETA, [1, 0, 0, 0]) == TIMELIKE
    assert causal_character(ETA, [0, 1, 0, 0]) == SPACELIKE
    assert causal_character(ETA, [1, 1, 0, 0]) == NULL
    # tolerance widens the null band
    assert causal_character(ETA, [1, 1.001, 0, 0], tol=0.01) == NULL


@pytest.mark.parametrize("text,want", [
    ("-+++", (-1, 1, 1, 1)),
    ("-1,1,1,1", (-1, 1, 1, 1)),
    ((1, -1, -1, -1), (1, -1, -1, -1)),
])
def test_parse_signature(text, want):
    assert parse_signature(text) == want


@pytest.mark.parametrize("bad", ["-++", "-+x+", (1, 2, 1, 1), "1,1,1"])
def test_parse_signature_rejects(bad):
    with pytest.raises(InvalidSignature):
        parse_signature(bad)


def test_degenerate_metric_rejected():
    with pytest.raises(DegenerateMetric):
        Metric4(np.diag([-1.0, 1.0, 1.0, 0.0]))


def test_signature_must_match_eigenvalues():
    with pytest.raises(InvalidSignature):
        Metric4(np.diag([-1.0, 1, 1, 1]), (1, -1, -1, 1))


def test_metric_is_symmetrised():
    g = np.diag([-1.0, 1, 1, 1])
    g[0, 1] = 0.2
    m = Metric4(g)
    assert np.allclose(m.components, m.components.T)


def test_json_round_trip(rng):
    m = random_metric(rng)
    back = Metric4.from_json(json.loads(json.dumps(m.to_json())))
    assert np.array_equal(back.components, m.components)
    assert back.signature == m.signature


@pytest.mark.parametrize("sig", [(-1, 1, 1, 1), (1, -1, -1, -1), (1, 1, 1, 1), (-1, -1, 1, 1)])
def test_orthonormal_frame_random(rng, sig):
    for _ in range(20):
        m = random_metric(rng, sig, cond=50.0)
        fr = orthonormal_frame(m)
        assert fr.eta == m.signature
        assert frame_residual(m, fr) < 1e-12


def test_raise_lower_inverse(rng):
    m = random_metric(rng)
    a = rng.normal(size=4)
    assert np.allclose(lower_index(m, raise_index(m, a)), a, atol=1e-12)


def test_dual_norm():
    assert dual_norm_squared(ETA, [0.5, 0, 0, 0]) == pytest.approx(-0.25)
    assert dual_norm_squared(ETA, [0, 0.5, 0, 0]) == pytest.approx(0.25)


def test_oneform_pairing():
    a = OneForm(np.array([0.1, 0.2, 0, 0]))
    assert a(Tangent(np.array([1.0, 1, 0, 0]))) == pytest.approx(0.3)


@given(vec4, vec4)
@settings(max_examples=50)
def test_frame_preserves_norm(y, z):
    m = random_metric(np.random.default_rng(7))
    fr = orthonormal_frame(m)
    yf, zf = fr.vector_components(y), fr.vector_components(z)
    eta = np.array(fr.eta, float)
    want = y @ m.components @ z
    assert np.sum(eta * yf * zf) == pytest.approx(want, rel=1e-9, abs=1e-9)
