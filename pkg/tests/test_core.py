import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from puosc import core
from puosc.errors import DegenerateFrequencies, NotOnRealitySurface

SQ2 = core.Frequencies(math.sqrt(2), 1.0)


@pytest.fixture
def coeffs():
    return core.compute_coefficients(SQ2)


freq_pairs = st.tuples(st.floats(0.1, 10), st.floats(0.1, 10)).filter(lambda p: abs(p[0] - p[1]) > 1e-3)


def test_coefficients_unit_case(coeffs):
    assert (coeffs.a, coeffs.b, coeffs.c) == pytest.approx((1, 1, 2), abs=1e-15)


def test_coefficients_negative_sign():
    c = core.compute_coefficients(SQ2, sign=-1)
    assert (c.a, c.b, c.c) == pytest.approx((-1, -1, -2), abs=1e-15)
    assert c.b * (c.c - c.a) == pytest.approx(1, abs=1e-15)


def test_degenerate_frequencies():
    with pytest.raises(DegenerateFrequencies):
        core.compute_coefficients(core.Frequencies(1.0, 1.0))


@pytest.mark.parametrize("bad", [(0.0, 1.0), (-1.0, 1.0)])
def test_nonpositive_frequencies(bad):
    with pytest.raises(ValueError):
        core.Frequencies(*bad)


def test_bad_sign():
    with pytest.raises(ValueError):
        core.compute_coefficients(SQ2, sign=2)


@settings(max_examples=200, deadline=None)
@given(freq_pairs, st.sampled_from([1, -1]))
def test_coefficient_identities(pair, sign):
    f = core.Frequencies(max(pair), min(pair))
    c = core.compute_coefficients(f, sign)
    assert c.b * (c.c - c.a) == pytest.approx(1, abs=1e-12)
    assert c.a * c.c == pytest.approx(f.prod_sq * c.b**2, rel=1e-12)
    assert c.a == pytest.approx(f.omega2**2 * c.b, rel=1e-15)
    assert c.c == pytest.approx(f.omega1**2 * c.b, rel=1e-15)


def test_build_M_entries(coeffs):
    M = core.build_M(coeffs)
    assert M[0, 0] == pytest.approx(1j)
    assert M[0, 1] == pytest.approx(1)
    assert M[3, 0] == pytest.approx(2j)
    assert M[3, 1] == pytest.approx(1)


@settings(max_examples=100, deadline=None)
@given(freq_pairs, st.sampled_from([1, -1]))
def test_M_symplectic_and_unimodular(pair, sign):
    c = core.compute_coefficients(core.Frequencies(max(pair), min(pair)), sign)
    M = core.build_M(c)
    assert core.symplectic_residual(M) < 1e-12 * max(1.0, np.abs(M).max() ** 2)
    assert abs(np.linalg.det(M) - 1) < 1e-12 * max(1.0, np.abs(M).max() ** 4)
    assert np.allclose(core.build_M_inverse(c) @ M, np.eye(4), atol=1e-12 * np.abs(M).max() ** 2)


def test_symplectic_residual_identity():
    assert core.symplectic_residual(np.eye(4)) == 0


def test_to_complex_examples(coeffs):
    assert np.all(core.to_complex(core.RealPhasePoint(0, 0, 0, 0), coeffs).as_array() == 0)
    X = core.to_complex(core.RealPhasePoint(1, 0, 0, 0), coeffs)
    assert np.allclose(X.as_array(), [1j, 0, 0, 2j], atol=1e-15)
    back = core.to_real(core.ComplexPhasePoint(1j, 0, 0, 2j), coeffs)
    assert np.allclose(back.as_array(), [1, 0, 0, 0], atol=1e-15)


def test_to_real_off_surface(coeffs):
    X = core.ComplexPhasePoint(1, 0, 0, 0)
    with pytest.raises(NotOnRealitySurface) as info:
        core.to_real(X, coeffs)
    assert np.allclose(info.value.values, core.inverse_map(X, coeffs))


def test_reality_residual_examples(coeffs):
    assert core.reality_residual(core.ComplexPhasePoint(0, 0, 0, 0), coeffs) == 0
    res = core.reality_residuals(core.ComplexPhasePoint(1, 0, 0, 0), coeffs)
    # first condition: conj(x) - b(a+c) x + 2 b^2 Piz = 1 - 3
    assert res[0] == pytest.approx(2)
    # third condition: conj(Piz) - 2ac x + b(a+c) Piz = -4
    assert res[2] == pytest.approx(4)


@settings(max_examples=100, deadline=None)
@given(freq_pairs, st.lists(st.floats(-10, 10), min_size=4, max_size=4))
def test_reality_residual_on_image(pair, xi):
    c = core.compute_coefficients(core.Frequencies(max(pair), min(pair)))
    X = core.to_complex(core.RealPhasePoint(*xi), c)
    scale = max(1.0, np.abs(X.as_array()).max()) * max(1.0, abs(c.b) * (abs(c.a) + abs(c.c)), 2 * c.b**2, 2 * abs(c.a * c.c))
    assert core.reality_residual(X, c) < 1e-12 * scale
    a, b = core.component_conditions(X, c)
    assert max(a, b) < 1e-12 * scale
