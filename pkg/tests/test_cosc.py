import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from puosc import cosc
from puosc.errors import Caustic, GridTooCoarse, NonpositiveEpsilon, OrderTooLarge, QuadratureDivergence

GRID = np.linspace(-6, 6, 1201)


def test_psi_examples():
    assert cosc.psi_n(0, 0.0, 0.0) == pytest.approx(math.pi**-0.25)
    assert cosc.psi_n(1, 0.4, 0.0) == pytest.approx(0.0, abs=1e-16)
    assert cosc.psi_n(0, 0.3, 1.0) == pytest.approx(math.pi**-0.25 * math.exp(0.15 - 0.5))


def test_psi_order_limit():
    with pytest.raises(OrderTooLarge):
        cosc.psi_n(61, 0.1, 0.0)


def test_epsilon_domain():
    with pytest.raises(ValueError):
        cosc.Epsilon(1.0)


def test_inner_product_examples():
    e = 0.3
    psi = [cosc.Eigenstate(n, e) for n in range(4)]
    assert cosc.inner_product_mu(psi[0], psi[0], e) == pytest.approx(1, abs=1e-12)
    assert cosc.inner_product_mu(psi[0], psi[1], e) == pytest.approx(0, abs=1e-12)
    s3 = cosc.Eigenstate(3, 0.4)
    assert abs(cosc.inner_product_mu(s3, s3, 0.4) - 1) < 1e-10


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10), st.integers(0, 10), st.floats(-0.5, 0.5))
def test_orthonormality(n, m, e):
    ip = cosc.inner_product_mu(cosc.Eigenstate(n, e), cosc.Eigenstate(m, e), e)
    assert abs(ip - (n == m)) < 1e-10


def test_inner_product_divergence():
    grow = lambda q: np.exp(q**2)  # noqa: E731
    with pytest.raises(QuadratureDivergence):
        cosc.inner_product_mu(grow, grow, 0.3)


@pytest.mark.parametrize("n,e,tol", [(0, 0.0, 1e-6), (0, 0.3, 1e-6), (2, 0.5, 1e-5), (5, 0.5, 1e-6)])
def test_schrodinger_residual(n, e, tol):
    assert cosc.schrodinger_residual_C(n, e, GRID) < tol


def test_schrodinger_grid_guard():
    with pytest.raises(GridTooCoarse):
        cosc.schrodinger_residual_C(0, 0.1, np.linspace(-6, 6, 21))


def test_propagator_examples():
    k = cosc.propagator_q(0.0, 0.0, math.pi / 2, 0.0).value
    assert k == pytest.approx((2j * math.pi) ** -0.5)
    with pytest.raises(Caustic):
        cosc.propagator_q(0.0, 0.0, math.pi, 0.0)


@pytest.mark.parametrize("tau", [0.5, 1.0, 2.0, 3.0])
def test_euclidean_spectral_sum(tau):
    for q2, q1 in [(0.0, 0.0), (0.7, -0.3), (1.5, 1.1)]:
        k = cosc.propagator_q(q2, q1, -1j * tau, 0.0).value
        assert abs(k - cosc.euclidean_spectral_sum(q2, q1, tau)) < 1e-8


@settings(max_examples=50, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(0.1, 3.0), st.floats(-0.9, 0.9))
def test_factorization(q2, q1, T, e):
    k0 = cosc.propagator_q(q2, q1, T, 0.0).value
    k = cosc.propagator_q(q2, q1, T, e).value
    assert abs(k - math.exp(e * (q2**2 - q1**2) / 2) * k0) <= 1e-15 * max(1.0, abs(k)) * 4


@pytest.mark.parametrize("T1,T2", [(0.4, 0.7), (1.0, 1.3), (0.2, 2.5)])
@pytest.mark.parametrize("e", [0.0, 0.3, -0.4])
def test_semigroup(T1, T2, e):
    ref = cosc.propagator_q(0.8, -0.2, T1 + T2, e).value
    assert abs(cosc.compose_q(0.8, -0.2, T1, T2, e) - ref) < 1e-6 * abs(ref)


def test_momentum_kernel_closed_form():
    e = 0.3
    k = cosc.propagator_p(0, 0, math.pi / 2, e).value
    assert k == pytest.approx((2j * math.pi) ** -0.5 * (e**2 + 1) ** -0.5)


@pytest.mark.parametrize("e,T", [(0.3, 0.5), (0.5, 1.0), (0.2, 2.5)])
def test_momentum_kernel_transform(e, T):
    p2c, p1 = 0.3 - 0.1j, -0.2 + 0.15j
    ref = cosc.propagator_p(p2c, p1, T, e).value
    assert abs(cosc.momentum_kernel_transform(p2c, p1, T, e) - ref) < 1e-6 * abs(ref)


def test_basis_bracket_and_measure():
    assert cosc.basis_bracket_Pp(0.7, 0.7, 0.4) == pytest.approx((2 * math.pi * 0.4) ** -0.5)
    assert cosc.basis_bracket_Pp(0.0, 1.0, 0.5) == pytest.approx(math.pi**-0.5 * math.exp(-1))
    assert cosc.completeness_measure_p(0.3, 0.2) == pytest.approx((math.pi * 0.2) ** -0.5)
    assert cosc.completeness_measure_p(1j, 1.0) == pytest.approx(math.pi**-0.5 * math.exp(-1))
    with pytest.raises(NonpositiveEpsilon):
        cosc.completeness_measure_p(0.0, 0.0)


def test_resolution_of_identity():
    f = lambda P: np.exp(-((P - 0.3) ** 2) / 2) * (1 + 0.2j * P)  # noqa: E731
    g = lambda P: np.exp(-((P + 0.1) ** 2) / 1.5)  # noqa: E731
    for e in (0.2, 0.5):
        lhs, rhs = cosc.resolve_identity(f, g, e)
        assert abs(lhs - rhs) < 1e-6


def test_momentum_kernel_small_time_smoothing():
    # as T -> 0 the kernel smooths g with a Gaussian of std sqrt(2 eps): p^2 -> p^2 + 2 eps
    p1 = np.linspace(-8, 8, 4001)
    for e in (0.2, 0.01):
        k = cosc.propagator_p(0.4, p1, 1e-4, e).value
        assert np.trapezoid(k * p1**2, p1) == pytest.approx(0.4**2 + 2 * e, abs=1e-3)


def test_path_integral():
    ref = cosc.propagator_q(1.0, 0.0, 1.0, 0.0).value
    errs = [abs(cosc.path_integral_kernel(1.0, 0.0, 1.0, 0.0, N) - ref) for N in (2, 4, 8, 16)]
    assert all(a > b for a, b in zip(errs, errs[1:]))
    assert abs(cosc.path_integral_kernel(1.0, 0.0, 1.0, 0.0, 1000) - ref) < 1e-4


@pytest.mark.parametrize("N", [2, 7, 50])
def test_path_integral_eps_ratio(N):
    r = cosc.path_integral_kernel(1.2, -0.4, 1.0, 0.3, N) / cosc.path_integral_kernel(1.2, -0.4, 1.0, 0.0, N)
    assert r == pytest.approx(math.exp(0.3 * (1.2**2 - 0.4**2) / 2), rel=1e-14)


def test_commutator():
    assert cosc.commutator_qq(0.3, 0.3) == pytest.approx(0, abs=1e-15)
    assert cosc.commutator_qq(0.0, math.pi / 2) == pytest.approx(1j)
    assert cosc.commutator_qq(1.0, 1.0 + math.pi / 6, 0.4) == pytest.approx(0.5j)


def test_grid_function_csv():
    gf = cosc.GridFunction(np.array([0.0, 1.0]), np.array([1 + 2j, 3.0]))
    assert gf.to_csv().splitlines()[0] == "q,re,im"
