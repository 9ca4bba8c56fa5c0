import math

import numpy as np
import pytest

from puosc import core, puq
from puosc.errors import Caustic

SQ2 = core.Frequencies(math.sqrt(2), 1.0)
W21 = core.Frequencies(2.0, 1.0)
C = core.compute_coefficients(SQ2)


def test_spectrum_examples():
    assert puq.spectrum(0, 0, SQ2) == pytest.approx((math.sqrt(2) + 1) / 2)
    assert puq.spectrum(1, 0, SQ2) - puq.spectrum(0, 0, SQ2) == pytest.approx(math.sqrt(2))
    with pytest.raises(ValueError):
        puq.spectrum(-1, 0, SQ2)


def test_spectrum_oracle():
    table = puq.spectrum_table(SQ2, 10)
    assert [E for *_, E in table] == sorted(E for *_, E in table)
    assert np.abs(puq.spectrum_oracle(SQ2) - [E for *_, E in table]).max() < 1e-8
    assert puq.spectrum_oracle(SQ2, levels=1)[0] == pytest.approx(puq.spectrum(0, 0, SQ2), abs=1e-10)


def test_spectrum_csv():
    lines = puq.spectrum_csv(SQ2).splitlines()
    assert lines[0] == "m,n,E"
    assert len(lines) == 11
    assert lines[1].startswith("0,0,1.207")


def test_ground_state():
    assert puq.ground_state_xi(0.0, 0.0, SQ2) == 1
    assert puq.ground_state_constrained(0.0, 0.0, SQ2) == 1
    assert puq.ground_state_residual(SQ2) < 1e-6


def test_ground_state_surface_restriction():
    rng = np.random.default_rng(0)
    xR, xI = rng.normal(size=(2, 1000))
    x, piz = puq.constrained_point(xR, xI, C)
    xi1, xi2 = puq.oscillator_coordinates(x, piz, C)
    assert np.abs(xi1.imag).max() < 1e-12 and np.abs(xi2.imag).max() < 1e-12
    diff = puq.ground_state_xi(xi1.real, xi2.real, SQ2) - puq.ground_state_constrained(xR, xI, SQ2)
    assert np.abs(diff).max() < 1e-12


def test_ground_state_normalizable():
    norm = puq.integrate_pu_measure(lambda x, piz: puq.ground_state_constrained(x.real, x.imag, SQ2) ** 2, C)
    assert np.isfinite(norm) and norm.real > 0


def test_kernel_coeff_examples():
    kc = puq.kernel_coeffs(math.pi / 3, W21)
    assert kc.D.real == pytest.approx(9 / 4)
    assert kc.F.real == pytest.approx(3 * math.sqrt(3))
    assert kc.prefactor_residual(W21) < 1e-12


def test_caustic_names_frequency():
    with pytest.raises(Caustic) as info:
        puq.kernel_coeffs(math.pi / 2, W21)
    assert info.value.frequency == 2.0
    assert "omega1" in str(info.value)
    with pytest.raises(Caustic) as info:
        puq.kernel_coeffs(math.pi, core.Frequencies(1.5, 1.0))
    assert info.value.frequency == 1.0


def test_kernel_at_origin():
    T = 0.8
    k = puq.propagator_pu(0, 0, 0, 0, T, SQ2).value
    assert k == pytest.approx(puq.normalization_constant(SQ2) * puq.kernel_coeffs(T, SQ2).Q)


@pytest.mark.parametrize("side", ["ket", "bra"])
def test_kernel_schrodinger(side):
    rng = np.random.default_rng(5)
    for _ in range(20):
        args = rng.normal(scale=0.5, size=4) + 1j * rng.normal(scale=0.5, size=4)
        assert puq.pu_schrodinger_residual(*args, 1.0, SQ2, side=side) < 1e-5


def test_measure_weight():
    assert puq.pu_measure_weight(1.0, 0.5, C.a / C.b, 0.5 * C.c / C.b, C) == pytest.approx(1 / (4 * math.pi**2))
    assert puq.pu_measure_weight(1.0, 0.5, 0.0, 0.0, C) == 0
    x, piz = puq.constrained_point(0.3, -0.8, C)
    X = core.ComplexPhasePoint(x, 0, 0, piz)
    assert max(core.component_conditions(X, C)) < 1e-12


def test_measure_reduction_gaussian():
    # 4D Gaussian against the delta measure collapses to a 2D Gaussian integral
    f = lambda x, piz: np.exp(-(x.real**2) - 2 * x.imag**2)  # noqa: E731
    got = puq.integrate_pu_measure(f, C)
    assert got == pytest.approx(puq.measure_density(C) * math.pi / math.sqrt(2), rel=1e-10)


def test_measure_jacobian_scaling():
    c2 = core.PUCoefficients(2 * C.a, 2 * C.b, 2 * C.c)
    assert puq.measure_density(c2) == pytest.approx(puq.measure_density(C) / 4)


@pytest.mark.parametrize(
    "freqs,T1,T2",
    [(SQ2, 0.4, 0.7), (W21, 0.3, 0.5), (core.Frequencies(1.7, 0.6), 0.9, 0.2)],
)
def test_semigroup(freqs, T1, T2):
    rng = np.random.default_rng(11)
    args = rng.normal(scale=0.4, size=4) + 1j * rng.normal(scale=0.4, size=4)
    ref = puq.propagator_pu(*args, T1 + T2, freqs).value
    assert abs(puq.compose_pu(*args, T1, T2, freqs) - ref) < 1e-6 * abs(ref)


def test_fitted_normalization_matches_closed_form():
    n = puq.fit_normalization(0.1 + 0.2j, -0.3j, 0.4, 0.1 - 0.1j, 0.4, 0.7, SQ2)
    assert n == pytest.approx(puq.normalization_constant(SQ2), rel=1e-10)
    assert puq.normalization_constant(SQ2) == pytest.approx(-2j * math.pi * 2**0.25)


def test_change_of_basis():
    assert puq.change_of_basis_pu(0.0, 0.0, 0.3 + 0.1j, 1.2, C) == 1
    rng = np.random.default_rng(2)
    xR, xI = rng.normal(size=(2, 100))
    x, piz = puq.constrained_point(xR, xI, C)
    P1, P2 = rng.normal(size=(2, 100))
    # on the surface both exponents are purely imaginary, so the overlap is a plane wave
    assert np.abs(np.abs(puq.change_of_basis_pu(P1, P2, x, piz, C)) - 1).max() < 1e-12


def test_oscillator_transform_of_ground_state():
    gs = lambda a, b: puq.ground_state_constrained(a, b, SQ2)  # noqa: E731
    norm = 2 * math.pi * math.sqrt(SQ2.omega1 * SQ2.omega2)
    for P1, P2 in [(0.0, 0.0), (0.5, -1.0), (-1.3, 0.2)]:
        ref = math.exp(-(P1**2) / (2 * SQ2.omega1) - P2**2 / (2 * SQ2.omega2)) / norm
        assert abs(puq.oscillator_transform(gs, P1, P2, SQ2) - ref) < 1e-6


def test_closure_z_coefficient():
    T = 0.9
    w1, w2 = SQ2.omega1, SQ2.omega2
    m = puq.heisenberg_closure(T, SQ2).matrix
    D = (w1**2 - w2**2) * math.sin(w1 * T) * math.sin(w2 * T)
    expected = (w2 * math.sin(w1 * T) * math.cos(w2 * T) - w1 * math.cos(w1 * T) * math.sin(w2 * T)) / D
    assert m[0, 1] == pytest.approx(expected)


def test_closure_matches_oracle():
    rng = np.random.default_rng(4)
    for T, t1 in zip(rng.uniform(0.1, 2.0, 50), rng.uniform(-3, 3, 50)):
        got = puq.heisenberg_closure(T, SQ2).matrix
        assert np.abs(got - puq.heisenberg_closure_oracle(T, SQ2, t1)).max() < 1e-10 * np.abs(got).max()


def _mode_solution(amps, freqs, dagger=False):
    """x(t) and its derivatives for amplitudes of e^{+-i w1 t}, e^{+-i w2 t}.

    The dagger flips the sign of the w1 modes, as the reality conditions demand.
    """
    w = np.array([freqs.omega1, -freqs.omega1, freqs.omega2, -freqs.omega2])
    amps = np.asarray(amps) * (np.array([-1, -1, 1, 1]) if dagger else 1)
    return lambda t, k=0: np.sum(amps * (1j * w) ** k * np.exp(1j * w * t))


def test_closure_short_time():
    # z(t1) returned by the closure reproduces the kinematics z = dx/dt at T = 1e-4
    T, t1 = 1e-4, 0.3
    m = puq.heisenberg_closure(T, SQ2).matrix
    amps = [0.3 + 0.1j, -0.2j, 0.5, 0.1 - 0.4j]
    x, xd = _mode_solution(amps, SQ2), _mode_solution(amps, SQ2, dagger=True)
    inputs = np.array([x(t1), -x(t1, 2), xd(t1 + T), -xd(t1 + T, 2)])
    h = 1e-3
    velocity = (x(t1 + h) - x(t1 - h)) / (2 * h)
    assert (m @ inputs)[0] == pytest.approx(velocity, rel=1e-6)
    assert np.abs(m - puq.heisenberg_closure_oracle(T, SQ2)).max() < 1e-10 * np.abs(m).max()


def test_state_container():
    nodes = np.linspace(-1, 1, 5)
    s = puq.PUState.ground(SQ2, nodes, nodes)
    assert s.values.shape == (5, 5)
    with pytest.raises(ValueError):
        puq.PUState("bogus", (nodes, nodes), s.values)
