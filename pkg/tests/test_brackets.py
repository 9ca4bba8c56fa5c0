from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from puosc import brackets as br
from puosc.errors import DimensionMismatch, NonPolynomial, NotSecondClass, VariableMismatch

SPACE = br.PhaseSpace(["w", "x", "y", "px", "py"], pairs=[("x", "px"), ("y", "py")])
GENS = [SPACE.var(n) for n in SPACE.names]


@st.composite
def polys(draw):
    p = SPACE.zero()
    for _ in range(draw(st.integers(0, 4))):
        coef = Fraction(draw(st.integers(-5, 5)), draw(st.integers(1, 4)))
        term = SPACE.const(coef)
        for k in draw(st.lists(st.integers(0, len(GENS) - 1), max_size=3)):
            term = term * GENS[k]
        p = p + term
    return p


# --- polynomial arithmetic ----------------------------------------------------


def test_formatting_is_graded_lex():
    space = br.PhaseSpace(["w"] + br.jet_names(5))
    w, xd, xddd = space.vars("w xd xddd")
    assert str(xddd + Fraction(3, 2) * w**2 * xd) == "3/2*w^2*xd + xddd"
    assert str(-xd) == "-xd"
    assert str(space.zero()) == "0"


def test_float_coefficients_rejected():
    x = SPACE.var("x")
    with pytest.raises(TypeError):
        x * 0.5
    with pytest.raises(NonPolynomial):
        br.ostrogradsky_momenta("x^2", 1, ["x", "xd"])


def test_imaginary_unit_squares_to_minus_one():
    space = br.PhaseSpace(["I", "x"], imaginary_unit="I")
    i, x = space.vars("I x")
    assert i * i == -1
    assert (i * x) ** 2 == -(x**2)
    assert (i * x + 1).evaluate({"x": 2}) == 1 + 2j


def test_total_derivative_shifts_jets():
    space = br.PhaseSpace(br.jet_names(4))
    x, xd, xdd = space.vars("x xd xdd")
    assert br.total_derivative(x * xd, br.jet_names(4)) == xd**2 + x * xdd


# --- Poisson bracket ----------------------------------------------------------


def test_poisson_examples():
    x, px = SPACE.vars("x px")
    assert br.poisson_bracket(x, px) == 1
    assert br.poisson_bracket(x, x * px) == x
    assert br.poisson_bracket(SPACE.var("w"), px) == 0


def test_constraint_pair_bracket():
    u = br.unequal_extended()
    p1, p2, xd = u.space.vars("p1 p2 xd")
    # xd is paired with p1, so {p2 - xd, p1} = -{xd, p1} = -1
    assert br.poisson_bracket(p2 - xd, p1) == -1


def test_space_mismatch():
    other = br.PhaseSpace(["x", "px"], pairs=[("x", "px")])
    with pytest.raises(VariableMismatch):
        br.poisson_bracket(SPACE.var("x"), other.var("px"))


@settings(max_examples=100, deadline=None)
@given(polys(), polys(), polys())
def test_bracket_algebra(A, B, C):
    pb = br.poisson_bracket
    assert pb(A, B) == -pb(B, A)
    assert pb(A, B * C) == pb(A, B) * C + B * pb(A, C)
    assert (pb(A, pb(B, C)) + pb(B, pb(C, A)) + pb(C, pb(A, B))).is_zero()


# --- constraints and Dirac brackets --------------------------------------------


def test_unequal_constraint_matrix():
    m, C = br.constraint_matrix(br.unequal_extended().constraints)
    assert [[str(e) for e in row] for row in m] == [["0", "1"], ["-1", "0"]]
    assert [[str(e) for e in row] for row in C] == [["0", "-1"], ["1", "0"]]


def test_equal_constraint_matrix_invertible():
    m, C = br.constraint_matrix(br.equal_extended().constraints)
    assert all(e.is_constant() for row in C for e in row)
    assert m[0][1] != 0


def test_first_class_constraint():
    u = br.unequal_extended()
    with pytest.raises(NotSecondClass):
        br.constraint_matrix(br.ConstraintSet([u.var("p1")]))


def test_unequal_dirac_brackets():
    u = br.unequal_extended()
    cs = u.constraints
    x, xdd, p0, p2 = u.space.vars("x xdd p0 p2")
    assert br.dirac_bracket(x, p0, cs) == 1
    assert br.dirac_bracket(xdd, p2, cs) == 1
    assert br.dirac_bracket(x, p2, cs) == 0
    table = br.bracket_table({n: u.var(n) for n in ["x", "xdd", "p0", "p2"]}, cs)
    assert {k: str(v) for k, v in table.items()} == {("x", "p0"): "1", ("xdd", "p2"): "1"}


@pytest.mark.parametrize("factory", [br.unequal_extended, br.equal_extended])
def test_constraints_are_dirac_central(factory):
    s = factory()
    for phi in s.constraints:
        for n in s.space.names:
            assert br.dirac_bracket(s.var(n), phi, s.constraints) == 0


def test_equal_dirac_brackets():
    e = br.equal_extended()
    w, x, xdd, p0, p2 = e.space.vars("w x xdd p0 p2")
    cs = e.constraints
    assert br.dirac_bracket(x, p0, cs) == 1
    assert br.dirac_bracket(xdd, p0, cs) == -Fraction(1, 2) * w**2
    assert br.dirac_bracket(xdd, p2, cs) == Fraction(1, 2)


@pytest.mark.parametrize("factory", [br.unequal_extended, br.equal_extended])
def test_canonical_tables(factory):
    s = factory()
    table = {k: str(v) for k, v in br.bracket_table(s.canonical, s.constraints).items()}
    assert table == {("x", "Pix"): "1", ("z", "Piz"): "1"}
    assert s.canonical_hamiltonian == s.target_hamiltonian


# --- Ostrogradsky and Legendre ---------------------------------------------------


def test_second_order_momenta():
    jets = br.jet_names(4)
    space = br.PhaseSpace(["w1", "w2"] + jets)
    w1, w2 = space.vars("w1 w2")
    L = br.pu_lagrangian(space, w1**2 + w2**2, w1**2 * w2**2)
    pix, piz = br.ostrogradsky_momenta(L, 2, jets)
    xd, xdd, xddd = space.vars("xd xdd xddd")
    assert pix == (w1**2 + w2**2) * xd + xddd
    assert piz == -xdd


def test_third_order_momenta():
    assert [str(p) for p in br.unequal_extended().momenta] == ["w1^2*xd + w2^2*xd + xddd", "0", "xd"]
    assert [str(p) for p in br.equal_extended().momenta] == [
        "3/2*w^2*xd + xddd",
        "-1/2*w^2*x - 1/2*xdd",
        "1/2*xd",
    ]


def test_momenta_need_enough_jets():
    space = br.PhaseSpace(br.jet_names(2))
    with pytest.raises(ValueError):
        br.ostrogradsky_momenta(space.var("xd") ** 2, 2, br.jet_names(2))


def test_unequal_hamiltonian():
    u = br.unequal_extended()
    w1, w2, x, xdd, p0, p2 = u.space.vars("w1 w2 x xdd p0 p2")
    half = Fraction(1, 2)
    expected = half * w1**2 * w2**2 * x**2 - half * (w1**2 + w2**2) * p2**2 - half * xdd**2 + p0 * p2
    assert u.hamiltonian == expected


# --- generating function ------------------------------------------------------------


@pytest.mark.parametrize("abc", [(1, 1, 2), (Fraction(1, 2), Fraction(1, 2), Fraction(5, 2)), (-1, -1, -2)])
def test_generating_function(abc):
    t = br.pu_transformation(*abc)
    assert all(r.is_zero() for r in br.generating_function_check(t.f, t.xi_map, t.P_map))
    assert br.boundary_term_residual(t.f, t.xi_map, t.P_map).is_zero()


def test_zero_generator_identity_map():
    t = br.pu_transformation(1, 1, 2)
    x, z, pix, piz = t.space.vars("x z Pix Piz")
    zero = t.space.zero()
    assert all(r.is_zero() for r in br.generating_function_check(zero, [x, z], [pix, piz]))


def test_zero_generator_pu_maps():
    t = br.pu_transformation(1, 1, 2)
    res = br.generating_function_check(t.space.zero(), t.xi_map, t.P_map)
    assert any(not r.is_zero() for r in res)


def test_generating_function_dimension_mismatch():
    t = br.pu_transformation(1, 1, 2)
    with pytest.raises(DimensionMismatch):
        br.generating_function_check(t.f, t.xi_map[:1], t.P_map)
