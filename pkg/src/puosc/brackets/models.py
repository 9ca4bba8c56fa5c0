"""Concrete PU systems in exact arithmetic.

* :func:`unequal_extended` builds the third-order extended Lagrangian
  ``L_PU + d/dt(x' x'')`` with symbolic ``w1, w2``.
* :func:`equal_extended` builds its equal-frequency analogue
  ``L_PU + d/dt((x'' - w^2 x) x' / 2)`` with symbolic ``w``.
* :func:`pu_transformation` gives the generator ``f = -z Piz`` and the
  oscillator maps ``xi = M^-1 X`` for rational ``a, b, c``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .canonical import legendre_hamiltonian, ostrogradsky_momenta
from .dirac import ConstraintSet
from .poly import PhasePoly, PhaseSpace, jet_names, total_derivative

HALF = Fraction(1, 2)


@dataclass
class ExtendedSystem:
    """Third-order Lagrangian with its Ostrogradsky data and reduction."""

    space: PhaseSpace
    jets: list[str]
    lagrangian: PhasePoly
    momenta: list[PhasePoly]
    constraints: ConstraintSet
    hamiltonian: PhasePoly
    canonical: dict[str, PhasePoly] = field(default_factory=dict)
    target_hamiltonian: PhasePoly | None = None
    canonical_space: PhaseSpace | None = None
    canonical_hamiltonian: PhasePoly | None = None

    def var(self, name: str) -> PhasePoly:
        return self.space.var(name)


def _jet_space(params: list[str]) -> tuple[PhaseSpace, list[str]]:
    jets = jet_names(5)
    names = params + jets + ["p0", "p1", "p2"]
    space = PhaseSpace(names, pairs=[("x", "p0"), ("xd", "p1"), ("xdd", "p2")])
    return space, jets


def pu_lagrangian(space: PhaseSpace, sum_sq: PhasePoly, prod_sq: PhasePoly) -> PhasePoly:
    """``-x''^2/2 + S x'^2/2 - P x^2/2`` over jet symbols ``x, xd, xdd``."""
    x, xd, xdd = space.vars("x xd xdd")
    return -HALF * xdd**2 + HALF * sum_sq * xd**2 - HALF * prod_sq * x**2


def _reduce(system: ExtendedSystem, solve, canonical, target_terms):
    """Fill in the reduced canonical description on ``(x, z, Pix, Piz)``."""
    cspace = PhaseSpace(
        [n for n in system.space.names if n.startswith("w")] + ["x", "z", "Pix", "Piz"],
        pairs=[("x", "Pix"), ("z", "Piz")],
    )
    system.canonical = canonical
    system.canonical_space = cspace
    # invert the linear change of variables by substitution
    system.canonical_hamiltonian = system.hamiltonian.subs(solve(cspace), cspace)
    system.target_hamiltonian = target_terms(cspace)


def unequal_extended() -> ExtendedSystem:
    space, jets = _jet_space(["w1", "w2"])
    w1, w2 = space.vars("w1 w2")
    x, xd, xdd = space.vars("x xd xdd")
    p0, p1, p2 = space.vars("p0 p1 p2")
    S, P = w1**2 + w2**2, w1**2 * w2**2
    L = pu_lagrangian(space, S, P) + total_derivative(xd * xdd, jets)
    momenta = ostrogradsky_momenta(L, 3, jets)
    cs = ConstraintSet([p1, p2 - xd])
    H = legendre_hamiltonian(L, ["p0", "p1", "p2"], jets, {"xd": p2, "p1": space.const(0)})
    system = ExtendedSystem(space, jets, L, momenta, cs, H)

    def solve(c):
        # x -> x, p0 -> Pix, p2 -> z, xdd -> -Piz
        return {"x": c.var("x"), "p0": c.var("Pix"), "p2": c.var("z"), "xdd": -c.var("Piz")}

    def target(c):
        cw1, cw2 = c.vars("w1 w2")
        Xc, z, Pix, Piz = c.vars("x z Pix Piz")
        return -HALF * Piz**2 - HALF * (cw1**2 + cw2**2) * z**2 + z * Pix + HALF * cw1**2 * cw2**2 * Xc**2

    _reduce(system, solve, {"x": x, "z": p2, "Pix": p0, "Piz": -xdd}, target)
    return system


def equal_extended() -> ExtendedSystem:
    space, jets = _jet_space(["w"])
    (w,) = space.vars("w")
    x, xd, xdd = space.vars("x xd xdd")
    p0, p1, p2 = space.vars("p0 p1 p2")
    w2 = w**2
    L = pu_lagrangian(space, 2 * w2, w2**2) + total_derivative(HALF * (xdd - w2 * x) * xd, jets)
    momenta = ostrogradsky_momenta(L, 3, jets)
    cs = ConstraintSet([p1 + HALF * (w2 * x + xdd), p2 - HALF * xd])
    H = legendre_hamiltonian(
        L, ["p0", "p1", "p2"], jets, {"xd": 2 * p2, "p1": -HALF * (w2 * x + xdd)}
    )
    system = ExtendedSystem(space, jets, L, momenta, cs, H)

    def solve(c):
        # z = 2 p2, Pix = p0 + w^2 p2, Piz = -xdd
        cw = c.var("w")
        return {
            "x": c.var("x"),
            "p2": HALF * c.var("z"),
            "p0": c.var("Pix") - HALF * cw**2 * c.var("z"),
            "xdd": -c.var("Piz"),
        }

    def target(c):
        cw = c.var("w")
        Xc, z, Pix, Piz = c.vars("x z Pix Piz")
        return -HALF * Piz**2 - cw**2 * z**2 + Pix * z + HALF * cw**4 * Xc**2

    canonical = {"x": x, "z": 2 * p2, "Pix": p0 + w2 * p2, "Piz": -xdd}
    _reduce(system, solve, canonical, target)
    return system


@dataclass
class PUTransformation:
    space: PhaseSpace
    f: PhasePoly
    xi_map: list[PhasePoly]
    P_map: list[PhasePoly]


def pu_transformation(a, b, c) -> PUTransformation:
    """Generator ``-z Piz`` and the maps ``(xi, P) = M^-1 (x, z, Pix, Piz)``.

    ``a, b, c`` must be exact rationals; the relations are generated by
    ``f`` exactly when ``b (c - a) = 1``.
    """
    a, b, c = Fraction(a), Fraction(b), Fraction(c)
    if b == 0 or c == a:
        raise ValueError("M is singular for b = 0 or a = c")
    space = PhaseSpace(["I", "x", "z", "Pix", "Piz"], pairs=[("x", "Pix"), ("z", "Piz")], imaginary_unit="I")
    i, x, z, px, pz = space.vars("I x z Pix Piz")
    k = 1 / (b * (c - a))
    xi = [k * (a * i * x - b * i * pz), k * (c * x - b * pz)]
    P = [k * (-c * i * z + b * i * px), k * (-a * z + b * px)]
    return PUTransformation(space, -z * pz, xi, P)
