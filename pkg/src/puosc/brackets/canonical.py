"""Ostrogradsky momenta, Legendre transform and generating-function identities."""

from __future__ import annotations

from typing import Mapping, Sequence

from ..errors import DimensionMismatch, NonPolynomial, VariableMismatch
from .poly import PhasePoly, PhaseSpace, total_derivative


def _require_poly(*polys):
    for p in polys:
        if not isinstance(p, PhasePoly):
            raise NonPolynomial(f"expected PhasePoly, got {type(p).__name__}")


def ostrogradsky_momenta(L: PhasePoly, order: int, jets: Sequence[str]) -> list[PhasePoly]:
    """Momenta ``Pi_i = sum_j (-D)^j dL/dx^(i+j+1)`` for ``i = 0 .. order-1``.

    Parameters
    ----------
    L : PhasePoly
        Lagrangian in the jet symbols ``jets[0] .. jets[order]``.
    order : int
        Highest derivative appearing in ``L``.
    jets : sequence of str
        Names of ``x, x', x'', ...``; must reach order ``2*order - 1`` so the
        total derivatives stay inside the space.
    """
    _require_poly(L)
    jets = list(jets)
    if order < 1:
        raise ValueError("order must be at least 1")
    if len(jets) < 2 * order:
        raise ValueError(f"need {2 * order} jet symbols, got {len(jets)}")
    for name in jets[order + 1 :]:
        if name in L.space and L.depends_on(name):
            raise ValueError(f"Lagrangian depends on {name!r}, beyond order {order}")
    momenta = []
    for i in range(order):
        total = L.space.zero()
        for j in range(order - i):
            term = L.diff(jets[i + j + 1])
            for _ in range(j):
                term = -total_derivative(term, jets)
            total = total + term
        momenta.append(total)
    return momenta


def legendre_hamiltonian(
    L: PhasePoly,
    momenta: Sequence[str],
    jets: Sequence[str],
    solve: Mapping[str, PhasePoly],
) -> PhasePoly:
    """``sum_i p_i x^(i+1) - L`` with the constraint solutions substituted.

    ``solve`` maps eliminated symbols (velocities, constrained momenta) to
    their expressions on the constraint surface. The result must not depend
    on jets beyond the coordinate range, otherwise ValueError.
    """
    _require_poly(L)
    space = L.space
    H = -L
    for i, p in enumerate(momenta):
        H = H + space.var(p) * space.var(jets[i + 1])
    H = H.subs(solve)
    for name in jets[len(momenta) :]:
        if name in space and H.depends_on(name):
            raise ValueError(f"Hamiltonian still depends on {name!r} after substitution")
    return H


def _pairs(space: PhaseSpace) -> list[tuple[str, str]]:
    return [(space.names[q], space.names[p]) for q, p in space.pairs]


def generating_function_check(
    f: PhasePoly, xi_map: Sequence[PhasePoly], P_map: Sequence[PhasePoly]
) -> list[PhasePoly]:
    """Residuals of the type-1 generating-function relations.

    With canonical pairs ``(Q_i, Pi_i)`` of the space, returns first
    ``df/dQ_i - P_j dxi_j/dQ_i + Pi_i`` for every ``i`` and then
    ``df/dPi_i - P_j dxi_j/dPi_i``. All vanish for a valid generator.
    """
    _require_poly(f, *xi_map, *P_map)
    if len(xi_map) != len(P_map):
        raise DimensionMismatch(f"{len(xi_map)} coordinates vs {len(P_map)} momenta")
    pairs = _pairs(f.space)
    if len(xi_map) != len(pairs):
        raise DimensionMismatch(f"{len(xi_map)} new coordinates for {len(pairs)} canonical pairs")
    if any(p.space != f.space for p in (*xi_map, *P_map)):
        raise VariableMismatch("maps must live in the space of f")

    def pull(name):
        out = f.space.zero()
        for xi, P in zip(xi_map, P_map):
            out = out + P * xi.diff(name)
        return out

    res_q = [f.diff(q) - pull(q) + f.space.var(p) for q, p in pairs]
    res_p = [f.diff(p) - pull(p) for q, p in pairs]
    return res_q + res_p


def boundary_term_residual(
    f: PhasePoly, xi_map: Sequence[PhasePoly], P_map: Sequence[PhasePoly]
) -> PhasePoly:
    """``(Pi_i + df/dQ_i) dQ_i + df/dPi_i dPi_i - P_j dxi_j`` as a polynomial.

    Variations are adjoined as symbols ``dQ_<name>``; the result lives in that
    extended space and is identically zero for a valid generator.
    """
    _require_poly(f, *xi_map, *P_map)
    if len(xi_map) != len(P_map):
        raise DimensionMismatch(f"{len(xi_map)} coordinates vs {len(P_map)} momenta")
    pairs = _pairs(f.space)
    phase = [n for pair in pairs for n in pair]
    ext = f.space.extend(["d" + n for n in phase])
    embed = lambda p: p.subs({}, ext)  # noqa: E731
    fe = embed(f)
    xie = [embed(x) for x in xi_map]
    Pe = [embed(P) for P in P_map]
    out = ext.zero()
    for q, p in pairs:
        out = out + (ext.var(p) + fe.diff(q)) * ext.var("d" + q) + fe.diff(p) * ext.var("d" + p)
    for xi, P in zip(xie, Pe):
        dxi = ext.zero()
        for n in phase:
            dxi = dxi + xi.diff(n) * ext.var("d" + n)
        out = out - P * dxi
    return out
