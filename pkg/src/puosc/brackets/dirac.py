"""Poisson brackets, second-class constraint matrices and Dirac brackets."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from ..errors import NotSecondClass, VariableMismatch
from .poly import PhasePoly


def poisson_bracket(A: PhasePoly, B: PhasePoly) -> PhasePoly:
    """Canonical bracket ``sum_i dA/dq_i dB/dp_i - dA/dp_i dB/dq_i``."""
    if A.space != B.space:
        raise VariableMismatch(f"{A.space!r} vs {B.space!r}")
    space = A.space
    out = space.zero()
    for qi, pi in space.pairs:
        q, p = space.names[qi], space.names[pi]
        out = out + A.diff(q) * B.diff(p) - A.diff(p) * B.diff(q)
    return out


def _invert_rational(m: list[list[Fraction]]) -> list[list[Fraction]] | None:
    """Gauss-Jordan inverse over the rationals; ``None`` if singular."""
    n = len(m)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            return None
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [v * inv for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [vr - f * vc for vr, vc in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


class ConstraintSet:
    """A list of constraints ``phi_a`` with a lazily cached inverse bracket matrix."""

    def __init__(self, constraints: Sequence[PhasePoly]):
        constraints = tuple(constraints)
        if not constraints:
            raise ValueError("empty constraint set")
        space = constraints[0].space
        if any(c.space != space for c in constraints):
            raise VariableMismatch("constraints live in different spaces")
        self.constraints = constraints
        self.space = space
        self._matrix = None
        self._inverse = None

    def __len__(self):
        return len(self.constraints)

    def __iter__(self):
        return iter(self.constraints)

    @property
    def matrix(self) -> list[list[PhasePoly]]:
        if self._matrix is None:
            cs = self.constraints
            self._matrix = [[poisson_bracket(a, b) for b in cs] for a in cs]
        return self._matrix

    @property
    def inverse(self) -> list[list[PhasePoly]]:
        """``C^{ab}`` with ``C^{ma} {phi_a, phi_n} = delta^m_n``.

        Raises
        ------
        NotSecondClass
            If the bracket matrix is singular.
        """
        if self._inverse is None:
            mat = self.matrix
            if any(not e.is_constant() for row in mat for e in row):
                raise ValueError("bracket matrix depends on phase-space variables; only constant matrices are supported")
            inv = _invert_rational([[e.constant_value() for e in row] for row in mat])
            if inv is None:
                raise NotSecondClass("constraint bracket matrix is singular")
            self._inverse = [[self.space.const(v) for v in row] for row in inv]
        return self._inverse


def constraint_matrix(cs: ConstraintSet) -> tuple[list[list[PhasePoly]], list[list[PhasePoly]]]:
    """Bracket matrix ``{phi_a, phi_b}`` and its inverse ``C^{ab}``."""
    return cs.matrix, cs.inverse


def dirac_bracket(A: PhasePoly, B: PhasePoly, cs: ConstraintSet) -> PhasePoly:
    """``{A,B} - {A,phi_a} C^{ab} {phi_b,B}``."""
    if A.space != cs.space or B.space != cs.space:
        raise VariableMismatch("operands and constraints must share a space")
    C = cs.inverse
    left = [poisson_bracket(A, phi) for phi in cs]
    right = [poisson_bracket(phi, B) for phi in cs]
    out = poisson_bracket(A, B)
    for a, la in enumerate(left):
        if la.is_zero():
            continue
        for b, rb in enumerate(right):
            if not C[a][b].is_zero() and not rb.is_zero():
                out = out - la * C[a][b] * rb
    return out


def bracket_table(
    variables: dict[str, PhasePoly], cs: ConstraintSet | None = None
) -> dict[tuple[str, str], PhasePoly]:
    """All nonzero brackets ``{u, v}`` for ``u`` before ``v`` in ``variables``.

    Uses the Dirac bracket when ``cs`` is given, the Poisson bracket otherwise.
    """
    names = list(variables)
    table = {}
    for i, u in enumerate(names):
        for v in names[i + 1 :]:
            A, B = variables[u], variables[v]
            val = dirac_bracket(A, B, cs) if cs is not None else poisson_bracket(A, B)
            if not val.is_zero():
                table[(u, v)] = val
    return table
