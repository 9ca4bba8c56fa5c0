"""Exact multivariate polynomials over named phase-space symbols.

Coefficients are :class:`fractions.Fraction`. A :class:`PhaseSpace` fixes the
variable order and the canonical pairing; symbols outside every pair behave as
constants under the Poisson bracket (frequencies, higher jets, variations).
An optional imaginary-unit symbol is reduced with ``I**2 -> -1``.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping

from ..errors import NonPolynomial, VariableMismatch


class PhaseSpace:
    """Ordered symbol list plus a perfect matching of positions and momenta."""

    __slots__ = ("names", "pairs", "imaginary_unit", "_index")

    def __init__(
        self,
        names: Iterable[str],
        pairs: Iterable[tuple[str, str]] = (),
        imaginary_unit: str | None = None,
    ):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate symbol names in {names}")
        index = {n: k for k, n in enumerate(names)}
        seen = set()
        pair_idx = []
        for q, p in pairs:
            for s in (q, p):
                if s not in index:
                    raise ValueError(f"paired symbol {s!r} is not declared")
                if s in seen:
                    raise ValueError(f"symbol {s!r} appears in more than one pair")
                seen.add(s)
            pair_idx.append((index[q], index[p]))
        if imaginary_unit is not None:
            if imaginary_unit not in index:
                raise ValueError(f"imaginary unit {imaginary_unit!r} is not declared")
            if imaginary_unit in seen:
                raise ValueError("the imaginary unit cannot be a phase-space variable")
        self.names = names
        self.pairs = tuple(pair_idx)
        self.imaginary_unit = None if imaginary_unit is None else index[imaginary_unit]
        self._index = index

    def __eq__(self, other):
        return (
            isinstance(other, PhaseSpace)
            and self.names == other.names
            and self.pairs == other.pairs
            and self.imaginary_unit == other.imaginary_unit
        )

    def __hash__(self):
        return hash((self.names, self.pairs, self.imaginary_unit))

    def __repr__(self):
        pairs = [(self.names[q], self.names[p]) for q, p in self.pairs]
        return f"PhaseSpace({self.names!r}, pairs={pairs!r})"

    def __contains__(self, name):
        return name in self._index

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise VariableMismatch(f"symbol {name!r} is not in {self.names}") from None

    @property
    def nvars(self) -> int:
        return len(self.names)

    def coordinate_names(self) -> list[str]:
        return [self.names[q] for q, _ in self.pairs]

    def momentum_names(self) -> list[str]:
        return [self.names[p] for _, p in self.pairs]

    def var(self, name: str) -> "PhasePoly":
        exps = [0] * self.nvars
        exps[self.index(name)] = 1
        return PhasePoly(self, {tuple(exps): Fraction(1)})

    def vars(self, names: str) -> list["PhasePoly"]:
        return [self.var(n) for n in names.split()]

    def const(self, value) -> "PhasePoly":
        return PhasePoly(self, {(0,) * self.nvars: _as_fraction(value)})

    def zero(self) -> "PhasePoly":
        return PhasePoly(self, {})

    def extend(self, extra: Iterable[str], pairs: Iterable[tuple[str, str]] = ()) -> "PhaseSpace":
        """New space with ``extra`` symbols appended and optional extra pairs."""
        old_pairs = [(self.names[q], self.names[p]) for q, p in self.pairs]
        iu = None if self.imaginary_unit is None else self.names[self.imaginary_unit]
        return PhaseSpace(self.names + tuple(extra), old_pairs + list(pairs), iu)


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (bool, float, complex)):
        raise TypeError(f"exact coefficients only, got {type(value).__name__} {value!r}")
    if isinstance(value, (int, Rational, str)):
        return Fraction(value)
    raise TypeError(f"cannot use {value!r} as an exact coefficient")


class PhasePoly:
    """Polynomial with rational coefficients; immutable by convention."""

    __slots__ = ("space", "terms", "_hash")

    def __init__(self, space: PhaseSpace, terms: Mapping[tuple, Fraction] | None = None):
        self.space = space
        clean = {}
        iu = space.imaginary_unit
        for exps, coef in (terms or {}).items():
            coef = _as_fraction(coef)
            if len(exps) != space.nvars:
                raise ValueError("exponent tuple length does not match the space")
            if iu is not None and exps[iu] > 1:
                e = exps[iu]
                if (e // 2) % 2:
                    coef = -coef
                exps = exps[:iu] + (e % 2,) + exps[iu + 1 :]
            if coef:
                clean[exps] = clean.get(exps, 0) + coef
        self.terms = {k: v for k, v in clean.items() if v}
        self._hash = None

    # -- coercion -------------------------------------------------------

    def _coerce(self, other) -> "PhasePoly":
        if isinstance(other, PhasePoly):
            if other.space != self.space:
                raise VariableMismatch(f"{self.space!r} vs {other.space!r}")
            return other
        try:
            return self.space.const(other)
        except TypeError:
            raise NonPolynomial(f"cannot combine PhasePoly with {other!r}") from None

    # -- arithmetic -----------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return PhasePoly(self.space, out)

    __radd__ = __add__

    def __neg__(self):
        return PhasePoly(self.space, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        out: dict = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in other.terms.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                out[k] = out.get(k, 0) + v1 * v2
        return PhasePoly(self.space, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, PhasePoly):
            if not other.is_constant():
                raise NonPolynomial("division by a non-constant polynomial")
            other = other.constant_value()
        inv = 1 / _as_fraction(other)
        return PhasePoly(self.space, {k: v * inv for k, v in self.terms.items()})

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise NonPolynomial(f"only non-negative integer powers, got {n!r}")
        result = self.space.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- comparison -----------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, PhasePoly):
            return self.space == other.space and self.terms == other.terms
        try:
            return self.terms == self.space.const(other).terms
        except TypeError:
            return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.space, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    # -- inspection -----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(k) for k in self.terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self.terms.get((0,) * self.space.nvars, Fraction(0))

    def degree(self) -> int:
        return max((sum(k) for k in self.terms), default=0)

    def free_symbols(self) -> set[str]:
        return {self.space.names[i] for k in self.terms for i, e in enumerate(k) if e}

    def depends_on(self, name: str) -> bool:
        i = self.space.index(name)
        return any(k[i] for k in self.terms)

    # -- calculus and substitution --------------------------------------

    def diff(self, name: str) -> "PhasePoly":
        i = self.space.index(name)
        if i == self.space.imaginary_unit:
            raise ValueError("cannot differentiate with respect to the imaginary unit")
        out = {}
        for k, v in self.terms.items():
            e = k[i]
            if e:
                out[k[:i] + (e - 1,) + k[i + 1 :]] = v * e
        return PhasePoly(self.space, out)

    def subs(self, mapping: Mapping[str, "PhasePoly"], target: PhaseSpace | None = None) -> "PhasePoly":
        """Replace symbols by polynomials over ``target`` (default: same space).

        Symbols absent from ``mapping`` are carried over by name and must exist
        in ``target``.
        """
        target = self.space if target is None else target
        images = []
        for name in self.space.names:
            if name in mapping:
                img = mapping[name]
                if not isinstance(img, PhasePoly):
                    img = target.const(img)
                if img.space != target:
                    raise VariableMismatch(f"image of {name!r} lives in a different space")
                images.append(img)
            else:
                images.append(target.var(name) if name in target else None)
        cache: dict = {}

        def power(i, e):
            key = (i, e)
            if key not in cache:
                if images[i] is None:
                    raise VariableMismatch(f"symbol {self.space.names[i]!r} has no image in target")
                cache[key] = images[i] ** e
            return cache[key]

        out = target.zero()
        for k, v in self.terms.items():
            term = target.const(v)
            for i, e in enumerate(k):
                if e:
                    term = term * power(i, e)
            out = out + term
        return out

    def evaluate(self, values: Mapping[str, complex]) -> complex:
        """Numeric value; the imaginary unit evaluates to 1j automatically."""
        vals = []
        for i, name in enumerate(self.space.names):
            if i == self.space.imaginary_unit:
                vals.append(1j)
            else:
                vals.append(values.get(name, 0))
        total = 0
        for k, v in self.terms.items():
            term = float(v)
            for x, e in zip(vals, k):
                if e:
                    term = term * x**e
            total += term
        return total

    # -- formatting -----------------------------------------------------

    def sorted_terms(self) -> list[tuple[tuple, Fraction]]:
        """Terms in graded lexicographic order, highest first."""
        return sorted(self.terms.items(), key=lambda kv: (sum(kv[0]), kv[0]), reverse=True)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for exps, coef in self.sorted_terms():
            factors = []
            for name, e in zip(self.space.names, exps):
                if e == 1:
                    factors.append(name)
                elif e > 1:
                    factors.append(f"{name}^{e}")
            mag = abs(coef)
            if not factors:
                body = str(mag)
            elif mag == 1:
                body = "*".join(factors)
            else:
                body = "*".join([str(mag)] + factors)
            parts.append(("-" if coef < 0 else "+", body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self):
        return f"PhasePoly({self})"


def jet_names(order: int, base: str = "x") -> list[str]:
    """``x, xd, xdd, ...`` up to the given derivative order."""
    return [base + "d" * k for k in range(order + 1)]


def total_derivative(poly: PhasePoly, jets: list[str]) -> PhasePoly:
    """d/dt acting on a function of the jet symbols ``jets[0], jets[1], ...``.

    Other symbols are treated as time independent.
    """
    out = poly.space.zero()
    for k, name in enumerate(jets):
        if name not in poly.space or not poly.depends_on(name):
            continue
        if k + 1 >= len(jets) or jets[k + 1] not in poly.space:
            raise ValueError(f"jet space too short to differentiate {name!r}")
        out = out + poly.space.var(jets[k + 1]) * poly.diff(name)
    return out
