"""Frequencies, transformation coefficients and the 4x4 complex symplectic map.

The complex PU phase-space vector is ``X = (x, z, Pix, Piz)`` and the real
two-oscillator vector is ``xi = (xi1, xi2, P1, P2)``; they are related by
``X = M xi``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateFrequencies, NotOnRealitySurface

DEGENERACY_TOL = 1e-12
REALITY_TOL = 1e-12

# Canonical two-form with identity blocks off the diagonal.
OMEGA = np.array(
    [
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [-1.0, 0.0, 0.0, 0.0],
        [0.0, -1.0, 0.0, 0.0],
    ]
)
OMEGA.setflags(write=False)


@dataclass(frozen=True)
class Frequencies:
    omega1: float
    omega2: float

    def __post_init__(self):
        if not (self.omega1 > 0 and self.omega2 > 0):
            raise ValueError(f"frequencies must be positive, got {self.omega1}, {self.omega2}")

    @property
    def sum_sq(self) -> float:
        return self.omega1**2 + self.omega2**2

    @property
    def prod_sq(self) -> float:
        return self.omega1**2 * self.omega2**2

    @property
    def t_min(self) -> float:
        """Shortest oscillation period."""
        return 2 * math.pi / max(self.omega1, self.omega2)


@dataclass(frozen=True)
class PUCoefficients:
    a: float
    b: float
    c: float
    sign: int = 1


@dataclass(frozen=True)
class ComplexPhasePoint:
    x: complex
    z: complex
    Pix: complex
    Piz: complex

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.z, self.Pix, self.Piz], dtype=complex)

    @classmethod
    def from_array(cls, v) -> "ComplexPhasePoint":
        v = np.asarray(v, dtype=complex)
        return cls(complex(v[0]), complex(v[1]), complex(v[2]), complex(v[3]))


@dataclass(frozen=True)
class RealPhasePoint:
    xi1: float
    xi2: float
    P1: float
    P2: float

    def __post_init__(self):
        for name in ("xi1", "xi2", "P1", "P2"):
            object.__setattr__(self, name, float(getattr(self, name)))

    def as_array(self) -> np.ndarray:
        return np.array([self.xi1, self.xi2, self.P1, self.P2])

    @classmethod
    def from_array(cls, v) -> "RealPhasePoint":
        v = np.asarray(v, dtype=float)
        return cls(v[0], v[1], v[2], v[3])


def compute_coefficients(freqs: Frequencies, sign: int = 1) -> PUCoefficients:
    """Return ``(a, b, c)`` with ``a/w2^2 = b = c/w1^2 = sign/sqrt(w1^2 - w2^2)``.

    Raises
    ------
    DegenerateFrequencies
        If the two frequencies coincide to within 1e-12.
    """
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    w1, w2 = freqs.omega1, freqs.omega2
    if abs(w1 - w2) < DEGENERACY_TOL:
        raise DegenerateFrequencies(f"omega1 == omega2 == {w1}: use the equal-frequency machinery")
    if w1 < w2:
        raise ValueError(f"expected omega1 > omega2, got {w1} < {w2}")
    b = sign / math.sqrt(w1**2 - w2**2)
    return PUCoefficients(a=w2**2 * b, b=b, c=w1**2 * b, sign=sign)


def build_M(coeffs: PUCoefficients) -> np.ndarray:
    a, b, c = coeffs.a, coeffs.b, coeffs.c
    return np.array(
        [
            [1j * b, b, 0, 0],
            [0, 0, 1j * b, b],
            [0, 0, 1j * a, c],
            [1j * c, a, 0, 0],
        ],
        dtype=complex,
    )


def build_M_inverse(coeffs: PUCoefficients) -> np.ndarray:
    """Closed-form inverse of :func:`build_M`.

    Each 2x2 block of M is inverted by cofactors; the common determinant
    factor is ``b (c - a)``.
    """
    a, b, c = coeffs.a, coeffs.b, coeffs.c
    k = 1.0 / (b * (c - a))
    return k * np.array(
        [
            [1j * a, 0, 0, -1j * b],
            [c, 0, 0, -b],
            [0, -1j * c, 1j * b, 0],
            [0, -a, b, 0],
        ],
        dtype=complex,
    )


def symplectic_residual(m) -> float:
    """Max-norm of ``m^T Omega m - Omega``."""
    m = np.asarray(m)
    return float(np.abs(m.T @ OMEGA @ m - OMEGA).max())


def to_complex(xi: RealPhasePoint, coeffs: PUCoefficients) -> ComplexPhasePoint:
    return ComplexPhasePoint.from_array(build_M(coeffs) @ xi.as_array())


def inverse_map(X: ComplexPhasePoint, coeffs: PUCoefficients) -> np.ndarray:
    """``M^-1 X`` as a complex 4-vector, with no reality requirement."""
    return build_M_inverse(coeffs) @ X.as_array()


def to_real(X: ComplexPhasePoint, coeffs: PUCoefficients, tol: float = REALITY_TOL) -> RealPhasePoint:
    """Map back to the real oscillator variables.

    Raises
    ------
    NotOnRealitySurface
        If ``M^-1 X`` has an imaginary part larger than ``tol``; the complex
        preimage is attached as ``exc.values``. Use :func:`inverse_map` when a
        complex result is acceptable.
    """
    v = inverse_map(X, coeffs)
    scale = max(1.0, float(np.abs(v).max()))
    if np.abs(v.imag).max() > tol * scale:
        raise NotOnRealitySurface(
            f"preimage has imaginary part {np.abs(v.imag).max():.3e}", values=v
        )
    return RealPhasePoint.from_array(v.real)


def reality_residuals(X: ComplexPhasePoint, coeffs: PUCoefficients) -> np.ndarray:
    """The four reality-condition residuals, dagger read as complex conjugation.

    Order: x, z, Piz, Pix.
    """
    a, b, c = coeffs.a, coeffs.b, coeffs.c
    x, z, px, pz = X.x, X.z, X.Pix, X.Piz
    s = b * (a + c)
    return np.abs(
        np.array(
            [
                np.conj(x) - (s * x - 2 * b * b * pz),
                np.conj(z) - (-s * z + 2 * b * b * px),
                np.conj(pz) - (2 * a * c * x - s * pz),
                np.conj(px) - (-2 * a * c * z + s * px),
            ]
        )
    )


def reality_residual(X: ComplexPhasePoint, coeffs: PUCoefficients) -> float:
    return float(reality_residuals(X, coeffs).max())


def component_conditions(X: ComplexPhasePoint, coeffs: PUCoefficients) -> tuple[float, float]:
    """Residuals of ``a x_R = b Piz_R`` and ``c x_I = b Piz_I``."""
    a, b, c = coeffs.a, coeffs.b, coeffs.c
    return (
        abs(a * X.x.real - b * X.Piz.real),
        abs(c * X.x.imag - b * X.Piz.imag),
    )
