"""Quantum PU oscillator: spectrum, ground state, propagator and measure.

States live in the ``|x, Piz>`` basis with complex ``x`` and ``Piz``. The
measure restricts them to the surface ``a x_R = b Piz_R``, ``c x_I = b Piz_I``,
on which the oscillator coordinates are real: ``xi1 = x_I / b`` and
``xi2 = x_R / b``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import roots_hermite

from .core import Frequencies, PUCoefficients, compute_coefficients
from .cosc import KernelValue, central_derivatives
from .errors import Caustic, QuadratureDivergence

# |sin(w T)| below this counts as a caustic; loose enough to catch T values
# typed with seven significant digits
CAUSTIC_TOL = 1e-6

FD_STEP = 1e-4


# ---------------------------------------------------------------------------
# spectrum


def spectrum(m: int, n: int, freqs: Frequencies) -> float:
    """``w1 (m + 1/2) + w2 (n + 1/2)``."""
    if m < 0 or n < 0:
        raise ValueError("quantum numbers must be non-negative")
    return freqs.omega1 * (m + 0.5) + freqs.omega2 * (n + 0.5)


def spectrum_table(freqs: Frequencies, levels: int = 10) -> list[tuple[int, int, float]]:
    """Lowest ``levels`` states as ``(m, n, E)``, sorted by energy then ``(m, n)``."""
    kmax = levels + 1
    rows = [(m, n, spectrum(m, n, freqs)) for m in range(kmax) for n in range(kmax)]
    rows.sort(key=lambda r: (r[2], r[0], r[1]))
    return rows[:levels]


def spectrum_csv(freqs: Frequencies, levels: int = 10) -> str:
    lines = ["m,n,E"] + [f"{m},{n},{E!r}" for m, n, E in spectrum_table(freqs, levels)]
    return "\n".join(lines) + "\n"


def _oscillator_matrix(omega: float, nbasis: int) -> np.ndarray:
    """``P^2/2 + omega^2 xi^2/2`` in the unit-frequency Hermite basis.

    Products are formed in a basis two states larger and then truncated so
    the kept block of ``xi^2`` and ``P^2`` is exact.
    """
    m = nbasis + 2
    a = np.diag(np.sqrt(np.arange(1, m)), 1)
    X = (a + a.T) / math.sqrt(2)
    P = 1j * (a.T - a) / math.sqrt(2)
    H = (P @ P).real / 2 + omega**2 * (X @ X) / 2
    return H[:nbasis, :nbasis]


def spectrum_oracle(freqs: Frequencies, nbasis: int = 30, levels: int = 10) -> np.ndarray:
    """Lowest eigenvalues of ``H_xi`` in a product Hermite basis of ``nbasis**2`` states."""
    h1 = _oscillator_matrix(freqs.omega1, nbasis)
    h2 = _oscillator_matrix(freqs.omega2, nbasis)
    eye = np.eye(nbasis)
    H = np.kron(h1, eye) + np.kron(eye, h2)
    return np.linalg.eigvalsh(H)[:levels]


# ---------------------------------------------------------------------------
# ground state


def ground_state_xi(xi1, xi2, freqs: Frequencies):
    """Unnormalized ``exp(-(w1 xi1^2 + w2 xi2^2)/2)``."""
    return np.exp(-(freqs.omega1 * np.square(xi1) + freqs.omega2 * np.square(xi2)) / 2)


def ground_state_constrained(xR, xI, freqs: Frequencies):
    """Ground state on the measure surface, ``exp(-w2 d x_R^2/2 - w1 d x_I^2/2)``, ``d = w1^2 - w2^2``."""
    d = freqs.omega1**2 - freqs.omega2**2
    return np.exp(-freqs.omega2 * d * np.square(xR) / 2 - freqs.omega1 * d * np.square(xI) / 2)


def constrained_point(xR, xI, coeffs: PUCoefficients) -> tuple:
    """``(x, Piz)`` on the surface ``a x_R = b Piz_R``, ``c x_I = b Piz_I``."""
    a, b, c = coeffs.a, coeffs.b, coeffs.c
    return np.asarray(xR) + 1j * np.asarray(xI), (a * np.asarray(xR) + 1j * c * np.asarray(xI)) / b


def oscillator_coordinates(x, piz, coeffs: PUCoefficients) -> tuple:
    """``xi1 = i a x - i b Piz`` and ``xi2 = c x - b Piz``; real on the surface."""
    a, b, c = coeffs.a, coeffs.b, coeffs.c
    return 1j * a * x - 1j * b * piz, c * x - b * piz


def ground_state_residual(freqs: Frequencies, half_width: float = 5.0, h: float = 0.01, order: int = 4) -> float:
    """``||H_xi psi - E_00 psi|| / ||psi||`` on a square grid by central differences."""
    n = int(round(2 * half_width / h)) + 1
    g = np.linspace(-half_width, half_width, n)
    X1, X2 = np.meshgrid(g, g, indexing="ij")
    psi = ground_state_xi(X1, X2, freqs)
    trim = order // 2
    _, d11 = central_derivatives(psi, h, order)
    _, d22 = central_derivatives(psi.T, h, order)
    lap = d11[:, trim:-trim] + d22.T[trim:-trim, :]
    core = (slice(trim, -trim), slice(trim, -trim))
    pot = (freqs.omega1**2 * X1[core] ** 2 + freqs.omega2**2 * X2[core] ** 2) / 2
    res = -lap / 2 + pot * psi[core] - spectrum(0, 0, freqs) * psi[core]
    return float(np.linalg.norm(res) / np.linalg.norm(psi[core]))


# ---------------------------------------------------------------------------
# propagator


@dataclass(frozen=True)
class KernelCoeffs:
    T: float
    D: complex
    F: complex
    G: complex
    J: complex
    K: complex
    M: complex
    N: complex
    Q: complex

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in "DFGJKMNQ"}

    def prefactor_residual(self, freqs: Frequencies) -> float:
        """``|Q^2 sin(w1 T) sin(w2 T) - 1|``."""
        s = math.sin(freqs.omega1 * self.T) * math.sin(freqs.omega2 * self.T)
        return abs(self.Q**2 * s - 1)


def _check_caustics(T: float, freqs: Frequencies):
    for label, w in (("omega1", freqs.omega1), ("omega2", freqs.omega2)):
        if abs(math.sin(w * T)) < CAUSTIC_TOL:
            raise Caustic(f"caustic of {label} = {w:g}: sin({label} * T) vanishes at T = {T:.10g}", frequency=w)


def kernel_coeffs(T: float, freqs: Frequencies) -> KernelCoeffs:
    """The eight trigonometric coefficient functions of the PU kernel.

    Raises
    ------
    Caustic
        If ``sin(w1 T)`` or ``sin(w2 T)`` vanishes; ``exc.frequency`` names it.
    """
    _check_caustics(T, freqs)
    w1, w2 = freqs.omega1, freqs.omega2
    s1, s2 = math.sin(w1 * T), math.sin(w2 * T)
    c1, c2 = math.cos(w1 * T), math.cos(w2 * T)
    return KernelCoeffs(
        T=T,
        D=complex((w1**2 - w2**2) * s1 * s2),
        F=complex(w1**2 * w2 * s1 + w1 * w2**2 * s2),
        G=complex(-w2 * s1 - w1 * s2),
        J=complex(-(w1**2) * w2 * s1 * c2 + w1 * w2**2 * s2 * c1),
        K=complex(w2 * s1 * c2 - w1 * s2 * c1),
        M=complex(-(w1**4) * w2 * s1 - w1 * w2**4 * s2),
        N=complex(w1**4 * w2 * s1 * c2 - w1 * w2**4 * s2 * c1),
        Q=1 / cmath.sqrt(s1 * s2),
    )


def normalization_constant(freqs: Frequencies) -> complex:
    """Global kernel constant fixed by composition under the delta measure.

    ``-2 pi i sqrt(w1 w2)``; :func:`fit_normalization` recovers it numerically.
    """
    return -2j * math.pi * math.sqrt(freqs.omega1 * freqs.omega2)


def kernel_exponent(x2c, piz2c, x1, piz1, kc: KernelCoeffs):
    """``(i/D) [F(...) + G ... + M x1 x2* + N (x2*^2 + x1^2)/2]``."""
    return (1j / kc.D) * (
        kc.F * (x2c * piz1 + x1 * piz2c)
        + kc.G * piz1 * piz2c
        + kc.J * (x2c * piz2c + x1 * piz1)
        + kc.K * (piz2c**2 + piz1**2) / 2
        + kc.M * x1 * x2c
        + kc.N * (x2c**2 + x1**2) / 2
    )


def propagator_pu(x2c, piz2c, x1, piz1, T: float, freqs: Frequencies, normalization: complex | None = None) -> KernelValue:
    """``<x2*, Piz2*, t2 | x1, Piz1, t1>``, holomorphic in all four arguments.

    ``normalization`` defaults to :func:`normalization_constant`; pass 1 for
    the bare kernel ``Q exp(...)``.
    """
    kc = kernel_coeffs(T, freqs)
    norm = normalization_constant(freqs) if normalization is None else normalization
    val = norm * kc.Q * np.exp(kernel_exponent(x2c, piz2c, x1, piz1, kc))
    s = math.sin(freqs.omega1 * T) * math.sin(freqs.omega2 * T)
    note = f"principal sqrt of 1/(sin(w1 T) sin(w2 T)), product {'positive' if s > 0 else 'negative'}"
    return KernelValue(complex(val), note)


def pu_schrodinger_residual(x2c, piz2c, x1, piz1, T: float, freqs: Frequencies, h: float = FD_STEP, side: str = "ket") -> float:
    """Relative residual of ``i dK/dT = H K``.

    ``H = -Piz^2/2 + (S/2) d^2/dPiz^2 + d^2/(dx dPiz) + P x^2/2`` acts on the
    ket arguments (``side='ket'``) or on the bra arguments (``side='bra'``;
    the kernel is symmetric in the two pairs). Central differences with step
    ``h`` along the real direction, valid because the kernel is holomorphic.
    """
    if side == "ket":
        k = lambda x, p, t: propagator_pu(x2c, piz2c, x, p, t, freqs, 1).value  # noqa: E731
        x, p = x1, piz1
    elif side == "bra":
        k = lambda x, p, t: propagator_pu(x, p, x1, piz1, t, freqs, 1).value  # noqa: E731
        x, p = x2c, piz2c
    else:
        raise ValueError("side must be 'ket' or 'bra'")
    k0 = k(x, p, T)
    dT = (k(x, p, T + h) - k(x, p, T - h)) / (2 * h)
    dpp = (k(x, p + h, T) - 2 * k0 + k(x, p - h, T)) / h**2
    dxp = (k(x + h, p + h, T) - k(x + h, p - h, T) - k(x - h, p + h, T) + k(x - h, p - h, T)) / (4 * h * h)
    H = -0.5 * p**2 * k0 + 0.5 * freqs.sum_sq * dpp + dxp + 0.5 * freqs.prod_sq * x**2 * k0
    return float(abs(1j * dT - H) / abs(H))


# ---------------------------------------------------------------------------
# measure and composition


def measure_density(coeffs: PUCoefficients) -> float:
    """Reduced density ``(2 pi)^-2 |b|^-2`` per ``dx_R dx_I``."""
    return 1 / ((2 * math.pi) ** 2 * coeffs.b**2)


def pu_measure_weight(xR, xI, PizR, PizI, coeffs: PUCoefficients, tol: float = 1e-12) -> float:
    """Density of the delta measure after integrating out ``Piz``.

    Returns ``(2 pi)^-2 |b|^-2`` when ``(x, Piz)`` lies on the surface within
    ``tol`` (relative to the point's magnitude) and 0 elsewhere.
    """
    a, b, c = coeffs.a, coeffs.b, coeffs.c
    scale = max(1.0, abs(xR), abs(xI), abs(PizR), abs(PizI))
    on = abs(b * PizR - a * xR) <= tol * scale and abs(b * PizI - c * xI) <= tol * scale
    return measure_density(coeffs) if on else 0.0


def integrate_pu_measure(
    func: Callable, coeffs: PUCoefficients, nodes: int = 60, scales: tuple[float, float] = (1.0, 1.0)
) -> complex:
    """``int dmu_PU func(x, Piz)`` reduced to ``(x_R, x_I)`` quadrature.

    ``func`` should decay like a Gaussian of widths ``scales`` in
    ``(x_R, x_I)``.
    """
    t, w = roots_hermite(nodes)
    ws = w * np.exp(t**2)
    XR, XI = np.meshgrid(scales[0] * t, scales[1] * t, indexing="ij")
    W = np.outer(ws * scales[0], ws * scales[1])
    x, piz = constrained_point(XR, XI, coeffs)
    vals = func(x, piz)
    if not np.all(np.isfinite(vals)):
        raise QuadratureDivergence("integrand is not finite at the quadrature nodes")
    return complex(measure_density(coeffs) * np.sum(W * vals))


def _gaussian_integral_2d(logf: Callable, nodes: int) -> complex:
    """``int dx_R dx_I exp(logf(x_R, x_I))`` for a quadratic, separable ``logf``.

    The quadratic data are read off by unit-step differences (exact for
    quadratics). Each axis is shifted to its stationary point and turned so
    the Gaussian decays along the Gauss-Hermite contour.
    """
    f0 = logf(0.0, 0.0)
    fp = [logf(1.0, 0.0), logf(0.0, 1.0)]
    fm = [logf(-1.0, 0.0), logf(0.0, -1.0)]
    g = [(fp[i] - fm[i]) / 2 for i in range(2)]
    H = [fp[i] - 2 * f0 + fm[i] for i in range(2)]
    h01 = (logf(1.0, 1.0) - logf(1.0, -1.0) - logf(-1.0, 1.0) + logf(-1.0, -1.0)) / 4
    if abs(h01) > 1e-9 * max(abs(H[0]), abs(H[1])):
        raise QuadratureDivergence("exponent couples x_R and x_I")
    if min(abs(H[0]), abs(H[1])) == 0 or any(h.real > 1e-9 * abs(h) for h in H):
        raise QuadratureDivergence("exponent is not a decaying Gaussian on any rotated contour")
    u0 = [-g[i] / H[i] for i in range(2)]
    r = [cmath.sqrt(-2 / H[i]) for i in range(2)]
    t, w = roots_hermite(nodes)
    U0 = u0[0] + r[0] * t
    U1 = u0[1] + r[1] * t
    A, B = np.meshgrid(U0, U1, indexing="ij")
    W = np.outer(w * np.exp(t**2), w * np.exp(t**2))
    return complex(np.sum(W * np.exp(logf(A, B))) * r[0] * r[1])


def compose_pu(
    x3c, piz3c, x1, piz1, T1: float, T2: float, freqs: Frequencies, nodes: int = 40, normalization: complex | None = None
) -> complex:
    """``int dmu_PU K(3; 2) K(2; 1)`` over the intermediate state.

    The intermediate ket sits at ``(x, Piz)`` on the surface and the bra at
    the conjugate point ``(x*, Piz*)``.
    """
    coeffs = compute_coefficients(freqs)
    a, b, c = coeffs.a, coeffs.b, coeffs.c
    k2, k1 = kernel_coeffs(T2, freqs), kernel_coeffs(T1, freqs)
    norm = normalization_constant(freqs) if normalization is None else normalization

    def logf(xR, xI):
        x, piz = xR + 1j * xI, (a * xR + 1j * c * xI) / b
        xs, pizs = xR - 1j * xI, (a * xR - 1j * c * xI) / b
        return kernel_exponent(x3c, piz3c, x, piz, k2) + kernel_exponent(xs, pizs, x1, piz1, k1)

    integral = _gaussian_integral_2d(logf, nodes)
    return complex(norm**2 * k2.Q * k1.Q * measure_density(coeffs) * integral)


def fit_normalization(x3c, piz3c, x1, piz1, T1: float, T2: float, freqs: Frequencies, nodes: int = 40) -> complex:
    """Constant ``N`` for which ``N K_bare`` composes to itself."""
    bare = compose_pu(x3c, piz3c, x1, piz1, T1, T2, freqs, nodes, normalization=1.0)
    direct = propagator_pu(x3c, piz3c, x1, piz1, T1 + T2, freqs, normalization=1.0).value
    return direct / bare


def change_of_basis_pu(P1, P2, x, piz, coeffs: PUCoefficients):
    """``<P1, P2 | x, Piz> = exp[(a x - b Piz) P1 + (-i c x + i b Piz) P2]``."""
    a, b, c = coeffs.a, coeffs.b, coeffs.c
    return np.exp((a * x - b * piz) * P1 + (-1j * c * x + 1j * b * piz) * P2)


def oscillator_transform(psi: Callable, P1: float, P2: float, freqs: Frequencies, nodes: int = 60) -> complex:
    """``int dmu_PU <P1, P2 | x, Piz> psi(x_R, x_I)`` for a Gaussian-decaying ``psi``.

    For the constrained ground state the result is
    ``exp(-P1^2/(2 w1) - P2^2/(2 w2)) / (2 pi sqrt(w1 w2))``.
    """
    coeffs = compute_coefficients(freqs)
    d = freqs.omega1**2 - freqs.omega2**2
    scales = (1 / math.sqrt(freqs.omega2 * d), 1 / math.sqrt(freqs.omega1 * d))

    def integrand(x, piz):
        return change_of_basis_pu(P1, P2, x, piz, coeffs) * psi(x.real, x.imag)

    return integrate_pu_measure(integrand, coeffs, nodes, scales)


# ---------------------------------------------------------------------------
# Heisenberg boundary problem


@dataclass(frozen=True)
class ClosureMaps:
    """``outputs = matrix @ inputs`` for the two-time boundary problem."""

    matrix: np.ndarray
    inputs: tuple[str, ...] = ("x(t1)", "Piz(t1)", "x+(t2)", "Piz+(t2)")
    outputs: tuple[str, ...] = ("z(t1)", "Pix(t1)", "z+(t2)", "Pix+(t2)")


def heisenberg_closure(T: float, freqs: Frequencies) -> ClosureMaps:
    """Closed-form solution of the boundary problem in terms of the kernel coefficients.

    Rows are ``z(t1), Pix(t1), z+(t2), Pix+(t2)``; columns are
    ``x(t1), Piz(t1), x+(t2), Piz+(t2)``.
    """
    kc = kernel_coeffs(T, freqs)
    D, F, G, J, K, M, N = kc.D, kc.F, kc.G, kc.J, kc.K, kc.M, kc.N
    mat = np.array(
        [
            [J, K, F, G],
            [-N, -J, -M, -F],
            [-F, -G, -J, -K],
            [M, F, N, J],
        ],
        dtype=complex,
    )
    return ClosureMaps(mat / D)


def heisenberg_closure_oracle(T: float, freqs: Frequencies, t1: float = 0.0) -> np.ndarray:
    """Same map from a direct solve of the four mode amplitudes.

    The dagger at ``t2`` flips the sign of the first mode, as the reality
    conditions require.
    """
    _check_caustics(T, freqs)
    w1, w2 = freqs.omega1, freqs.omega2
    t2 = t1 + T

    def modes(w, t):
        return np.array([np.exp(1j * w * t), np.exp(-1j * w * t)])

    def row(t, dag, f1, f2, deriv):
        s = -1.0 if dag else 1.0
        pm = np.array([1, -1]) if deriv else np.array([1, 1])
        return np.concatenate([s * f1 * pm * modes(w1, t), f2 * pm * modes(w2, t)])

    A = np.array(
        [
            row(t1, False, 1, 1, False),
            row(t1, False, w1**2, w2**2, False),
            row(t2, True, 1, 1, False),
            row(t2, True, w1**2, w2**2, False),
        ]
    )
    B = np.array(
        [
            row(t1, False, 1j * w1, 1j * w2, True),
            row(t1, False, 1j * w1 * w2**2, 1j * w1**2 * w2, True),
            row(t2, True, 1j * w1, 1j * w2, True),
            row(t2, True, 1j * w1 * w2**2, 1j * w1**2 * w2, True),
        ]
    )
    return B @ np.linalg.inv(A)


# ---------------------------------------------------------------------------
# records


def kernel_coeffs_record(T: float, freqs: Frequencies) -> dict:
    kc = kernel_coeffs(T, freqs)
    rec = {"T": T, "w1": freqs.omega1, "w2": freqs.omega2}
    for k, v in kc.as_dict().items():
        rec[k] = {"re": v.real, "im": v.imag}
    return rec


@dataclass(frozen=True)
class PUState:
    """Sampled PU wave function.

    ``representation`` is ``'xi-grid'`` (nodes are ``(xi1, xi2)``) or
    ``'constrained-x-grid'`` (nodes are ``(x_R, x_I)`` with ``Piz`` fixed by
    the surface).
    """

    representation: str
    nodes: tuple[np.ndarray, np.ndarray]
    values: np.ndarray

    def __post_init__(self):
        if self.representation not in ("xi-grid", "constrained-x-grid"):
            raise ValueError(f"unknown representation {self.representation!r}")
        n0, n1 = (np.asarray(n, dtype=float) for n in self.nodes)
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != (n0.size, n1.size):
            raise ValueError("values must have shape (len(nodes[0]), len(nodes[1]))")
        object.__setattr__(self, "nodes", (n0, n1))
        object.__setattr__(self, "values", vals)

    @classmethod
    def ground(cls, freqs: Frequencies, nodes0, nodes1, representation: str = "constrained-x-grid") -> "PUState":
        A, B = np.meshgrid(nodes0, nodes1, indexing="ij")
        f = ground_state_constrained if representation == "constrained-x-grid" else ground_state_xi
        return cls(representation, (nodes0, nodes1), f(A, B, freqs))
