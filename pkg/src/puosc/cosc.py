"""Complexified harmonic oscillator with ``L = qdot^2/2 - q^2/2 - i eps q qdot``.

Eigenfunctions ``psi_n = exp(eps q^2/2) phi_n`` are orthonormal under the
measure ``exp(-eps q^2) dq``. Propagators follow from the Hermitian oscillator
by the boundary factor ``exp(eps (q2^2 - q1^2)/2)``; the momentum kernel is
related to the Hermitian one through the Gaussian change-of-basis bracket.

Square roots use the principal branch; evaluation at caustics raises.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.linalg import expm, solve_banded
from scipy.special import roots_hermite

from .errors import (
    Caustic,
    GridTooCoarse,
    NonpositiveEpsilon,
    OrderTooLarge,
    QuadratureDivergence,
    SingularDenominator,
)

PSI_MAX_ORDER = 60
CAUSTIC_TOL = 1e-8
DEFAULT_NODES = 200
MAX_GRID_SPACING = 0.1


@dataclass(frozen=True)
class Epsilon:
    """Deformation parameter, restricted to ``|eps| < 1``."""

    value: float

    def __post_init__(self):
        v = float(self.value)
        if not math.isfinite(v) or abs(v) >= 1:
            raise ValueError(f"|eps| must be < 1, got {self.value}")
        object.__setattr__(self, "value", v)

    def __float__(self):
        return self.value


def _eps(eps) -> float:
    return Epsilon(float(eps)).value


def _positive_eps(eps) -> float:
    # the overlap and the measure only need eps > 0, not |eps| < 1
    e = float(eps)
    if not (math.isfinite(e) and e > 0):
        raise NonpositiveEpsilon(f"eps must be positive, got {eps}")
    return e


@dataclass(frozen=True)
class GridFunction:
    """Samples of a wave function on increasing real nodes.

    ``weights`` is set for Gauss-Hermite layouts (``descriptor='gauss-hermite'``)
    and holds the full quadrature weights, so ``sum(weights * values)``
    integrates against ``dq``.
    """

    nodes: np.ndarray
    values: np.ndarray
    descriptor: str = "uniform"
    weights: np.ndarray | None = None

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        values = np.asarray(self.values, dtype=complex)
        if nodes.ndim != 1 or nodes.shape != values.shape:
            raise ValueError("nodes and values must be 1-D arrays of equal length")
        if np.any(np.diff(nodes) <= 0):
            raise ValueError("nodes must be strictly increasing")
        if self.descriptor not in ("uniform", "gauss-hermite"):
            raise ValueError(f"unknown descriptor {self.descriptor!r}")
        if self.descriptor == "gauss-hermite":
            if self.weights is None or np.shape(self.weights) != nodes.shape:
                raise ValueError("gauss-hermite grids need one weight per node")
            object.__setattr__(self, "weights", np.asarray(self.weights, dtype=float))
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "values", values)

    @classmethod
    def sample(cls, func: Callable, nodes, descriptor: str = "uniform", weights=None) -> "GridFunction":
        nodes = np.asarray(nodes, dtype=float)
        return cls(nodes, func(nodes), descriptor, weights)

    def quadrature_weights(self) -> np.ndarray:
        if self.descriptor == "gauss-hermite":
            return self.weights
        h = np.diff(self.nodes)
        w = np.zeros_like(self.nodes)
        w[:-1] += h / 2
        w[1:] += h / 2
        return w

    def to_csv(self) -> str:
        lines = ["q,re,im"]
        lines += [f"{q!r},{v.real!r},{v.imag!r}" for q, v in zip(self.nodes, self.values)]
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class KernelValue:
    value: complex
    branch_note: str

    def __complex__(self):
        return self.value


# ---------------------------------------------------------------------------
# eigenfunctions and measure


def hermite_functions(nmax: int, q) -> np.ndarray:
    """Normalized oscillator functions ``phi_0 .. phi_nmax`` at ``q``.

    Uses the three-term recurrence on the normalized functions, which stays
    finite for large ``n``. Returns shape ``(nmax + 1,) + shape(q)``.
    """
    q = np.asarray(q, dtype=float)
    out = np.empty((nmax + 1,) + q.shape)
    out[0] = math.pi**-0.25 * np.exp(-(q**2) / 2)
    if nmax >= 1:
        out[1] = math.sqrt(2.0) * q * out[0]
    for n in range(1, nmax):
        out[n + 1] = math.sqrt(2.0 / (n + 1)) * q * out[n] - math.sqrt(n / (n + 1)) * out[n - 1]
    return out


def psi_n(n: int, eps, q):
    """``exp(eps q^2/2) N_n exp(-q^2/2) H_n(q)`` with ``N_n = (2^n n! sqrt(pi))^-1/2``.

    Raises
    ------
    OrderTooLarge
        For ``n > 60``.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    if n > PSI_MAX_ORDER:
        raise OrderTooLarge(f"n = {n} exceeds {PSI_MAX_ORDER}")
    e = _eps(eps)
    q = np.asarray(q, dtype=float)
    val = hermite_functions(n, q)[n] * np.exp(e * q**2 / 2)
    return float(val) if val.ndim == 0 else val


def energy(n: int) -> float:
    return n + 0.5


class Eigenstate:
    """Callable ``psi_n`` that advertises its Gaussian exponent ``(eps - 1)/2``."""

    def __init__(self, n: int, eps):
        if n > PSI_MAX_ORDER:
            raise OrderTooLarge(f"n = {n} exceeds {PSI_MAX_ORDER}")
        self.n = n
        self.eps = _eps(eps)
        self.gaussian_exponent = (self.eps - 1) / 2

    def __call__(self, q):
        return psi_n(self.n, self.eps, q)


def inner_product_mu(f, g, eps, nodes: int = DEFAULT_NODES, exponent: float | None = None) -> complex:
    """``int exp(-eps q^2) conj(f) g dq``.

    ``f`` and ``g`` are both :class:`GridFunction` on the same nodes, or both
    callables. For callables the integrand is assumed to behave like
    ``exp(-k q^2)`` times a polynomial; ``k`` is taken from the
    ``gaussian_exponent`` attributes when present (as for :class:`Eigenstate`),
    else from ``exponent``, else defaults to 1, and Gauss-Hermite nodes are
    rescaled accordingly.

    Raises
    ------
    QuadratureDivergence
        If the effective Gaussian exponent is not negative, or the rescaled
        integrand is not finite at the nodes.
    """
    e = _eps(eps)
    if isinstance(f, GridFunction) or isinstance(g, GridFunction):
        if not (isinstance(f, GridFunction) and isinstance(g, GridFunction)):
            raise TypeError("mixing GridFunction and callable operands")
        if not np.array_equal(f.nodes, g.nodes):
            raise ValueError("grid functions live on different nodes")
        w = f.quadrature_weights()
        return complex(np.sum(w * np.exp(-e * f.nodes**2) * np.conj(f.values) * g.values))

    ef, eg = getattr(f, "gaussian_exponent", None), getattr(g, "gaussian_exponent", None)
    if ef is not None and eg is not None:
        k = e - ef - eg
    elif exponent is not None:
        k = -exponent
    else:
        k = 1.0
    if k <= 0:
        raise QuadratureDivergence(f"integrand grows like exp({-k:.3g} q^2)")
    t, w = roots_hermite(nodes)
    q = t / math.sqrt(k)
    # weight exp(-t^2) is removed by multiplying with exp(k q^2)
    with np.errstate(over="ignore", invalid="ignore"):
        vals = np.exp(-e * q**2) * np.conj(f(q)) * g(q) * np.exp(t**2)
    if not np.all(np.isfinite(vals)):
        raise QuadratureDivergence("integrand overflowed at the quadrature nodes")
    return complex(np.sum(w * vals) / math.sqrt(k))


# ---------------------------------------------------------------------------
# finite differences


def _uniform_spacing(nodes: np.ndarray) -> float:
    h = np.diff(nodes)
    if len(nodes) < 5:
        raise GridTooCoarse("need at least 5 grid points")
    if not np.allclose(h, h[0], rtol=1e-9, atol=0):
        raise ValueError("grid must be uniform")
    return float(h[0])


def central_derivatives(values: np.ndarray, h: float, order: int = 4) -> tuple[np.ndarray, np.ndarray]:
    """First and second derivatives on interior points.

    ``order=2`` uses 3-point stencils and trims one point per side;
    ``order=4`` uses 5-point stencils and trims two.
    """
    f = values
    if order == 2:
        d1 = (f[2:] - f[:-2]) / (2 * h)
        d2 = (f[2:] - 2 * f[1:-1] + f[:-2]) / h**2
    elif order == 4:
        d1 = (-f[4:] + 8 * f[3:-1] - 8 * f[1:-3] + f[:-4]) / (12 * h)
        d2 = (-f[4:] + 16 * f[3:-1] - 30 * f[2:-2] + 16 * f[1:-3] - f[:-4]) / (12 * h**2)
    else:
        raise ValueError("order must be 2 or 4")
    return d1, d2


def schrodinger_residual_C(n: int, eps, grid, order: int = 4) -> float:
    """Max-norm of ``psi'' - 2 eps q psi' - ((1-eps^2) q^2 + eps - 2E_n) psi``.

    ``grid`` is a uniform array of nodes (or a uniform :class:`GridFunction`,
    whose nodes are used). Derivatives are central differences of the given
    order.

    Raises
    ------
    GridTooCoarse
        If the spacing exceeds 0.1 or there are fewer than 5 nodes.
    """
    e = _eps(eps)
    nodes = grid.nodes if isinstance(grid, GridFunction) else np.asarray(grid, dtype=float)
    h = _uniform_spacing(nodes)
    if h > MAX_GRID_SPACING:
        raise GridTooCoarse(f"spacing {h} exceeds {MAX_GRID_SPACING}")
    psi = psi_n(n, e, nodes)
    d1, d2 = central_derivatives(psi, h, order)
    trim = order // 2
    q = nodes[trim:-trim]
    p = psi[trim:-trim]
    res = d2 - 2 * e * q * d1 - ((1 - e**2) * q**2 + e - 2 * energy(n)) * p
    return float(np.abs(res).max())


# ---------------------------------------------------------------------------
# propagators


def _check_caustic(T):
    s = np.sin(T)
    if abs(s) < CAUSTIC_TOL:
        raise Caustic(f"sin(T) = {s:.3e}: T is a caustic", frequency=1.0)
    return s


def _ho_kernel(q2, q1, T) -> tuple[complex, str]:
    s = _check_caustic(T)
    c = np.cos(T)
    arg = 2j * math.pi * s
    pref = 1 / cmath.sqrt(arg)
    val = pref * cmath.exp(1j * ((q2**2 + q1**2) * c - 2 * q2 * q1) / (2 * s))
    return complex(val), f"principal sqrt, arg(2*pi*i*sin T) = {cmath.phase(arg):.12f}"


def propagator_q(q2, q1, T, eps) -> KernelValue:
    """Coordinate kernel ``<q2, t2 | q1, t1>`` with ``T = t2 - t1``.

    ``T`` may be complex (``T = -i tau`` gives the Euclidean kernel).

    Raises
    ------
    Caustic
        If ``|sin T| < 1e-8``.
    """
    e = _eps(eps)
    base, note = _ho_kernel(q2, q1, T)
    return KernelValue(base * cmath.exp(e * (q2**2 - q1**2) / 2), note)


def euclidean_spectral_sum(q2: float, q1: float, tau: float, nterms: int = 200) -> float:
    """``sum_n phi_n(q2) phi_n(q1) exp(-(n + 1/2) tau)`` for ``n < nterms``."""
    phi = hermite_functions(nterms - 1, np.array([q2, q1]))
    n = np.arange(nterms)
    return float(np.sum(phi[:, 0] * phi[:, 1] * np.exp(-(n + 0.5) * tau)))


def _momentum_denominator(T, e):
    den = (e**2 + 1) * np.sin(T) - 2j * e * np.cos(T)
    if abs(den) < 1e-12:
        raise SingularDenominator(f"(eps^2+1) sin T - 2 i eps cos T = {den:.3e}")
    return den


def propagator_p(p2c, p1, T, eps) -> KernelValue:
    """Momentum kernel ``<p2*, t2 | p1, t1>`` normalized to a delta at ``T, eps -> 0``.

    Raises
    ------
    SingularDenominator
        If ``(eps^2+1) sin T - 2 i eps cos T`` vanishes.
    """
    e = _eps(eps)
    den = _momentum_denominator(T, e)
    num = (np.cos(T) + 1j * e * np.sin(T)) * (p2c**2 + p1**2) - 2 * p2c * p1
    val = 1 / cmath.sqrt(2j * math.pi) / cmath.sqrt(den) * np.exp(0.5j * num / den)
    return KernelValue(np.asarray(val, dtype=complex)[()], f"principal sqrt, arg(den) = {cmath.phase(den):.12f}")


def basis_bracket_Pp(P, p, eps) -> complex:
    """Change-of-basis overlap ``<P|p> = (2 pi eps)^-1/2 exp(-(p-P)^2/(2 eps))``."""
    e = _positive_eps(eps)
    return np.asarray(np.exp(-((p - P) ** 2) / (2 * e)) / math.sqrt(2 * math.pi * e), dtype=complex)[()]


def completeness_measure_p(p, eps) -> float:
    """``(pi eps)^-1/2 exp((p - p*)^2/(4 eps)) = (pi eps)^-1/2 exp(-Im(p)^2/eps)``."""
    e = _positive_eps(eps)
    return np.asarray(np.exp(-np.imag(p) ** 2 / e) / math.sqrt(math.pi * e), dtype=float)[()]


def momentum_kernel_transform(p2c, p1, T, eps, nodes: int = 100) -> complex:
    """Double Gaussian transform of the Hermitian momentum kernel.

    ``int dP' dP <p2*|P'> <P', t2|P, t1> <P|p1>`` with the overlap weight of
    :func:`basis_bracket_Pp`; should equal :func:`propagator_p`.
    """
    e = _eps(eps)
    if e <= 0:
        raise NonpositiveEpsilon(f"eps must be positive, got {e}")
    t, w = roots_hermite(nodes)
    s = math.sqrt(2 * e)
    P2 = np.real(p2c) + s * t
    P1 = np.real(p1) + s * t
    A, B = np.meshgrid(P2, P1, indexing="ij")
    W = np.outer(w * np.exp(t**2), w * np.exp(t**2)) * s * s
    sT, cT = np.sin(T), np.cos(T)
    _check_caustic(T)
    K = np.exp(1j * ((A**2 + B**2) * cT - 2 * A * B) / (2 * sT)) / np.sqrt(2j * math.pi * sT + 0j)
    br2 = np.exp(-((p2c - A) ** 2) / (2 * e)) / math.sqrt(2 * math.pi * e)
    br1 = np.exp(-((p1 - B) ** 2) / (2 * e)) / math.sqrt(2 * math.pi * e)
    return complex(np.sum(W * br2 * br1 * K))


def resolve_identity(f: Callable, g: Callable, eps, nodes: int = 60, scale: float = 1.0) -> tuple[complex, complex]:
    """Both sides of ``int d^2p mu <f|p><p*|g> = <f|g>`` by quadrature.

    ``f`` and ``g`` should decay like Gaussians of width about ``scale``.
    Returns ``(lhs, rhs)``.
    """
    e = _eps(eps)
    if e <= 0:
        raise NonpositiveEpsilon(f"eps must be positive, got {e}")
    t, w = roots_hermite(2 * nodes)
    ws = w * np.exp(t**2)
    sP = math.sqrt(2 * e)

    def overlap(func, p, conj):
        P = np.real(p)[..., None] + sP * t
        vals = np.conj(func(P)) if conj else func(P)
        br = np.exp(-((p[..., None] - P) ** 2) / (2 * e)) / math.sqrt(2 * math.pi * e)
        return np.sum(ws * sP * vals * br, axis=-1)

    t2, w2 = roots_hermite(nodes)
    sx = scale
    sy = math.sqrt(e * (1 + e))
    X, Y = np.meshgrid(sx * t2, sy * t2, indexing="ij")
    W = np.outer(w2 * np.exp(t2**2) * sx, w2 * np.exp(t2**2) * sy)
    p = X + 1j * Y
    mu = np.exp(-(Y**2) / e) / math.sqrt(math.pi * e)
    lhs = np.sum(W * mu * overlap(f, p, True) * overlap(g, np.conj(p), False))
    q = scale * t
    rhs = np.sum(ws * scale * np.conj(f(q)) * g(q))
    return complex(lhs), complex(rhs)


def compose_q(q2, q1, T1, T2, eps, nodes: int = DEFAULT_NODES) -> complex:
    """``int dq K(q2, q; T2) K(q, q1; T1)`` on a rotated Gauss-Hermite contour.

    The intermediate exponent is ``i alpha q^2 + i beta q`` with real
    ``alpha``; the contour through the stationary point is turned by
    ``pi/4`` so the integrand decays like a Gaussian.
    """
    e = _eps(eps)
    s1, s2 = _check_caustic(T1), _check_caustic(T2)
    alpha = (np.cos(T1) / s1 + np.cos(T2) / s2) / 2
    beta = -(q2 / s2 + q1 / s1)
    if abs(alpha) < 1e-12:
        raise QuadratureDivergence("intermediate exponent has no quadratic term")
    q0 = -beta / (2 * alpha)
    theta = math.copysign(math.pi / 4, alpha)
    rot = cmath.exp(1j * theta)
    t, w = roots_hermite(nodes)
    scale = 1 / math.sqrt(abs(alpha))
    q = q0 + rot * scale * t

    def k(qa, qb, T, s):
        base = np.exp(1j * ((qa**2 + qb**2) * np.cos(T) - 2 * qa * qb) / (2 * s)) / np.sqrt(2j * math.pi * s + 0j)
        return base * np.exp(e * (qa**2 - qb**2) / 2)

    vals = k(q2, q, T2, s2) * k(q, q1, T1, s1) * np.exp(t**2)
    return complex(np.sum(w * vals) * rot * scale)


# ---------------------------------------------------------------------------
# path integral


def path_integral_kernel(q2: float, q1: float, T: float, eps, N: int) -> complex:
    """``N``-slice Gaussian path integral of the reduced real oscillator.

    The kinetic term is discretized by differences and the potential by the
    trapezoid rule, which converges at ``O(1/N^2)``. The ``eps q qdot`` term,
    taken at slice midpoints, telescopes to ``eps (q2^2 - q1^2)/2`` exactly.
    The interior Gaussian integral is done in closed form: the classical
    action from a tridiagonal solve and the fluctuation determinant from the
    scaled recurrence ``y_k = (2 - d^2) y_{k-1} - y_{k-2}``.

    Raises
    ------
    Caustic
        If ``|sin T| < 1e-8``.
    """
    e = _eps(eps)
    if N < 2:
        raise ValueError("need at least 2 slices")
    _check_caustic(T)
    d = T / N
    n = N - 1
    diag = np.full(n, 2 / d - d)
    off = np.full(n - 1, -1 / d)
    rhs = np.zeros(n)
    rhs[0] += q1 / d
    rhs[-1] += q2 / d
    ab = np.zeros((3, n))
    ab[0, 1:] = off
    ab[1] = diag
    ab[2, :-1] = off
    q = solve_banded((1, 1), ab, rhs)
    path = np.concatenate([[q1], q, [q2]])
    kinetic = np.sum(np.diff(path) ** 2) / (2 * d)
    potential = d * (np.sum(path**2) - (q1**2 + q2**2) / 2) / 2
    S = kinetic - potential
    y_prev, y = 1.0, 2 - d * d
    for _ in range(n - 1):
        y_prev, y = y, (2 - d * d) * y - y_prev
    # d * y_{N-1} -> sin T as N grows
    amp = 1 / cmath.sqrt(2j * math.pi * d * y)
    return complex(amp * cmath.exp(1j * S) * cmath.exp(e * (q2**2 - q1**2) / 2))


def commutator_qq(t1: float, t2: float, eps=0.0) -> complex:
    """``[q(t1), q(t2)]`` from the Heisenberg flow of ``(q, p)``.

    ``q(t2) = U00 q(t1) + U01 p(t1)`` with ``U = exp(T G)`` and
    ``G = [[i eps, 1], [-(1 - eps^2), -i eps]]``; ``[q, p] = i`` gives
    ``i U01 = i sin T``.
    """
    e = _eps(eps)
    G = np.array([[1j * e, 1], [-(1 - e**2), -1j * e]])
    U = expm((t2 - t1) * G)
    return complex(1j * U[0, 1])


def kernel_record(q1, q2, T, eps) -> dict:
    kv = propagator_q(q2, q1, T, eps)
    return {
        "q1": q1,
        "q2": q2,
        "T": T,
        "eps": float(eps),
        "re": kv.value.real,
        "im": kv.value.imag,
        "branch_note": kv.branch_note,
    }
