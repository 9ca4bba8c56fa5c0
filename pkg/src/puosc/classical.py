"""Classical PU dynamics: exact solution, fixed-step integration, identity checks
and the equal-frequency degeneracy."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .core import (
    ComplexPhasePoint,
    Frequencies,
    PUCoefficients,
    RealPhasePoint,
    build_M_inverse,
    symplectic_residual,
)
from .errors import InsufficientSamples, StepTooLarge, ZeroParameter

STABILITY_LIMIT = 0.5

# 2-stage Gauss-Legendre tableau.
_S3 = math.sqrt(3.0)
_GL_A = np.array([[0.25, 0.25 - _S3 / 6], [0.25 + _S3 / 6, 0.25]])
_GL_B = np.array([0.5, 0.5])


@dataclass(frozen=True)
class GeneralSolutionCoeffs:
    C1: complex = 0j
    C2: complex = 0j
    C3: complex = 0j
    C4: complex = 0j

    def as_array(self) -> np.ndarray:
        return np.array([self.C1, self.C2, self.C3, self.C4], dtype=complex)


@dataclass(frozen=True)
class IntegratorConfig:
    dt: float
    steps: int
    method: str = "rk4"


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # shape (len(times), 4): x, z, Pix, Piz
    config: IntegratorConfig

    def __len__(self):
        return len(self.times)

    def point(self, k: int) -> ComplexPhasePoint:
        return ComplexPhasePoint.from_array(self.states[k])


def pu_generator(freqs: Frequencies) -> np.ndarray:
    """Matrix A of the first-order system dX/dt = A X for X = (x, z, Pix, Piz)."""
    return np.array(
        [
            [0, 1, 0, 0],
            [0, 0, 0, -1],
            [-freqs.prod_sq, 0, 0, 0],
            [0, freqs.sum_sq, -1, 0],
        ],
        dtype=complex,
    )


def _mode_terms(freqs: Frequencies, t):
    w1, w2 = freqs.omega1, freqs.omega2
    t = np.asarray(t, dtype=float)
    return (
        np.exp(1j * w1 * t),
        np.exp(-1j * w1 * t),
        np.exp(1j * w2 * t),
        np.exp(-1j * w2 * t),
    )


def general_solution(coeffs: GeneralSolutionCoeffs, freqs: Frequencies, t):
    e1p, e1m, e2p, e2m = _mode_terms(freqs, t)
    return coeffs.C1 * e1p + coeffs.C2 * e1m + coeffs.C3 * e2p + coeffs.C4 * e2m


def general_solution_state(coeffs: GeneralSolutionCoeffs, freqs: Frequencies, t) -> np.ndarray:
    """Full phase-space state ``(x, z, Pix, Piz)`` of the mode expansion at ``t``."""
    w1, w2 = freqs.omega1, freqs.omega2
    e1p, e1m, e2p, e2m = _mode_terms(freqs, t)
    C1, C2, C3, C4 = coeffs.as_array()
    m1 = C1 * e1p + C2 * e1m
    m2 = C3 * e2p + C4 * e2m
    d1 = 1j * w1 * (C1 * e1p - C2 * e1m)
    d2 = 1j * w2 * (C3 * e2p - C4 * e2m)
    x = m1 + m2
    z = d1 + d2
    pix = w2**2 * d1 + w1**2 * d2
    piz = w1**2 * m1 + w2**2 * m2
    return np.stack([x, z, pix, piz], axis=-1)


def fit_general_solution(X0: ComplexPhasePoint, freqs: Frequencies, t0: float = 0.0) -> GeneralSolutionCoeffs:
    """Mode amplitudes reproducing the state ``X0`` at time ``t0``."""
    basis = np.array(
        [general_solution_state(GeneralSolutionCoeffs(*np.eye(4)[k]), freqs, t0) for k in range(4)]
    ).T
    return GeneralSolutionCoeffs(*np.linalg.solve(basis, X0.as_array()))


def pu_ode_residual(coeffs: GeneralSolutionCoeffs, freqs: Frequencies, t) -> float:
    """|x'''' + (w1^2+w2^2) x'' + w1^2 w2^2 x| using exact derivatives of each mode."""
    w1, w2 = freqs.omega1, freqs.omega2
    e = _mode_terms(freqs, t)
    roots = (1j * w1, -1j * w1, 1j * w2, -1j * w2)
    total = 0
    for C, r, ek in zip(coeffs.as_array(), roots, e):
        total = total + C * (r**4 + freqs.sum_sq * r**2 + freqs.prod_sq) * ek
    return float(np.abs(total).max())


def _gauss4_step_matrix(A: np.ndarray, dt: float) -> np.ndarray:
    n = A.shape[0]
    eye = np.eye(n, dtype=complex)
    # Stage system (I - dt * (A_gl kron A)) K = (1 kron A) X; step = I + dt * (b kron I) K.
    big = np.eye(2 * n, dtype=complex) - dt * np.kron(_GL_A, A)
    rhs = np.kron(np.ones((2, 1)), A)
    stages = np.linalg.solve(big, rhs)
    return eye + dt * np.kron(_GL_B[None, :], eye) @ stages


def integrate(X0: ComplexPhasePoint, freqs: Frequencies, config: IntegratorConfig) -> Trajectory:
    """Fixed-step integration of Hamilton's equations of H_PU.

    ``method='rk4'`` is the classical Runge-Kutta scheme. ``method='gauss4'``
    is the 2-stage Gauss-Legendre collocation scheme, also fourth order, which
    conserves every quadratic invariant (H_PU included) to rounding.

    Raises
    ------
    StepTooLarge
        If ``dt * max(w1, w2) >= 0.5``.
    """
    dt, steps = config.dt, config.steps
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if steps < 0:
        raise ValueError(f"steps must be non-negative, got {steps}")
    wmax = max(freqs.omega1, freqs.omega2)
    if dt * wmax >= STABILITY_LIMIT:
        raise StepTooLarge(f"dt*max(omega) = {dt * wmax:.3g} >= {STABILITY_LIMIT}")
    A = pu_generator(freqs)
    if config.method == "rk4":
        step = lambda X: _rk4_step(A, X, dt)  # noqa: E731
    elif config.method == "gauss4":
        S = _gauss4_step_matrix(A, dt)
        step = lambda X: S @ X  # noqa: E731
    else:
        raise ValueError(f"unknown method {config.method!r}; expected 'rk4' or 'gauss4'")
    states = np.empty((steps + 1, 4), dtype=complex)
    states[0] = X0.as_array()
    for k in range(steps):
        states[k + 1] = step(states[k])
    times = dt * np.arange(steps + 1)
    return Trajectory(times=times, states=states, config=config)


def _rk4_step(A, X, dt):
    k1 = A @ X
    k2 = A @ (X + 0.5 * dt * k1)
    k3 = A @ (X + 0.5 * dt * k2)
    k4 = A @ (X + dt * k3)
    return X + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def hamiltonian_pu(X, freqs: Frequencies):
    """Classical value of H_PU; accepts a point or an (..., 4) array."""
    v = X.as_array() if isinstance(X, ComplexPhasePoint) else np.asarray(X)
    x, z, px, pz = v[..., 0], v[..., 1], v[..., 2], v[..., 3]
    h = -pz**2 / 2 - freqs.sum_sq * z**2 / 2 + z * px + freqs.prod_sq * x**2 / 2
    return complex(h) if np.ndim(h) == 0 else h


def hamiltonian_xi(xi, freqs: Frequencies):
    v = xi.as_array() if isinstance(xi, RealPhasePoint) else np.asarray(xi)
    x1, x2, p1, p2 = v[..., 0], v[..., 1], v[..., 2], v[..., 3]
    h = p1**2 / 2 + freqs.omega1**2 * x1**2 / 2 + p2**2 / 2 + freqs.omega2**2 * x2**2 / 2
    return h.item() if np.ndim(h) == 0 and np.isrealobj(h) else h


def lagrangian_pu(x, xd, xdd, freqs: Frequencies):
    return -xdd**2 / 2 + freqs.sum_sq * xd**2 / 2 - freqs.prod_sq * x**2 / 2


def lagrangian_xi(xi, xidot, freqs: Frequencies):
    xi = np.asarray(xi)
    xidot = np.asarray(xidot)
    return (
        xidot[..., 0] ** 2 / 2
        - freqs.omega1**2 * xi[..., 0] ** 2 / 2
        + xidot[..., 1] ** 2 / 2
        - freqs.omega2**2 * xi[..., 1] ** 2 / 2
    )


def xi_projection(traj: Trajectory, coeffs: PUCoefficients) -> np.ndarray:
    """``M^-1 X`` along the trajectory, shape (N, 4), complex."""
    return traj.states @ build_M_inverse(coeffs).T


def _d1_five_point(y: np.ndarray, h: float) -> np.ndarray:
    return (y[:-4] - 8 * y[1:-3] + 8 * y[3:-1] - y[4:]) / (12 * h)


def _d2_five_point(y: np.ndarray, h: float) -> np.ndarray:
    return (-y[:-4] + 16 * y[1:-3] - 30 * y[2:-2] + 16 * y[3:-1] - y[4:]) / (12 * h * h)


def lagrangian_identity_residual(
    traj: Trajectory, freqs: Frequencies, coeffs: PUCoefficients, method: str = "flow"
) -> float:
    """Max over interior samples of |L_PU + d(x' x'')/dt - L_xi|.

    With ``method='flow'`` all time derivatives come from the equations of
    motion: x' = z, x'' = -Piz, x''' = Pix - (w1^2+w2^2) z and
    d(xi, P)/dt = M^-1 A X. With ``method='fd'`` the two time derivatives
    d(x' x'')/dt and d xi/dt are taken by fourth-order central differences of
    the sampled trajectory instead.
    """
    if len(traj) < 5:
        raise InsufficientSamples(f"need at least 5 samples, got {len(traj)}")
    S = traj.states
    x, z, px, pz = S[:, 0], S[:, 1], S[:, 2], S[:, 3]
    xd, xdd = z, -pz
    Minv = build_M_inverse(coeffs)
    xi = S @ Minv.T
    lpu = lagrangian_pu(x, xd, xdd, freqs)
    if method == "flow":
        xddd = px - freqs.sum_sq * z
        dfdt = xdd**2 + xd * xddd
        xidot = S @ (Minv @ pu_generator(freqs)).T
        res = lpu + dfdt - lagrangian_xi(xi, xidot, freqs)
        return float(np.abs(res[2:-2]).max())
    if method == "fd":
        h = traj.config.dt
        dfdt = _d1_five_point(xd * xdd, h)
        xidot = _d1_five_point(xi, h)
        res = lpu[2:-2] + dfdt - lagrangian_xi(xi[2:-2], xidot, freqs)
        return float(np.abs(res).max())
    raise ValueError(f"unknown method {method!r}")


def oscillator_residual(traj: Trajectory, freqs: Frequencies, coeffs: PUCoefficients) -> float:
    """Max |xi_i'' + w_i^2 xi_i| along the xi-projection, five-point stencil."""
    if len(traj) < 5:
        raise InsufficientSamples(f"need at least 5 samples, got {len(traj)}")
    xi = xi_projection(traj, coeffs)
    h = traj.config.dt
    r1 = _d2_five_point(xi[:, 0], h) + freqs.omega1**2 * xi[2:-2, 0]
    r2 = _d2_five_point(xi[:, 1], h) + freqs.omega2**2 * xi[2:-2, 1]
    return float(max(np.abs(r1).max(), np.abs(r2).max()))


def trajectory_csv(traj: Trajectory, freqs: Frequencies, coeffs: PUCoefficients) -> str:
    """CSV text: t, re/im of x, z, Pix, Piz, then xi1, xi2, P1, P2 and H_PU."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    names = ("x", "z", "Pix", "Piz")
    header = ["t"]
    for n in names:
        header += [f"{n}_re", f"{n}_im"]
    header += ["xi1", "xi2", "P1", "P2", "H_PU_re", "H_PU_im"]
    w.writerow(header)
    xi = xi_projection(traj, coeffs)
    H = hamiltonian_pu(traj.states, freqs)
    for k, t in enumerate(traj.times):
        row = [repr(float(t))]
        for v in traj.states[k]:
            row += [repr(float(v.real)), repr(float(v.imag))]
        row += [repr(float(v.real)) for v in xi[k]]
        row += [repr(float(H[k].real)), repr(float(H[k].imag))]
        w.writerow(row)
    return buf.getvalue()


# --- equal-frequency case -------------------------------------------------


@dataclass(frozen=True)
class EigenStructure:
    eigenvalues: tuple  # distinct eigenvalues, sorted by (imag, real) descending
    algebraic_mult: tuple
    geometric_mult: tuple
    defective: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(
            self, "defective", any(g < m for g, m in zip(self.geometric_mult, self.algebraic_mult))
        )

    @property
    def all_eigenvalues(self) -> list:
        out = []
        for lam, m in zip(self.eigenvalues, self.algebraic_mult):
            out += [lam] * m
        return out


def companion_matrix(c2: float, c0: float) -> np.ndarray:
    """State matrix of x'''' + c2 x'' + c0 x = 0 acting on (x, x', x'', x''')."""
    return np.array(
        [
            [0, 1, 0, 0],
            [0, 0, 1, 0],
            [0, 0, 0, 1],
            [-c0, 0, -c2, 0],
        ],
        dtype=float,
    )


def eigen_structure(A, cluster_tol: float = 1e-5, rank_tol: float = 1e-8) -> EigenStructure:
    """Algebraic and geometric multiplicities of the eigenvalues of ``A``.

    Eigenvalues closer than ``cluster_tol * max(1, ||A||)`` are merged (a
    Jordan block of size k splits them by about eps**(1/k)). The geometric
    multiplicity is ``n - rank(A - lam I)`` with singular values below
    ``rank_tol * ||A||`` treated as zero.
    """
    A = np.asarray(A, dtype=complex)
    n = A.shape[0]
    norm = np.linalg.norm(A, 2)
    raw = np.linalg.eigvals(A)
    tol = cluster_tol * max(1.0, norm)
    clusters: list[list[complex]] = []
    for lam in raw:
        for cl in clusters:
            if abs(lam - np.mean(cl)) < tol:
                cl.append(lam)
                break
        else:
            clusters.append([lam])
    reps = [complex(np.mean(cl)) for cl in clusters]
    order = sorted(range(len(reps)), key=lambda k: (-round(reps[k].imag, 9), -round(reps[k].real, 9)))
    eig, alg, geo = [], [], []
    for k in order:
        lam = reps[k]
        sv = np.linalg.svd(A - lam * np.eye(n), compute_uv=False)
        rank = int(np.sum(sv > rank_tol * norm))
        eig.append(lam)
        alg.append(len(clusters[k]))
        geo.append(n - rank)
    return EigenStructure(tuple(eig), tuple(alg), tuple(geo))


def equal_freq_evolution_defect(omega: float) -> EigenStructure:
    if omega <= 0:
        raise ValueError(f"omega must be positive, got {omega}")
    return eigen_structure(companion_matrix(2 * omega**2, omega**4))


@dataclass(frozen=True)
class EqualFreqTransform:
    omega: float
    b: float
    d: float
    a: float
    c: float

    @property
    def forward(self) -> np.ndarray:
        """Matrix sending (xi1, xi2, P1, P2) to (x, z, Pix, Piz)."""
        w, b, d = self.omega, self.b, self.d
        s = math.sqrt(1 / w**2 + b**2)
        return np.array(
            [
                [1j * b, s, 0, 0],
                [0, 0, 1j * d, d],
                [0, 0, 1j * (d * w**2 - 1 / (2 * d)), d * w**2 + 1 / (2 * d)],
                [1j * w**2 * s, b * w**2, 0, 0],
            ],
            dtype=complex,
        )

    @property
    def backward(self) -> np.ndarray:
        w, b, d = self.omega, self.b, self.d
        s = math.sqrt(1 / w**2 + b**2)
        return np.array(
            [
                [1j * b * w**2, 0, 0, -1j * s],
                [w**2 * s, 0, 0, -b],
                [0, -1j * (d * w**2 + 1 / (2 * d)), 1j * d, 0],
                [0, -(d * w**2 - 1 / (2 * d)), d, 0],
            ],
            dtype=complex,
        )

    def invariant_residuals(self) -> dict:
        w, a, b, c, d = self.omega, self.a, self.b, self.c, self.d
        return {
            "cd-ab-1/2": abs(c * d - a * b - 0.5),
            "c^2-a^2-w^2": abs(c * c - a * a - w * w),
            "b^2-d^2": abs(b * b - d * d),
        }

    def symplectic_residual(self) -> float:
        return symplectic_residual(self.forward)


def equal_freq_transform(omega: float, b: float) -> EqualFreqTransform:
    """Transformation to two equal-frequency oscillators with free parameter ``b``.

    The second parameter is fixed to ``d = b``.

    Raises
    ------
    ZeroParameter
        If ``b == 0``.
    """
    if b == 0:
        raise ZeroParameter("the free parameter b must be non-zero")
    if omega <= 0:
        raise ValueError(f"omega must be positive, got {omega}")
    a = omega**2 * b - 1 / (4 * b)
    c = omega**2 * b + 1 / (4 * b)
    return EqualFreqTransform(omega=omega, b=b, d=b, a=a, c=c)
