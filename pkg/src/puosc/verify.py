"""Registry of numerical and exact checks, grouped into suites.

Each check receives its own ``numpy.random.Generator`` derived from the run
seed and its position in the registry, so results do not depend on whether
checks run sequentially or in parallel.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from . import brackets as br
from . import classical as cl
from . import cosc
from . import core
from . import puq

SUITES = ("core", "classical", "brackets", "cosc", "puq")


@dataclass(frozen=True)
class Check:
    name: str
    suite: str
    anchor: str
    tolerance: float
    comparator: str  # "<", ">" or "=="
    run: Callable[[np.random.Generator], float]


@dataclass(frozen=True)
class CheckRecord:
    name: str
    anchor: str
    status: str
    measured: float
    tolerance: float
    comparator: str

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "anchor": self.anchor,
            "status": self.status,
            "measured": self.measured,
            "tolerance": self.tolerance,
            "comparator": self.comparator,
        }


def evaluate(check: Check, rng: np.random.Generator) -> CheckRecord:
    try:
        measured = float(check.run(rng))
    except Exception as exc:  # a crashing check is a failing check
        return CheckRecord(check.name, check.anchor, f"error: {type(exc).__name__}: {exc}", math.nan, check.tolerance, check.comparator)
    if check.comparator == "<":
        ok = measured < check.tolerance
    elif check.comparator == ">":
        ok = measured > check.tolerance
    else:
        ok = measured == check.tolerance
    return CheckRecord(check.name, check.anchor, "pass" if ok else "fail", measured, check.tolerance, check.comparator)


_REGISTRY: list[Check] = []


def check(name, suite, anchor, tolerance, comparator="<"):
    def deco(fn):
        _REGISTRY.append(Check(name, suite, anchor, tolerance, comparator, fn))
        return fn

    return deco


def registry(suite: str = "all") -> list[Check]:
    if suite == "all":
        return list(_REGISTRY)
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; expected one of {('all',) + SUITES}")
    return [c for c in _REGISTRY if c.suite == suite]


def run_suite(suite: str = "all", seed: int = 7, parallel: int = 1) -> list[CheckRecord]:
    checks = registry(suite)
    index = {id(c): k for k, c in enumerate(_REGISTRY)}
    rngs = [np.random.default_rng([seed, index[id(c)]]) for c in checks]
    if parallel > 1:
        with ThreadPoolExecutor(max_workers=parallel) as pool:
            return list(pool.map(evaluate, checks, rngs))
    return [evaluate(c, r) for c, r in zip(checks, rngs)]


def random_frequencies(rng, n):
    out = []
    while len(out) < n:
        w1, w2 = rng.uniform(0.2, 5.0, size=2)
        if abs(w1 - w2) > 0.05:
            out.append(core.Frequencies(max(w1, w2), min(w1, w2)))
    return out


SQ2 = core.Frequencies(math.sqrt(2), 1.0)

# --- core -------------------------------------------------------------------


@check("symplectic residual of M, 50 random pairs", "core", "symplectic-group", 1e-12)
def _(rng):
    return max(core.symplectic_residual(core.build_M(core.compute_coefficients(f))) for f in random_frequencies(rng, 50))


@check("|det M - 1|, 50 random pairs", "core", "unimodular", 1e-12)
def _(rng):
    return max(abs(np.linalg.det(core.build_M(core.compute_coefficients(f))) - 1) for f in random_frequencies(rng, 50))


@check("|b(c-a) - 1|, both signs", "core", "coefficient-identities", 1e-12)
def _(rng):
    return max(
        abs(c.b * (c.c - c.a) - 1)
        for f in random_frequencies(rng, 50)
        for c in (core.compute_coefficients(f, 1), core.compute_coefficients(f, -1))
    )


@check("|ac - w1^2 w2^2 b^2| relative", "core", "coefficient-identities", 1e-12)
def _(rng):
    out = 0.0
    for f in random_frequencies(rng, 50):
        c = core.compute_coefficients(f)
        out = max(out, abs(c.a * c.c - f.prod_sq * c.b**2) / (c.a * c.c))
    return out


@check("closed-form inverse of M vs numerical inverse", "core", "symplectic-group", 1e-10)
def _(rng):
    out = 0.0
    for f in random_frequencies(rng, 50):
        c = core.compute_coefficients(f)
        M = core.build_M(c)
        out = max(out, np.abs(core.build_M_inverse(c) - np.linalg.inv(M)).max() * np.abs(M).max())
    return out


@check("reality residual on images of real points", "core", "reality-conditions", 1e-12)
def _(rng):
    out = 0.0
    for f in random_frequencies(rng, 20):
        c = core.compute_coefficients(f)
        xi = core.RealPhasePoint(*rng.normal(size=4))
        X = core.to_complex(xi, c)
        scale = max(1.0, float(np.abs(X.as_array()).max()))
        back = core.to_real(X, c, tol=1e-9).as_array()
        out = max(out, core.reality_residual(X, c) / scale, np.abs(back - xi.as_array()).max())
    return out


# --- classical ----------------------------------------------------------------


def _ten_periods(method="gauss4"):
    c = core.compute_coefficients(SQ2)
    X0 = core.to_complex(core.RealPhasePoint(1.0, 0.0, 0.0, 0.0), c)
    dt = SQ2.t_min / 200
    traj = cl.integrate(X0, SQ2, cl.IntegratorConfig(dt, 2000, method))
    return traj, c, X0


@check("H_PU drift over 10 periods (gauss4)", "classical", "total-derivative-equivalence", 1e-8)
def _(rng):
    traj, _, _ = _ten_periods()
    H = cl.hamiltonian_pu(traj.states, SQ2)
    return float(np.abs(H - H[0]).max())


@check("Lagrangian identity L_PU + d/dt(x'x'') = L_xi", "classical", "total-derivative-equivalence", 1e-8)
def _(rng):
    traj, c, _ = _ten_periods()
    return cl.lagrangian_identity_residual(traj, SQ2, c)


@check("xi-projection obeys decoupled oscillators", "classical", "total-derivative-equivalence", 1e-6)
def _(rng):
    traj, c, _ = _ten_periods()
    return cl.oscillator_residual(traj, SQ2, c)


@check("integrated trajectory vs exact general solution", "classical", "general-solution", 1e-6)
def _(rng):
    traj, _, X0 = _ten_periods()
    C = cl.fit_general_solution(X0, SQ2)
    exact = cl.general_solution_state(C, SQ2, traj.times)
    return float(np.abs(traj.states - exact).max())


@check("equal-frequency companion: |alg-2| + |geo-1| per eigenvalue", "classical", "not-diagonalizable", 0.0, "==")
def _(rng):
    es = cl.equal_freq_evolution_defect(float(rng.uniform(0.5, 2.0)))
    return float(sum(abs(a - 2) + abs(g - 1) for a, g in zip(es.algebraic_mult, es.geometric_mult)) + (len(es.eigenvalues) != 2))


@check("equal-frequency forward matrix is not symplectic", "classical", "neither-canonical-nor-similarity", 0.1, ">")
def _(rng):
    return cl.equal_freq_transform(1.0, 1.0).symplectic_residual()


@check("equal-frequency forward * backward = I", "classical", "free-parameter", 1e-12)
def _(rng):
    t = cl.equal_freq_transform(1.0, 1.0)
    return float(np.abs(t.forward @ t.backward - np.eye(4)).max())


# --- brackets -----------------------------------------------------------------


def _table(system, names, cs=True):
    vars_ = names if isinstance(names, dict) else {n: system.space.var(n) for n in names}
    return {k: str(v) for k, v in br.bracket_table(vars_, system.constraints if cs else None).items()}


def _mismatch(got: dict, expected: dict) -> float:
    return float(sum(got.get(k) != v for k, v in expected.items()) + len(set(got) - set(expected)))


@check("Dirac brackets, unequal frequencies (exact)", "brackets", "dirac-brackets-unequal", 0.0, "==")
def _(rng):
    u = br.unequal_extended()
    return _mismatch(_table(u, ["x", "xdd", "p0", "p2"]), {("x", "p0"): "1", ("xdd", "p2"): "1"})


@check("constraint inverse matrix, unequal frequencies", "brackets", "dirac-brackets-unequal", 0.0, "==")
def _(rng):
    _, C = br.constraint_matrix(br.unequal_extended().constraints)
    return float([[str(e) for e in row] for row in C] != [["0", "-1"], ["1", "0"]])


@check("canonical (x, z, Pix, Piz) table, unequal frequencies", "brackets", "canonical-set-unequal", 0.0, "==")
def _(rng):
    u = br.unequal_extended()
    return _mismatch(_table(u, u.canonical), {("x", "Pix"): "1", ("z", "Piz"): "1"})


@check("reduced Hamiltonian equals H_PU, unequal frequencies", "brackets", "canonical-set-unequal", 0.0, "==")
def _(rng):
    u = br.unequal_extended()
    return float(u.canonical_hamiltonian != u.target_hamiltonian)


@check("Dirac brackets, equal frequencies (exact)", "brackets", "dirac-brackets-equal", 0.0, "==")
def _(rng):
    e = br.equal_extended()
    expected = {("x", "p0"): "1", ("xdd", "p0"): "-1/2*w^2", ("xdd", "p2"): "1/2"}
    return _mismatch(_table(e, ["x", "xdd", "p0", "p2"]), expected)


@check("tilde-variable table, equal frequencies", "brackets", "canonical-set-equal", 0.0, "==")
def _(rng):
    e = br.equal_extended()
    return _mismatch(_table(e, e.canonical), {("x", "Pix"): "1", ("z", "Piz"): "1"})


@check("equal-frequency Hamiltonian identity", "brackets", "equal-frequency-hamiltonian", 0.0, "==")
def _(rng):
    e = br.equal_extended()
    return float(e.canonical_hamiltonian != e.target_hamiltonian)


@check("Ostrogradsky momenta of both extended Lagrangians", "brackets", "ostrogradsky-momenta", 0.0, "==")
def _(rng):
    got = [str(m) for m in br.unequal_extended().momenta] + [str(m) for m in br.equal_extended().momenta]
    expected = ["w1^2*xd + w2^2*xd + xddd", "0", "xd", "3/2*w^2*xd + xddd", "-1/2*w^2*x - 1/2*xdd", "1/2*xd"]
    return float(sum(g != e for g, e in zip(got, expected)))


@check("generating function -z Piz: nonzero residual count", "brackets", "generating-function", 0.0, "==")
def _(rng):
    out = 0
    for w1sq, w2sq, b in ((2, 1, 1), (5, 1, Fraction(1, 2)), (Fraction(13, 4), 1, Fraction(2, 3))):
        t = br.pu_transformation(w2sq * Fraction(b), b, w1sq * Fraction(b))
        out += sum(not r.is_zero() for r in br.generating_function_check(t.f, t.xi_map, t.P_map))
        out += not br.boundary_term_residual(t.f, t.xi_map, t.P_map).is_zero()
    return float(out)


@check("antisymmetry, Leibniz and Jacobi on random polynomials", "brackets", "poisson-algebra", 0.0, "==")
def _(rng):
    space = br.PhaseSpace(["w", "x", "y", "px", "py"], pairs=[("x", "px"), ("y", "py")])
    gens = [space.var(n) for n in space.names]

    def rand_poly():
        p = space.zero()
        for _ in range(3):
            term = space.const(Fraction(int(rng.integers(-3, 4)), int(rng.integers(1, 3))))
            for _ in range(int(rng.integers(0, 3))):
                term = term * gens[int(rng.integers(len(gens)))]
            p = p + term
        return p

    bad = 0
    pb = br.poisson_bracket
    for _ in range(100):
        A, B, C = rand_poly(), rand_poly(), rand_poly()
        bad += pb(A, B) != -pb(B, A)
        bad += pb(A, B * C) != pb(A, B) * C + B * pb(A, C)
        bad += not (pb(A, pb(B, C)) + pb(B, pb(C, A)) + pb(C, pb(A, B))).is_zero()
    return float(bad)


# --- cosc ---------------------------------------------------------------------


@check("<psi_n|psi_m>_mu = delta_nm, n,m <= 10", "cosc", "positive-norm", 1e-10)
def _(rng):
    out = 0.0
    for e in (0.1, 0.3, 0.5):
        for n in range(11):
            for m in range(11):
                ip = cosc.inner_product_mu(cosc.Eigenstate(n, e), cosc.Eigenstate(m, e), e)
                out = max(out, abs(ip - (n == m)))
    return out


@check("Schroedinger residual of psi_n, n <= 5", "cosc", "complex-schroedinger", 1e-6)
def _(rng):
    grid = np.linspace(-6, 6, 1201)
    return max(cosc.schrodinger_residual_C(n, e, grid) for n in range(6) for e in (0.0, 0.1, 0.3, 0.5))


@check("Euclidean kernel vs 200-term spectral sum", "cosc", "coordinate-kernel", 1e-8)
def _(rng):
    out = 0.0
    for tau in (0.5, 1.0, 2.0, 3.0):
        for q2, q1 in rng.uniform(-2, 2, size=(5, 2)):
            kv = cosc.propagator_q(q2, q1, -1j * tau, 0.0).value
            out = max(out, abs(kv - cosc.euclidean_spectral_sum(q2, q1, tau)))
    return out


@check("kernel factorization exp(eps(q2^2-q1^2)/2)", "cosc", "green-function-relation", 1e-15)
def _(rng):
    out = 0.0
    for q2, q1 in rng.uniform(-2, 2, size=(20, 2)):
        k0 = cosc.propagator_q(q2, q1, 1.1, 0.0).value
        k = cosc.propagator_q(q2, q1, 1.1, 0.3).value
        out = max(out, abs(k - math.exp(0.3 * (q2**2 - q1**2) / 2) * k0) / abs(k))
    return out


@check("coordinate kernel semigroup", "cosc", "coordinate-kernel", 1e-6)
def _(rng):
    out = 0.0
    for T1, T2 in ((0.4, 0.7), (1.0, 1.3), (0.2, 2.5)):
        for e in (0.0, 0.3):
            q2, q1 = rng.uniform(-1.5, 1.5, size=2)
            ref = cosc.propagator_q(q2, q1, T1 + T2, e).value
            out = max(out, abs(cosc.compose_q(q2, q1, T1, T2, e) - ref) / abs(ref))
    return out


@check("momentum kernel vs double Gaussian transform", "cosc", "momentum-kernel", 1e-6)
def _(rng):
    out = 0.0
    for e in (0.3, 0.5):
        for T in (0.5, 1.0, 2.5):
            p2c, p1 = rng.normal(scale=0.4, size=2) + 1j * rng.normal(scale=0.2, size=2)
            ref = cosc.propagator_p(p2c, p1, T, e).value
            out = max(out, abs(cosc.momentum_kernel_transform(p2c, p1, T, e) - ref) / abs(ref))
    return out


@check("completeness of |p> with the measure mu(p, p*)", "cosc", "completeness-measure", 1e-6)
def _(rng):
    f = lambda P: np.exp(-((P - 0.3) ** 2) / 2) * (1 + 0.2j * P)  # noqa: E731
    g = lambda P: np.exp(-((P + 0.1) ** 2) / 1.5)  # noqa: E731
    lhs, rhs = cosc.resolve_identity(f, g, 0.3)
    return abs(lhs - rhs)


@check("1000-slice path integral vs closed form", "cosc", "path-integral", 1e-4)
def _(rng):
    return abs(cosc.path_integral_kernel(1.0, 0.0, 1.0, 0.0, 1000) - cosc.propagator_q(1.0, 0.0, 1.0, 0.0).value)


@check("path integral convergence order |p - 2|", "cosc", "path-integral", 0.05)
def _(rng):
    ref = cosc.propagator_q(1.0, 0.0, 1.0, 0.0).value
    errs = [abs(cosc.path_integral_kernel(1.0, 0.0, 1.0, 0.0, N) - ref) for N in (250, 500, 1000)]
    rates = [math.log2(errs[k] / errs[k + 1]) for k in range(2)]
    return max(abs(r - 2) for r in rates)


@check("[q(t1), q(t2)] = i sin T", "cosc", "commutator", 1e-12)
def _(rng):
    out = 0.0
    for t1, t2, e in zip(rng.uniform(0, 3, 10), rng.uniform(0, 3, 10), rng.uniform(-0.9, 0.9, 10)):
        out = max(out, abs(cosc.commutator_qq(t1, t2, e) - 1j * math.sin(t2 - t1)))
    return out


# --- puq ----------------------------------------------------------------------


@check("lowest 10 levels vs 900-state diagonalization", "puq", "regular-solutions", 1e-8)
def _(rng):
    table = [E for _, _, E in puq.spectrum_table(SQ2, 10)]
    return float(np.abs(puq.spectrum_oracle(SQ2) - table).max())


@check("ground state Schroedinger residual in xi", "puq", "ground-state", 1e-6)
def _(rng):
    return puq.ground_state_residual(SQ2)


@check("constrained ground state = xi ground state on the surface", "puq", "ground-state-decay", 1e-12)
def _(rng):
    c = core.compute_coefficients(SQ2)
    xR, xI = rng.normal(size=(2, 1000))
    x, piz = puq.constrained_point(xR, xI, c)
    xi1, xi2 = puq.oscillator_coordinates(x, piz, c)
    return float(np.abs(puq.ground_state_xi(xi1.real, xi2.real, SQ2) - puq.ground_state_constrained(xR, xI, SQ2)).max())


@check("kernel coefficients recomputed, Q^2 s1 s2 = 1", "puq", "kernel-coefficients", 1e-12)
def _(rng):
    out = 0.0
    for f in random_frequencies(rng, 100):
        T = float(rng.uniform(0.05, 3.0))
        try:
            kc = puq.kernel_coeffs(T, f)
        except Exception:
            continue
        w1, w2 = f.omega1, f.omega2
        s1, s2, c1, c2 = np.sin(w1 * T), np.sin(w2 * T), np.cos(w1 * T), np.cos(w2 * T)
        alt = {
            "D": (w1 - w2) * (w1 + w2) * s1 * s2,
            "F": w1 * w2 * (w1 * s1 + w2 * s2),
            "G": -(w2 * s1 + w1 * s2),
            "J": w1 * w2 * (w2 * s2 * c1 - w1 * s1 * c2),
            "K": w2 * s1 * c2 - w1 * s2 * c1,
            "M": -w1 * w2 * (w1**3 * s1 + w2**3 * s2),
            "N": w1 * w2 * (w1**3 * s1 * c2 - w2**3 * s2 * c1),
        }
        scale = max(1.0, w1**4 * w2, w1 * w2**4)
        for k, v in alt.items():
            out = max(out, abs(getattr(kc, k) - v) / scale)
        out = max(out, kc.prefactor_residual(f))
    return out


@check("kernel Schroedinger residual, 20 random tuples", "puq", "pu-kernel", 1e-5)
def _(rng):
    out = 0.0
    for _ in range(20):
        args = rng.normal(scale=0.5, size=4) + 1j * rng.normal(scale=0.5, size=4)
        out = max(out, puq.pu_schrodinger_residual(*args, 1.0, SQ2))
    return out


@check("kernel semigroup under the delta measure", "puq", "completeness-measure-pu", 1e-6)
def _(rng):
    out = 0.0
    for f, (T1, T2) in ((SQ2, (0.4, 0.7)), (core.Frequencies(2.0, 1.0), (0.3, 0.5)), (core.Frequencies(1.7, 0.6), (0.9, 0.2))):
        args = rng.normal(scale=0.4, size=4) + 1j * rng.normal(scale=0.4, size=4)
        ref = puq.propagator_pu(*args, T1 + T2, f).value
        out = max(out, abs(puq.compose_pu(*args, T1, T2, f) - ref) / abs(ref))
    return out


@check("Heisenberg closure vs linear-solver oracle", "puq", "heisenberg-closure", 1e-10)
def _(rng):
    out = 0.0
    for _ in range(50):
        T = float(rng.uniform(0.1, 2.0))
        t1 = float(rng.uniform(-3, 3))
        got = puq.heisenberg_closure(T, SQ2).matrix
        out = max(out, np.abs(got - puq.heisenberg_closure_oracle(T, SQ2, t1)).max() / np.abs(got).max())
    return out


@check("change of basis maps the ground state to oscillator Gaussians", "puq", "change-of-basis", 1e-6)
def _(rng):
    out = 0.0
    gs = lambda a, b: puq.ground_state_constrained(a, b, SQ2)  # noqa: E731
    norm = 2 * math.pi * math.sqrt(SQ2.omega1 * SQ2.omega2)
    for P1, P2 in rng.normal(size=(5, 2)):
        ref = math.exp(-(P1**2) / (2 * SQ2.omega1) - P2**2 / (2 * SQ2.omega2)) / norm
        out = max(out, abs(puq.oscillator_transform(gs, P1, P2, SQ2) - ref))
    return out
