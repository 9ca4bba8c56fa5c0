"""Command-line interface: ``puosc <command> [flags]``.

Exit status is 0 when every check in the report passes, 1 when a check fails
or a kernel is requested at a caustic, and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import __version__
from . import brackets as br
from . import classical as cl
from . import core, cosc, puq, verify
from .errors import Caustic, PUError

FORMATS = {
    "coeffs": ("json",),
    "classical": ("json", "csv"),
    "spectrum": ("json", "csv"),
    "kernel": ("json",),
    "brackets": ("text", "json"),
    "equalfreq": ("json",),
    "verify": ("json", "text"),
}


# variables left after solving the second-class constraints
REDUCED = ["x", "xdd", "p0", "p2"]


class UsageError(Exception):
    """Bad flag value; the message names the flag and its domain."""


def _record(name, anchor, measured, tolerance, comparator="<"):
    c = verify.Check(name, "", anchor, tolerance, comparator, lambda rng: measured)
    return verify.evaluate(c, None).as_dict()


def _cx(z) -> dict:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def _freqs(args) -> core.Frequencies:
    if not args.w2 > 0:
        raise UsageError(f"--w2 must be > 0, got {args.w2}")
    if not args.w1 > args.w2:
        raise UsageError(f"--w1 must be > --w2 > 0, got --w1 {args.w1} --w2 {args.w2}")
    return core.Frequencies(args.w1, args.w2)


# --- commands -------------------------------------------------------------------


def cmd_coeffs(args):
    freqs = _freqs(args)
    c = core.compute_coefficients(freqs, args.sign)
    M = core.build_M(c)
    checks = [
        _record("symplectic residual of M", "symplectic-group", core.symplectic_residual(M), 1e-12),
        _record("|det M - 1|", "unimodular", abs(np.linalg.det(M) - 1), 1e-12),
        _record("|b(c-a) - 1|", "coefficient-identities", abs(c.b * (c.c - c.a) - 1), 1e-12),
        _record("|ac - w1^2 w2^2 b^2|", "coefficient-identities", abs(c.a * c.c - freqs.prod_sq * c.b**2), 1e-12),
    ]
    result = {"a": c.a, "b": c.b, "c": c.c, "sign": c.sign, "M": [[_cx(v) for v in row] for row in M]}
    return result, checks


def _classical_run(args):
    freqs = _freqs(args)
    c = core.compute_coefficients(freqs, args.sign)
    dt = args.dt if args.dt is not None else freqs.t_min / 200
    if not dt > 0:
        raise UsageError(f"--dt must be > 0, got {dt}")
    if args.steps < 1:
        raise UsageError(f"--steps must be >= 1, got {args.steps}")
    rng = np.random.default_rng(args.seed)
    xi0 = core.RealPhasePoint(*rng.uniform(-1, 1, size=4))
    X0 = core.to_complex(xi0, c)
    traj = cl.integrate(X0, freqs, cl.IntegratorConfig(dt, args.steps, "gauss4"))
    return freqs, c, X0, traj


def cmd_classical(args):
    freqs, c, X0, traj = _classical_run(args)
    if args.format == "csv":
        return cl.trajectory_csv(traj, freqs, c), None
    H = cl.hamiltonian_pu(traj.states, freqs)
    exact = cl.general_solution_state(cl.fit_general_solution(X0, freqs), freqs, traj.times)
    checks = [
        _record("H_PU drift", "total-derivative-equivalence", float(np.abs(H - H[0]).max()), 1e-8),
        _record("Lagrangian identity residual", "total-derivative-equivalence", cl.lagrangian_identity_residual(traj, freqs, c), 1e-8),
        _record("xi-projection oscillator residual", "total-derivative-equivalence", cl.oscillator_residual(traj, freqs, c), 1e-6),
        _record("deviation from general solution", "general-solution", float(np.abs(traj.states - exact).max()), 1e-6),
    ]
    result = {
        "dt": traj.config.dt,
        "steps": traj.config.steps,
        "method": traj.config.method,
        "initial_state": [_cx(v) for v in X0.as_array()],
        "final_state": [_cx(v) for v in traj.states[-1]],
        "H_PU": H[0].real,
    }
    return result, checks


def cmd_spectrum(args):
    freqs = _freqs(args)
    if args.levels < 1:
        raise UsageError(f"--levels must be >= 1, got {args.levels}")
    if args.format == "csv":
        return puq.spectrum_csv(freqs, args.levels), None
    table = puq.spectrum_table(freqs, args.levels)
    checks = []
    if args.levels <= 10:
        oracle = puq.spectrum_oracle(freqs, levels=args.levels)
        err = float(np.abs(oracle - [E for _, _, E in table]).max())
        checks.append(_record("levels vs 900-state diagonalization", "regular-solutions", err, 1e-8))
    return {"levels": [{"m": m, "n": n, "E": E} for m, n, E in table]}, checks


def _kernel_cosc(args):
    if not -1 < args.eps < 1:
        raise UsageError(f"--eps must lie in (-1, 1), got {args.eps}")
    rec = cosc.kernel_record(args.q1, args.q2, args.T, args.eps)
    k0 = cosc.propagator_q(args.q2, args.q1, args.T, 0.0).value
    k = complex(rec["re"], rec["im"])
    factor = math.exp(args.eps * (args.q2**2 - args.q1**2) / 2)
    checks = [_record("eps factorization", "green-function-relation", abs(k - factor * k0) / max(abs(k), 1e-300), 1e-12)]
    return rec, checks


def _kernel_pu(args):
    freqs = _freqs(args)
    try:
        pts = [complex(getattr(args, n)) for n in ("x2", "piz2", "x1", "piz1")]
    except ValueError as exc:
        raise UsageError(f"--x1/--piz1/--x2/--piz2 must be complex numbers like 0.3+0.1j: {exc}") from None
    rec = puq.kernel_coeffs_record(args.T, freqs)
    kc = puq.kernel_coeffs(args.T, freqs)
    rec["N_const"] = _cx(puq.normalization_constant(freqs))
    rec["kernel"] = _cx(puq.propagator_pu(*pts, args.T, freqs).value)
    checks = [
        _record("Q^2 sin(w1 T) sin(w2 T) = 1", "kernel-coefficients", kc.prefactor_residual(freqs), 1e-12),
        _record("kernel Schroedinger residual", "pu-kernel", puq.pu_schrodinger_residual(*pts, args.T, freqs), 1e-5),
    ]
    return rec, checks


def cmd_kernel(args):
    if args.T is None:
        raise UsageError("--T is required for kernel")
    return (_kernel_pu if args.model == "pu" else _kernel_cosc)(args)


def _bracket_text(system) -> str:
    lines = ["momenta:"]
    for k, p in enumerate(system.momenta):
        lines.append(f"  p{k} = {p}")
    lines.append(f"hamiltonian: {system.hamiltonian}")
    lines.append("dirac brackets:")
    for (u, v), val in _bracket_dict(system, REDUCED).items():
        lines.append(f"  {{{u},{v}}}* = {val}")
    lines.append("canonical brackets:")
    for (u, v), val in _bracket_dict(system, system.canonical).items():
        lines.append(f"  {{{u},{v}}}* = {val}")
    lines.append(f"reduced hamiltonian: {system.canonical_hamiltonian}")
    return "\n".join(lines) + "\n"


def _bracket_dict(system, names):
    vars_ = names if isinstance(names, dict) else {n: system.space.var(n) for n in names}
    return {k: str(v) for k, v in br.bracket_table(vars_, system.constraints).items()}


def cmd_brackets(args):
    system = br.unequal_extended() if args.system == "unequal" else br.equal_extended()
    if args.format == "text":
        return _bracket_text(system), None
    result = {
        "system": args.system,
        "momenta": [str(p) for p in system.momenta],
        "hamiltonian": str(system.hamiltonian),
        "dirac": {f"{u},{v}": val for (u, v), val in _bracket_dict(system, REDUCED).items()},
        "canonical": {f"{u},{v}": val for (u, v), val in _bracket_dict(system, system.canonical).items()},
        "reduced_hamiltonian": str(system.canonical_hamiltonian),
    }
    checks = [
        _record(
            "reduced Hamiltonian equals the PU form",
            "canonical-set-" + args.system,
            float(system.canonical_hamiltonian != system.target_hamiltonian),
            0.0,
            "==",
        )
    ]
    return result, checks


def cmd_equalfreq(args):
    if not args.w1 > 0:
        raise UsageError(f"--w1 must be > 0, got {args.w1}")
    if args.b == 0:
        raise UsageError("--b must be nonzero")
    es = cl.equal_freq_evolution_defect(args.w1)
    t = cl.equal_freq_transform(args.w1, args.b)
    defect = sum(abs(a - 2) + abs(g - 1) for a, g in zip(es.algebraic_mult, es.geometric_mult))
    checks = [
        _record("companion matrix multiplicities (2, 1)", "not-diagonalizable", float(defect + (len(es.eigenvalues) != 2)), 0.0, "=="),
        _record("forward matrix is not symplectic", "neither-canonical-nor-similarity", t.symplectic_residual(), 0.1, ">"),
        _record("forward * backward = I", "free-parameter", float(np.abs(t.forward @ t.backward - np.eye(4)).max()), 1e-12),
    ]
    result = {
        "omega": args.w1,
        "b": args.b,
        "eigenvalues": [_cx(v) for v in es.eigenvalues],
        "algebraic_mult": list(es.algebraic_mult),
        "geometric_mult": list(es.geometric_mult),
        "invariant_residuals": t.invariant_residuals(),
    }
    return result, checks


def cmd_verify(args):
    if args.parallel < 1:
        raise UsageError(f"--parallel must be >= 1, got {args.parallel}")
    records = verify.run_suite(args.suite, seed=args.seed, parallel=args.parallel)
    checks = [r.as_dict() for r in records]
    if args.format == "text":
        lines = [f"{'PASS' if c['status'] == 'pass' else 'FAIL'}  {c['anchor']:<36} {c['name']}" for c in checks]
        ok = all(c["status"] == "pass" for c in checks)
        lines.append(f"{sum(c['status'] == 'pass' for c in checks)}/{len(checks)} checks passed")
        return "\n".join(lines) + "\n", None if ok else False
    return {"suite": args.suite, "seed": args.seed}, checks


COMMANDS = {
    "coeffs": cmd_coeffs,
    "classical": cmd_classical,
    "spectrum": cmd_spectrum,
    "kernel": cmd_kernel,
    "brackets": cmd_brackets,
    "equalfreq": cmd_equalfreq,
    "verify": cmd_verify,
}


# --- parser ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="puosc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"puosc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--format", default=FORMATS[name][0], choices=FORMATS[name])
        p.add_argument("--out", help="write output here instead of stdout")
        p.add_argument("--seed", type=int, default=7)
        return p

    def freq_flags(p):
        p.add_argument("--w1", type=float, default=math.sqrt(2), help="larger frequency")
        p.add_argument("--w2", type=float, default=1.0, help="smaller frequency, > 0")
        p.add_argument("--sign", type=int, default=1, choices=(1, -1), help="branch of b")

    p = add("coeffs", "coefficients a, b, c and the matrix M")
    freq_flags(p)

    p = add("classical", "integrate the PU equations and check the identities")
    freq_flags(p)
    p.add_argument("--dt", type=float, default=None, help="time step (default T_min/200)")
    p.add_argument("--steps", type=int, default=2000)

    p = add("spectrum", "PU energy levels")
    freq_flags(p)
    p.add_argument("--levels", type=int, default=10)

    p = add("kernel", "coordinate kernels of the complex oscillator or the PU model")
    freq_flags(p)
    p.add_argument("--model", choices=("cosc", "pu"), default="cosc")
    p.add_argument("--T", type=float, default=None, help="elapsed time")
    p.add_argument("--eps", type=float, default=0.0, help="complex-oscillator parameter, |eps| < 1")
    p.add_argument("--q1", type=float, default=0.0)
    p.add_argument("--q2", type=float, default=0.0)
    for n in ("x1", "piz1", "x2", "piz2"):
        p.add_argument(f"--{n}", default="0", help="complex endpoint for --model pu")

    p = add("brackets", "exact Dirac-bracket analysis")
    p.add_argument("--system", choices=("unequal", "equal"), default="unequal")

    p = add("equalfreq", "equal-frequency defectiveness")
    p.add_argument("--w1", type=float, default=1.0, help="common frequency")
    p.add_argument("--b", type=float, default=1.0, help="free parameter of the transformation")

    p = add("verify", "run a verification suite")
    p.add_argument("--suite", choices=("all",) + verify.SUITES, default="all")
    p.add_argument("--parallel", type=int, default=1, help="worker threads")
    return parser


def _echo(args) -> dict:
    params = {k: v for k, v in sorted(vars(args).items()) if k not in ("command", "out", "format")}
    return {"name": args.command, "parameters": params}


def emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
        return
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        payload, checks = COMMANDS[args.command](args)
    except UsageError as exc:
        parser.error(str(exc))
    except Caustic as exc:
        print(f"puosc: error: {exc}", file=sys.stderr)
        return 1
    except PUError as exc:
        print(f"puosc: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1

    if isinstance(payload, str):
        text, ok = payload, checks is not False
    else:
        ok = all(c["status"] == "pass" for c in checks)
        report = {"command": _echo(args), "version": __version__, "result": payload, "checks": checks, "pass": ok}
        text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    try:
        emit(text, args.out)
    except OSError as exc:
        print(f"puosc: error: --out: cannot write {args.out!r}: {exc.strerror}", file=sys.stderr)
        return 2
    return 0 if ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
