"""Command-line entry point.

Exit codes: 0 success, 1 optimization did not reach its threshold,
2 usage or input error.
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import fileio
from .circuit import warm_start
from .errors import NotAntisymmetricError, SkewCircError
from .experiment import CSV_NAME, ExperimentSpec, run_experiment
from .linalg import check_antisym, expm_pade, frobenius_distance
from .matgen import Family, MatrixFamily, random_antisym
from .optimize import (
    LossMode,
    OptConfig,
    antisym_objective,
    loss_antisym,
    minimize,
    seeded_start,
    unitary_objective,
)
from .spectral import build_g, g_spectrum, reconstruct_exp, verify_spectrum

EXIT_OK, EXIT_NOT_CONVERGED, EXIT_USAGE = 0, 1, 2

VERIFY_TOL = {"residual": 1e-10, "unitarity": 1e-12, "qft_relation": 1e-12, "expm_gap": 1e-8}
# rounded printouts of a unitary (e.g. two decimals) are projected to the nearest one
UNITARY_PROJECT_TOL = 0.1


class UsageError(Exception):
    pass


def _err(msg):
    print(f"error: {msg}", file=sys.stderr)


def _qubits_for_dim(n):
    q = int(n).bit_length() - 1
    if n < 2 or 2**q != n or q > 7:
        raise UsageError(f"matrix dimension {n} is not 2^n with 1 <= n <= 7")
    return q


def nearest_unitary(m):
    u, _, vh = np.linalg.svd(m)
    return u @ vh


# ---------------------------------------------------------------------------


def cmd_verify(args):
    if not 1 <= args.n_qubits <= 6:
        raise UsageError("verify supports 1 <= n_qubits <= 6")
    spec = g_spectrum(args.n_qubits, args.shift)
    n = spec.dim
    v, d, f = spec.eigenvector_matrix, spec.phase_matrix, spec.fourier_matrix
    report = {
        "residual": verify_spectrum(spec),
        "unitarity": float(np.linalg.norm(v.conj().T @ v - np.eye(n))),
        "qft_relation": float(np.linalg.norm(v - d @ f)),
        "expm_gap": frobenius_distance(reconstruct_exp(spec), expm_pade(build_g(args.n_qubits, args.shift))),
    }
    print(f"G: N={n}, diagonal shift g={spec.diag_shift:g}")
    print("eigenvalues (column order):")
    for k, lam in enumerate(spec.eigenvalues):
        sign = "+" if lam.imag >= 0 else "-"
        print(f"  k={k}: {lam.real:.12g} {sign} {abs(lam.imag):.12g}i")
    ok = True
    for name, value in report.items():
        passed = value <= VERIFY_TOL[name]
        ok &= passed
        print(f"{name:13s} {value:.3e}  (tol {VERIFY_TOL[name]:.0e})  {'PASS' if passed else 'FAIL'}")
    return EXIT_OK if ok else EXIT_NOT_CONVERGED


def _opt_config(args):
    return OptConfig(
        max_iters=args.max_iter,
        max_restarts=args.restarts,
        success_threshold=args.threshold,
        seed=args.seed,
    )


def cmd_approximate(args):
    path = Path(args.input)
    if args.fidelity and not args.unitary:
        raise UsageError("--fidelity requires --unitary")
    m = fileio.read_matrix(path, complex_=args.unitary)
    n_q = _qubits_for_dim(m.shape[0])
    if args.unitary:
        defect = float(np.linalg.norm(m.conj().T @ m - np.eye(m.shape[0])))
        if defect > UNITARY_PROJECT_TOL:
            raise UsageError(f"input is not unitary (|U^dag U - I|_F = {defect:.3e})")
        if defect > 1e-8:
            print(f"note: projected input onto the nearest unitary (defect was {defect:.3e})")
            m = nearest_unitary(m)
        mode = LossMode.FIDELITY if args.fidelity else LossMode.FROBENIUS
        loss = unitary_objective(m, mode)
        family = f"UNITARY_{mode.name}"
    else:
        m = check_antisym(m)
        loss = antisym_objective(m)
        family = "ANTISYM"

    cfg = _opt_config(args)
    initial = warm_start(n_q) if args.warm_start else seeded_start(n_q, cfg.seed)
    trace = minimize(loss, initial, cfg, run_id=path.stem)

    out_dir = Path(args.out_dir) if args.out_dir else path.parent
    out_dir.mkdir(parents=True, exist_ok=True)
    fileio.write_csv(out_dir / f"{path.stem}_trace.csv", fileio.trace_rows(trace, n_q, family, cfg.seed))
    params_doc = {
        "run_id": trace.run_id,
        "final_loss": trace.final_loss,
        "initial_loss": trace.losses[0],
        "iterations": len(trace.losses) - 1,
        "restarts_used": trace.restarts_used,
        "best_restart": trace.best_restart,
        "converged": trace.converged,
        "params": trace.final_params.to_dict(),
    }
    (out_dir / f"{path.stem}_params.json").write_text(json.dumps(params_doc, indent=2) + "\n", encoding="utf-8")
    print(
        f"initial loss {trace.losses[0]:.6g}  final loss {trace.final_loss:.6g}  "
        f"iterations {len(trace.losses) - 1}  restarts {trace.restarts_used}"
    )
    return EXIT_OK if trace.converged else EXIT_NOT_CONVERGED


def cmd_experiment(args):
    spec = ExperimentSpec(
        n_qubits_list=args.n_qubits,
        family=MatrixFamily(Family(args.family), args.sparsity),
        instances=args.instances,
        base_seed=args.seed,
        opt=_opt_config(args),
        out_dir=Path(args.out_dir),
    )
    traces = run_experiment(spec, jobs=args.jobs)
    hits = sum(t.converged for t in traces.values())
    for rid, t in traces.items():
        print(f"{rid}  initial {t.losses[0]:.6g}  final {t.final_loss:.6g}  restarts {t.restarts_used}")
    print(f"{hits}/{len(traces)} runs reached loss <= {spec.opt.success_threshold:g}; wrote {spec.out_dir / CSV_NAME}")
    return EXIT_OK if hits == len(traces) else EXIT_NOT_CONVERGED


def cmd_gen(args):
    fam = MatrixFamily(Family(args.family), args.sparsity)
    a = random_antisym(args.n_qubits, fam, args.seed)
    comment = f"{fam.tag.value} n_qubits={args.n_qubits} seed={args.seed}"
    fileio.write_matrix(args.out, a, comment=comment)
    return EXIT_OK


def cmd_warmstart(args):
    if not 1 <= args.n_qubits <= 7:
        raise UsageError("n_qubits must lie in [1, 7]")
    p = warm_start(args.n_qubits)
    loss = loss_antisym(p, build_g(args.n_qubits).real)
    doc = {"loss_vs_G": loss, "params": p.to_dict()}
    text = json.dumps(doc, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    print(f"warm-start loss against G (N={2**args.n_qubits}): {loss:.3e}", file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------------------


def _add_opt_flags(p, threshold=0.05):
    p.add_argument("--max-iter", type=int, default=500)
    p.add_argument("--restarts", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threshold", type=float, default=threshold)


def build_parser():
    parser = argparse.ArgumentParser(prog="skewcirc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="check the closed-form spectrum of G against the oracles")
    p.add_argument("-n", "--n-qubits", type=int, required=True)
    p.add_argument("-g", "--shift", type=float, default=0.0, help="diagonal value of G")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("approximate", help="fit the circuit to one matrix file")
    p.add_argument("input")
    _add_opt_flags(p)
    p.add_argument("--unitary", action="store_true", help="input is the unitary e^A (re,im entries)")
    p.add_argument("--fidelity", action="store_true", help="use 1 - |tr(U^dag V)|/N as the loss")
    p.add_argument("--warm-start", action="store_true", help="start from the parameters that reproduce e^G")
    p.add_argument("--out-dir", default=None, help="defaults to the input file's directory")
    p.set_defaults(func=cmd_approximate)

    p = sub.add_parser("experiment", help="loss curves over random matrix families")
    p.add_argument("-n", "--n-qubits", type=int, nargs="+", required=True)
    p.add_argument("--family", choices=[f.value for f in Family], default=Family.UNIFORM_REAL.value)
    p.add_argument("--sparsity", type=float, default=1.0 / 3.0)
    p.add_argument("--instances", type=int, default=30)
    _add_opt_flags(p)
    p.add_argument("--out-dir", default="results")
    p.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("gen", help="write a random antisymmetric matrix file")
    p.add_argument("-n", "--n-qubits", type=int, required=True)
    p.add_argument("--family", choices=[f.value for f in Family], default=Family.UNIFORM_REAL.value)
    p.add_argument("--sparsity", type=float, default=1.0 / 3.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("warmstart", help="print the warm-start parameters for G")
    p.add_argument("-n", "--n-qubits", type=int, required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_warmstart)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except fileio.MatrixParseError as exc:
        _err(f"{args.input if hasattr(args, 'input') else ''}: {exc}")
    except NotAntisymmetricError as exc:
        _err(f"input is not antisymmetric: {exc}")
    except (UsageError, SkewCircError, ValueError) as exc:
        _err(str(exc))
    except OSError as exc:
        _err(f"I/O error: {exc}")
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
