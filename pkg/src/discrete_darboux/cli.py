"""
Command-line pipeline driver.

Subcommands
-----------
transform            build the intertwiner + partner operator, write them out
verify               residual report of the defining identities on random probes
susy-check           residual report of the block superalgebra
model-free-particle  oscillator-basis pipeline: transformed coefficients,
                     non-local interaction and missing states as CSV
asymptotics          log-log slope fit of a sequence read from CSV
export               convert a stored sequence between JSON and CSV

Exit status is 0 exactly when every residual stays below the configured
tolerances; failures print a machine-readable JSON reason.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import fileio
from .darboux import build_transform, missing_states, verify_transform
from .models import (
    Step2Operator,
    asymptotic_exponent,
    hermite_seed,
    merge_parity,
    nonlocal_potential,
    oscillator_model,
    restrict_parity,
    split_even_odd,
)
from .operators import JacobiOperator, Seq, solve_recurrence
from .susy import SuperSystem, SuperVec, superalgebra_check


def _fail(reason: str, code: int) -> int:
    print(json.dumps({"error": reason}))
    return code


def _outdir(args) -> Path:
    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _config(args) -> fileio.RunConfig:
    return fileio.RunConfig(
        lam=getattr(args, "lam", -1.0),
        const_a=getattr(args, "const_a", -1.0),
        n_sites=getattr(args, "n", 64),
        probe_count=getattr(args, "probes", 16),
        rng_seed=getattr(args, "rng_seed", 0),
        tol_seed=getattr(args, "tol_seed", 1e-10),
        tol_realness=getattr(args, "tol_real", 1e-10),
        tol_verify=getattr(args, "tol_verify", 1e-9),
    )


def _load_pairs(args, cfg):
    """Yield (tag, operator, seed) for each chain the input defines."""
    op = fileio.load_operator(args.input)
    if isinstance(op, Step2Operator):
        if not cfg.lam < 0:
            raise ValueError("step-2 operators take a Hermite seed; --lambda must be < 0")
        seed2 = hermite_seed(cfg.lam, op.n_sites)
        even, odd = split_even_odd(op)
        yield "even", even, restrict_parity(seed2, "even")
        yield "odd", odd, restrict_parity(seed2, "odd")
    else:
        if args.seed:
            seed = fileio.load_seq(args.seed)
        else:
            raw = solve_recurrence(op, cfg.lam, psi0=1.0)
            seed = Seq(raw.values, raw.energy, "seed", log_scale=raw.log_scale)
        yield "", op, seed


def _build_all(args, cfg):
    chains = []
    for tag, op, seed in _load_pairs(args, cfg):
        L, h1 = build_transform(
            op,
            seed,
            const_a=cfg.const_a,
            seed_tol=cfg.tol_seed,
            realness_tol=cfg.tol_realness,
        )
        chains.append((tag, op, seed, L, h1))
    return chains


def _darboux_dict(L) -> dict:
    return {
        "schema_version": fileio.SCHEMA_VERSION,
        "const_a": L.const_a,
        "lambda": L.lam,
        "q_tilde_crosscheck": L.q_crosscheck,
        "A_re": [float(x) for x in L.A.real],
        "A_im": [float(x) for x in L.A.imag],
        "B_re": [float(x) for x in L.B.real],
        "B_im": [float(x) for x in L.B.imag],
        "branch": [int(b) for b in L.branch],
    }


def _cmd_transform(args) -> int:
    cfg = _config(args)
    out = _outdir(args)
    chains = _build_all(args, cfg)
    crosscheck = 0.0
    for tag, _op, _seed, L, h1 in chains:
        suffix = f"_{tag}" if tag else ""
        fileio.save_operator(out / f"transformed_operator{suffix}.json", h1)
        Path(out / f"darboux{suffix}.json").write_text(
            json.dumps(_darboux_dict(L), indent=1) + "\n"
        )
        crosscheck = max(crosscheck, L.q_crosscheck)
    if len(chains) == 2:
        merged = merge_parity(chains[0][4], chains[1][4])
        fileio.save_operator(out / "transformed_operator.json", merged)
    report = {
        "q_tilde_crosscheck": crosscheck,
        "boundary_rows_excluded": [chains[0][1].n_sites - 2, chains[0][1].n_sites - 1],
    }
    fileio.save_report(out / "report.json", report)
    print(json.dumps(report))
    return 0


def _random_probes(n_probes: int, n: int, rng_seed: int) -> np.ndarray:
    rng = np.random.default_rng(rng_seed)
    return rng.normal(size=(n_probes, n)) + 1j * rng.normal(size=(n_probes, n))


def _cmd_verify(args) -> int:
    cfg = _config(args)
    out = _outdir(args)
    report = {"r_int": 0.0, "r_fac0": 0.0, "r_fac1": 0.0, "q_tilde_crosscheck": 0.0}
    for tag, op, _seed, L, h1 in _build_all(args, cfg):
        probes = _random_probes(cfg.probe_count, op.n_sites, cfg.rng_seed)
        rep = verify_transform(op, h1, L, probes)
        report["r_int"] = max(report["r_int"], rep.r_int)
        report["r_fac0"] = max(report["r_fac0"], rep.r_fac0)
        report["r_fac1"] = max(report["r_fac1"], rep.r_fac1)
        report["q_tilde_crosscheck"] = max(report["q_tilde_crosscheck"], L.q_crosscheck)
        report["boundary_rows_excluded"] = list(rep.boundary_rows_excluded)
    fileio.save_report(out / "report.json", report)
    print(json.dumps(report))
    worst = max(report["r_int"], report["r_fac0"], report["r_fac1"])
    if worst > cfg.tol_verify:
        return _fail(f"residual {worst:.3e} above tolerance {cfg.tol_verify:.1e}", 1)
    return 0


def _cmd_susy_check(args) -> int:
    cfg = _config(args)
    out = _outdir(args)
    report = {"r_nilp": 0.0, "r_comm": 0.0, "r_anti": 0.0}
    for tag, op, _seed, L, h1 in _build_all(args, cfg):
        system = SuperSystem(op, h1, L, L.lam)
        raw = _random_probes(2 * cfg.probe_count, op.n_sites, cfg.rng_seed)
        probes = [
            SuperVec(Seq(raw[2 * i], L.lam), Seq(raw[2 * i + 1], L.lam))
            for i in range(cfg.probe_count)
        ]
        rep = superalgebra_check(system, probes)
        report["r_nilp"] = max(report["r_nilp"], rep.r_nilp)
        report["r_comm"] = max(report["r_comm"], rep.r_comm)
        report["r_anti"] = max(report["r_anti"], rep.r_anti)
        report["boundary_rows_excluded"] = list(rep.boundary_rows_excluded)
    fileio.save_report(out / "report.json", report)
    print(json.dumps(report))
    worst = max(report["r_nilp"], report["r_comm"], report["r_anti"])
    if worst > cfg.tol_verify:
        return _fail(f"residual {worst:.3e} above tolerance {cfg.tol_verify:.1e}", 1)
    return 0


def _cmd_model_free_particle(args) -> int:
    cfg = _config(args)
    out = _outdir(args)
    if not cfg.lam < 0:
        raise ValueError("--lambda must be < 0 for the oscillator-basis model")
    N2 = cfg.n_sites
    op2 = oscillator_model(N2)
    seed2 = hermite_seed(cfg.lam, N2)
    even, odd = split_even_odd(op2)
    chains = {}
    crosscheck = 0.0
    for tag, op, parity in (("even", even, "even"), ("odd", odd, "odd")):
        seed = restrict_parity(seed2, parity)
        L, h1 = build_transform(
            op, seed, const_a=cfg.const_a, seed_tol=cfg.tol_seed, realness_tol=cfg.tol_realness
        )
        pair = missing_states(
            op, L, eta_hat0_over_eta0=args.eta_hat0, w0=args.w0, transformed=h1
        )
        chains[tag] = (op, L, h1, pair)
        crosscheck = max(crosscheck, L.q_crosscheck)

    h1_merged = merge_parity(chains["even"][2], chains["odd"][2])
    V = nonlocal_potential(chains["even"][2], chains["odd"][2], cfg.lam)
    fileio.write_csv(out / "a_tilde.csv", h1_merged.a2)
    fileio.write_csv(out / "q_tilde.csv", h1_merged.q2)
    fileio.write_csv(out / "d.csv", V.d)
    fileio.write_csv(out / "r.csv", V.r)
    residual = 0.0
    for tag in ("even", "odd"):
        pair = chains[tag][3]
        fileio.write_csv(out / f"eta_{tag}.csv", pair.eta.materialize().values)
        fileio.write_csv(out / f"eta_hat_{tag}.csv", pair.eta_hat.materialize().values)
        residual = max(residual, pair.residual_eta, pair.residual_eta_hat)
    report = {
        "lambda": cfg.lam,
        "n_sites": N2,
        "q_tilde_crosscheck": crosscheck,
        "missing_state_residual": residual,
        "valid_upto": V.valid_upto,
    }
    fileio.save_report(out / "report.json", report)
    print(json.dumps(report))
    if max(crosscheck, residual) > cfg.tol_verify:
        return _fail("model residuals above tolerance", 1)
    return 0


def _cmd_asymptotics(args) -> int:
    out = _outdir(args)
    values = fileio.read_csv(args.input)
    seq = Seq(values, 0.0)
    fit = asymptotic_exponent(seq, args.n_min, args.n_max)
    report = {
        "slope": fit.slope,
        "intercept": fit.intercept,
        "fit_residual": fit.fit_residual,
        "n_min": fit.n_min,
        "n_max": fit.n_max,
    }
    fileio.save_report(out / "report.json", report)
    print(json.dumps(report))
    if args.expect_slope is not None and abs(fit.slope - args.expect_slope) > args.slope_tol:
        return _fail(
            f"slope {fit.slope:.4f} outside {args.expect_slope} +- {args.slope_tol}", 1
        )
    return 0


def _cmd_export(args) -> int:
    src = Path(args.input)
    if src.suffix == ".json":
        seq = fileio.load_seq(src)
    else:
        seq = Seq(fileio.read_csv(src), 0.0)
    if args.format == "csv":
        fileio.write_csv(args.output, seq.materialize().values)
    else:
        fileio.save_seq(args.output, seq)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="discrete-darboux",
        description="Darboux transforms of Jacobi operators on the semi-infinite lattice",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output-dir", default=".", help="directory for result files")
    common.add_argument("--lambda", dest="lam", type=float, default=-1.0,
                        help="factorization energy")
    common.add_argument("--const-a", dest="const_a", type=float, default=-1.0,
                        help="factorization constant (negative real)")
    common.add_argument("--tol-seed", dest="tol_seed", type=float, default=1e-10)
    common.add_argument("--tol-real", dest="tol_real", type=float, default=1e-10)
    common.add_argument("--tol-verify", dest="tol_verify", type=float, default=1e-9)

    inputs = argparse.ArgumentParser(add_help=False)
    inputs.add_argument("--input", required=True, help="operator JSON file")
    inputs.add_argument("--seed", default=None, help="seed sequence JSON file")

    probing = argparse.ArgumentParser(add_help=False)
    probing.add_argument("--probes", type=int, default=16)
    probing.add_argument("--rng-seed", dest="rng_seed", type=int, default=0)

    p = sub.add_parser("transform", parents=[common, inputs],
                       help="construct the intertwiner and partner operator")
    p.set_defaults(func=_cmd_transform)

    p = sub.add_parser("verify", parents=[common, inputs, probing],
                       help="check intertwining and factorization residuals")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("susy-check", parents=[common, inputs, probing],
                       help="check the block superalgebra residuals")
    p.set_defaults(func=_cmd_susy_check)

    p = sub.add_parser("model-free-particle", parents=[common],
                       help="oscillator-basis pipeline: coefficients and missing states")
    p.add_argument("--n", type=int, default=64, help="step-2 lattice size")
    p.add_argument("--w0", type=float, default=1.0)
    p.add_argument("--eta-hat0", dest="eta_hat0", type=float, default=1.0,
                   help="free constant eta_hat_0 / eta_0")
    p.set_defaults(func=_cmd_model_free_particle)

    p = sub.add_parser("asymptotics", parents=[common],
                       help="log-log slope of a sequence read from CSV")
    p.add_argument("--input", required=True, help="sequence CSV (n,re,im)")
    p.add_argument("--n-min", dest="n_min", type=int, required=True)
    p.add_argument("--n-max", dest="n_max", type=int, required=True)
    p.add_argument("--expect-slope", dest="expect_slope", type=float, default=None)
    p.add_argument("--slope-tol", dest="slope_tol", type=float, default=0.05)
    p.set_defaults(func=_cmd_asymptotics)

    p = sub.add_parser("export", help="convert a stored sequence between JSON and CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--format", choices=("json", "csv"), default="csv")
    p.set_defaults(func=_cmd_export)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OverflowError, OSError, KeyError) as exc:
        return _fail(str(exc), 2)


if __name__ == "__main__":
    sys.exit(main())
