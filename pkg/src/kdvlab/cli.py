"""Command-line interface: solve, sample, distance, experiment, inspect.

Failures print a machine-readable JSON object to stderr and exit with a
documented code: 2 usage error, 3 malformed config, 4 I/O failure,
5 numerical failure (divergence, degenerate ensemble, non-convergence).
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys

import numpy as np

from .experiments import (
    EXPERIMENTS,
    ConfigError,
    load_config,
    run_and_write,
)
from .flow import FlowDivergenceError, SolverConfig, conserved_report, trajectory
from .kdve_io import KdveFormatError, read_ensemble, write_ensemble
from .measures import (
    DegenerateEnsembleError,
    GaussianSpec,
    GibbsSpec,
    InsufficientDataError,
    sample_gaussian,
    sample_gibbs,
)
from .spectral import cosine_mode, linf_norm, sine_mode, zero_field
from .transport import (
    SinkhornConvergenceError,
    combined_metric_parts,
    cost_matrix,
    wasserstein_p_exact,
    write_distance_json,
    write_plan_csv,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_IO = 4
EXIT_NUMERIC = 5

_EPILOG = """exit codes:
  0  success
  2  usage error (unknown subcommand or flag, bad argument syntax)
  3  malformed or inconsistent configuration
  4  I/O failure (missing file, bad ensemble format, unwritable output)
  5  numerical failure (solver divergence, degenerate ensemble,
     transport non-convergence, invalid data for a fit)

initial data strings are sums of scaled basis modes, e.g.
  "c1", "0.5*c2", "c1+0.5*c2-0.25*s3"
"""


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _fail(kind: str, message: str, code: int) -> int:
    json.dump({"error": kind, "message": message}, sys.stderr)
    sys.stderr.write("\n")
    return code


_TERM = re.compile(r"([+-]?)(?:([0-9]*\.?[0-9]+(?:[eE][+-]?[0-9]+)?)\*)?([cs])([0-9]+)")


def parse_init(text: str):
    """Parse sums like ``c1 + 0.5*c2 - 0.25*s3`` into a field."""
    compact = text.replace(" ", "")
    out = zero_field(1)
    pos = 0
    if not compact:
        raise ValueError("empty initial data string")
    while pos < len(compact):
        m = _TERM.match(compact, pos)
        if not m:
            raise ValueError(f"cannot parse initial data near {compact[pos:]!r}")
        sign, coeff_s, kind, idx = m.groups()
        coeff = float(coeff_s) if coeff_s else 1.0
        if sign == "-":
            coeff = -coeff
        mode = int(idx)
        if mode < 1:
            raise ValueError("mode indices start at 1")
        basis = cosine_mode(mode) if kind == "c" else sine_mode(mode)
        out = out + coeff * basis
        pos = m.end()
    return out


def _cmd_solve(args) -> int:
    u0 = parse_init(args.init)
    cfg = SolverConfig(n_modes=args.modes, dt=args.dt, dealias=not args.no_dealias)
    times = np.linspace(args.t / args.samples, args.t, args.samples)
    traj = trajectory(u0, times, cfg)
    drift = conserved_report(traj)
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, "trajectory.csv")
    with open(path, "w") as fh:
        fh.write("t,l2_norm,hamiltonian,linf_norm,mean\n")
        for i, t in enumerate(traj.times):
            fh.write(
                f"{t!r},{traj.l2_norms[i]!r},{traj.hamiltonians[i]!r},"
                f"{linf_norm(traj.states[i])!r},{traj.means[i]!r}\n"
            )
    report = {
        "l2_rel_drift": drift.l2_rel_drift,
        "hamiltonian_rel_drift": drift.hamiltonian_rel_drift,
        "mean_abs_drift": drift.mean_abs_drift,
        "t_final": args.t,
        "modes": args.modes,
        "dt": args.dt,
    }
    with open(os.path.join(args.out, "conserved_report.json"), "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(json.dumps(report, sort_keys=True))
    return EXIT_OK


def _cmd_sample(args) -> int:
    gauss = GaussianSpec(n_modes=args.modes, seed=args.seed)
    if args.measure == "gaussian":
        ens = sample_gaussian(gauss, args.n, args.s, args.p)
        kappa = None
    else:
        spec = GibbsSpec(
            base=gauss,
            cubic_coefficient=args.coeff,
            cutoff_radius=args.cutoff,
            projection=args.projection,
        )
        ens, kappa = sample_gibbs(spec, args.n, args.s, args.p, resample=args.resample)
    write_ensemble(args.out, ens)
    print(
        json.dumps(
            {
                "file": args.out,
                "n": ens.n,
                "modes": ens.n_modes,
                "kappa": kappa,
                "effective_sample_size": ens.effective_sample_size(),
            },
            sort_keys=True,
        )
    )
    return EXIT_OK


def _cmd_distance(args) -> int:
    a = read_ensemble(args.a, args.s, args.p)
    b = read_ensemble(args.b, args.s, args.p)
    parts = combined_metric_parts(a, b, args.s, args.p, args.backend, args.epsilon)
    _, plan = wasserstein_p_exact(a, b, args.s, args.p)
    print(json.dumps({"distance": parts.total, "w_inf": parts.w_inf, "w_p": parts.w_p,
                      "backend": parts.backend}, sort_keys=True))
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        write_distance_json(os.path.join(args.out, "distance.json"), parts, plan)
        write_plan_csv(
            os.path.join(args.out, "plan.csv"), plan, cost_matrix(a, b, args.s, args.p)
        )
    return EXIT_OK


def _cmd_experiment(args) -> int:
    overrides = {}
    if args.name:
        overrides["experiment"] = args.name
    if args.seed is not None:
        overrides["seed"] = args.seed
    threads = args.threads
    if threads is None:
        env = os.environ.get("KDV_TRANSPORT_THREADS")
        threads = int(env) if env else None
    if threads is not None:
        overrides["threads"] = threads
    if args.format:
        overrides["format"] = args.format
    cfg = load_config(args.config, **overrides)
    report = run_and_write(cfg, out_dir=args.out)
    print(json.dumps({"experiment": report.name, "summary": report.summary}, sort_keys=True))
    return EXIT_OK


def _cmd_inspect(args) -> int:
    ens = read_ensemble(args.file)
    info = {
        "file": args.file,
        "n": ens.n,
        "modes": ens.n_modes,
        "resampled": ens.provenance.get("resampled", False),
        "effective_sample_size": ens.effective_sample_size(),
        "mean_l2_sq": float(np.sum(ens.weights * ens.l2_norms() ** 2)),
        "mean_hs_sq_s0.25": float(np.sum(ens.weights * ens.hs_norms(0.25) ** 2)),
    }
    print(json.dumps(info, sort_keys=True))
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(
        prog="kdvlab",
        description="KdV flow, random ensembles and transport distances on the torus",
        epilog=_EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="integrate one initial state, write trajectory")
    p_solve.add_argument("--modes", type=int, default=64)
    p_solve.add_argument("--dt", type=float, default=None)
    p_solve.add_argument("--t", type=float, required=True)
    p_solve.add_argument("--init", type=str, required=True)
    p_solve.add_argument("--samples", type=int, default=20)
    p_solve.add_argument("--no-dealias", action="store_true")
    p_solve.add_argument("--out", type=str, default="runs/solve")

    p_sample = sub.add_parser("sample", help="draw an ensemble, write a .kdve file")
    p_sample.add_argument("--measure", choices=["gaussian", "gibbs"], default="gaussian")
    p_sample.add_argument("--modes", type=int, default=16)
    p_sample.add_argument("--n", type=int, required=True)
    p_sample.add_argument("--seed", type=int, default=0)
    p_sample.add_argument("--s", type=float, default=0.25)
    p_sample.add_argument("--p", type=float, default=2.0)
    p_sample.add_argument("--cutoff", type=float, default=1.0)
    p_sample.add_argument("--coeff", type=float, default=1.0 / 6.0)
    p_sample.add_argument("--projection", type=int, default=None)
    p_sample.add_argument("--resample", action="store_true")
    p_sample.add_argument("--out", type=str, required=True)

    p_dist = sub.add_parser("distance", help="combined metric between two ensembles")
    p_dist.add_argument("--a", type=str, required=True)
    p_dist.add_argument("--b", type=str, required=True)
    p_dist.add_argument("--s", type=float, default=0.25)
    p_dist.add_argument("--p", type=float, default=2.0)
    p_dist.add_argument("--backend", choices=["exact", "entropic"], default="exact")
    p_dist.add_argument("--epsilon", type=float, default=None)
    p_dist.add_argument("--out", type=str, default=None)

    p_exp = sub.add_parser("experiment", help="run a configured experiment")
    p_exp.add_argument("name", nargs="?", choices=list(EXPERIMENTS), default=None)
    p_exp.add_argument("--config", type=str, required=True)
    p_exp.add_argument("--out", type=str, default=None)
    p_exp.add_argument("--seed", type=int, default=None)
    p_exp.add_argument("--threads", type=int, default=None)
    p_exp.add_argument("--format", choices=["csv", "json"], default=None)

    p_ins = sub.add_parser("inspect", help="summarise a .kdve ensemble file")
    p_ins.add_argument("--file", type=str, required=True)

    return parser


_HANDLERS = {
    "solve": _cmd_solve,
    "sample": _cmd_sample,
    "distance": _cmd_distance,
    "experiment": _cmd_experiment,
    "inspect": _cmd_inspect,
}


def cli_entry(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        return _fail("usage", str(exc), EXIT_USAGE)
    try:
        return _HANDLERS[args.command](args)
    except ConfigError as exc:
        return _fail("config", str(exc), EXIT_CONFIG)
    except (OSError, KdveFormatError) as exc:
        return _fail("io", str(exc), EXIT_IO)
    except (
        FlowDivergenceError,
        DegenerateEnsembleError,
        SinkhornConvergenceError,
        InsufficientDataError,
        ValueError,
    ) as exc:
        return _fail("numeric", str(exc), EXIT_NUMERIC)


def main() -> None:
    # SystemExit(2) from argparse --help paths is left untouched
    try:
        code = cli_entry(sys.argv[1:])
    except SystemExit:
        raise
    sys.exit(code)
