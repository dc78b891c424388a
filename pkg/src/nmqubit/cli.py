"""Command-line driver.

Subcommands::

    nmqubit run CONFIG            results.csv, manifest.json [, plot.gp]
    nmqubit oracle-compare CONFIG compare.csv, compare.json
    nmqubit dump-kernel CONFIG    kernel.csv
    nmqubit convergence CONFIG    convergence.json

Exit codes: 0 success, 1 config error, 2 numerical instability, 3 oracle
deviation above tolerance.  The output directory is ``--out``, else the
config's ``output`` key, else ``$NMQUBIT_OUT``, else ``./nmqubit-out``.
"""

import argparse
import csv
import dataclasses
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .config import load_config
from .estimator import MasterEquationSimulator
from .exceptions import ConfigError, NonFiniteStateError
from .kernels import kernel_for
from .oracle import InitialQubit, OracleConfig, compare, exact_evolve
from .volterra import assemble_single_qubit, convergence_order

log = logging.getLogger("nmqubit")

OUT_ENV = "NMQUBIT_OUT"
DEFAULT_OUT = "nmqubit-out"

RESULT_COLUMNS = (
    "sweep_value", "t",
    "s_tr_re", "s_tr_im", "s_pm_re", "s_pm_im", "s_mp_re", "s_mp_im", "s_z_re", "s_z_im",
    "trace", "p_up", "p_down", "abs_s_pm", "abs_s_mp", "entropy", "entropy_raw",
)
KERNEL_COLUMNS = ("n", "t", "k_r_re", "k_r_im", "k_a_re", "k_a_im", "k_k_re", "k_k_im")

EXIT_OK, EXIT_CONFIG, EXIT_UNSTABLE, EXIT_TOLERANCE = 0, 1, 2, 3

# initial 4-vectors matching the oracle's initial qubit states
ORACLE_INITIAL = {
    InitialQubit.UP: (1, 0, 0, 1),
    InitialQubit.DOWN: (1, 0, 0, -1),
    InitialQubit.PLUS: (1, 0.5, 0.5, 0),
}


def _fmt(x):
    return repr(float(x))


def _kernel_kind(config):
    return None if config.bath_kind == "rtn" else config.bath_kind


def simulator_for(config, value=None, assembly=None):
    return MasterEquationSimulator(
        bath=config.bath_at(value), g=config.physical.g, delta=config.physical.delta,
        dt=config.dt, t_max=config.t_max, assembly=assembly or config.assembly,
        kernel_kind=_kernel_kind(config))


def sweep_trajectories(config, threads=1, assembly=None):
    """One trajectory per sweep value, in ascending sweep order."""
    values = config.sweep_values()

    def one(value):
        return simulator_for(config, value, assembly).fit().simulate(config.initial_state)

    if threads > 1 and len(values) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            trajs = list(pool.map(one, values))
    else:
        trajs = [one(v) for v in values]
    return list(zip(values, trajs))


def result_rows(value, traj):
    obs = traj.observables
    sv = "" if value is None else _fmt(value)
    for n, t in enumerate(traj.times):
        s = traj.states[n]
        yield [sv, _fmt(t),
               *(_fmt(part) for z in s for part in (z.real, z.imag)),
               _fmt(obs.trace[n]), _fmt(obs.p_up[n]), _fmt(obs.p_down[n]),
               _fmt(obs.coherence_pm[n]), _fmt(obs.coherence_mp[n]),
               _fmt(obs.entropy[n]), _fmt(obs.entropy_raw[n])]


def write_results(path, results):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(RESULT_COLUMNS)
        for value, traj in results:
            w.writerows(result_rows(value, traj))


def write_manifest(path, config):
    payload = {"nmqubit_version": __version__, "config": config.to_dict()}
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def write_plot_script(path, config):
    col = {name: i + 1 for i, name in enumerate(RESULT_COLUMNS)}
    lines = ["# gnuplot script reading results.csv",
             "set datafile separator ','",
             "set key autotitle columnhead",
             "set xlabel 't'"]
    if config.sweep is None:
        lines += ["set multiplot layout 2,1",
                  f"plot 'results.csv' using {col['t']}:{col['trace']} with lines, \\",
                  f"     '' using {col['t']}:{col['s_z_re']} with lines",
                  f"plot 'results.csv' using {col['t']}:{col['entropy']} with lines",
                  "unset multiplot"]
    else:
        lines += [f"set ylabel '{config.sweep.parameter}'",
                  "set hidden3d",
                  f"splot 'results.csv' using {col['t']}:{col['sweep_value']}:{col['trace']} "
                  "with lines title 'trace'",
                  "pause -1",
                  f"splot 'results.csv' using {col['t']}:{col['sweep_value']}:{col['entropy']} "
                  "with lines title 'entropy'"]
    Path(path).write_text("\n".join(lines) + "\n")


def resolve_out(args_out, config):
    out = args_out or config.output or os.environ.get(OUT_ENV) or DEFAULT_OUT
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def run(config, out, threads=1, assembly=None, plot=False):
    """Simulate every sweep point and write results.csv and manifest.json."""
    if assembly is not None:
        config = dataclasses.replace(config, assembly=assembly)
    results = sweep_trajectories(config, threads)
    write_results(out / "results.csv", results)
    write_manifest(out / "manifest.json", config)
    if plot:
        write_plot_script(out / "plot.gp", config)
    return results


def dump_kernel(config, out):
    n_steps = int(round(config.t_max / config.dt))
    table = kernel_for(config.bath, config.dt, n_steps, _kernel_kind(config))
    with open(out / "kernel.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(KERNEL_COLUMNS)
        for n, t in enumerate(table.times):
            w.writerow([n, _fmt(t),
                        *(_fmt(part) for z in (table.k_r[n], table.k_a[n], table.k_k[n])
                          for part in (z.real, z.imag))])
    return table


def oracle_config_for(config):
    if config.bath_kind != "band":
        raise ConfigError("oracle-compare needs a single-band bath (bath.kind: band)")
    b = config.bath
    oc = OracleConfig(n_sites=b.n_sites, coupling=float(np.sqrt(config.physical.g)),
                      delta=config.physical.delta, mu=b.mu, temperature=b.temperature,
                      statistics=b.statistics, initial_qubit=config.oracle.initial_qubit)
    oc.check_regime()
    if b.site_separation != 0:
        raise ConfigError("oracle-compare needs the on-site kernel (site_separation: 0)")
    return oc


def oracle_compare(config, out, assembly=None):
    """Exact vs master-equation populations; returns the report."""
    oc = oracle_config_for(config)
    sim = simulator_for(config, assembly=assembly).fit()
    master = sim.simulate(ORACLE_INITIAL[oc.initial_qubit])
    exact = exact_evolve(oc, master.times)
    report = compare(exact, master, tolerance=config.oracle.tolerance)
    with open(out / "compare.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(("t", "oracle_p_up", "master_p_up", "abs_dev_p_up", "rel_dev_p_up",
                    "oracle_coherence", "master_coherence"))
        for n, t in enumerate(report.times):
            o, m = report.oracle_p_up[n], report.master_p_up[n]
            rel = abs(o - m) / abs(o) if o != 0 else float("inf")
            w.writerow([_fmt(t), _fmt(o), _fmt(m), _fmt(abs(o - m)), _fmt(rel),
                        _fmt(report.oracle_coherence[n]), _fmt(report.master_coherence[n])])
    summary = {"max_abs": report.max_abs, "rms": report.rms,
               "max_rel_p_up": report.max_rel_p_up, "tolerance": report.tolerance,
               "passed": report.passed}
    Path(out / "compare.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return report


def convergence(config, out, assembly=None):
    if assembly is not None:
        config = dataclasses.replace(config, assembly=assembly)
    sim = simulator_for(config, config.sweep_values()[0])

    def make_system(dt):
        s = sim.set_params(dt=dt).fit()
        return assemble_single_qubit(s.params_, s.kernel_, s.assembly)

    order = convergence_order(make_system, config.initial_state, config.t_max, config.dt)
    payload = {"order": order, "dt": config.dt, "t_max": config.t_max}
    Path(out / "convergence.json").write_text(json.dumps(payload, indent=2) + "\n")
    return order


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("config", help="YAML or JSON run configuration")
    common.add_argument("--out", help=f"output directory (default: ${OUT_ENV} or ./{DEFAULT_OUT})")
    common.add_argument("--threads", type=int, default=1, help="workers for sweeps")
    common.add_argument("--assembly", choices=("spin_diagonal", "sojourn_blip_2x2"),
                        help="override the config's kernel assembly")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="nmqubit", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("run", parents=[common], help="simulate and write results.csv")
    p.add_argument("--plot", action="store_true", help="also write a gnuplot script")
    sub.add_parser("oracle-compare", parents=[common],
                   help="compare against exact diagonalization")
    sub.add_parser("dump-kernel", parents=[common], help="write the memory kernel table")
    sub.add_parser("convergence", parents=[common], help="measure the integrator order")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        config = load_config(args.config)
        out = resolve_out(args.out, config)
        if args.command == "run":
            run(config, out, args.threads, args.assembly, args.plot)
            print(f"wrote {out / 'results.csv'}")
        elif args.command == "dump-kernel":
            dump_kernel(config, out)
            print(f"wrote {out / 'kernel.csv'}")
        elif args.command == "convergence":
            order = convergence(config, out, args.assembly)
            print(f"observed order {order:.4f}")
        else:
            report = oracle_compare(config, out, args.assembly)
            verdict = "within" if report.passed else "outside"
            print(f"max relative p_up deviation {report.max_rel_p_up:.4g} "
                  f"({verdict} tolerance {report.tolerance:g})")
            if not report.passed:
                return EXIT_TOLERANCE
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NonFiniteStateError as exc:
        print(f"numerical instability: {exc}", file=sys.stderr)
        return EXIT_UNSTABLE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
