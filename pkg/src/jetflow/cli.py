"""Command-line front end.

Five subcommands::

    jetflow verify    [--out FILE] [--inject-fault I,J,K,VALUE]
    jetflow simulate  --config FILE [--out FILE] [--step H] [--t-final T]
                      [--freeze-metadata] [--plot]
    jetflow section   --config FILE ...
    jetflow lyapunov  --config FILE ...
    jetflow shoot     --config FILE ...

Every experiment subcommand writes one delimiter-separated text file:
a ``#``-prefixed metadata block (tool version, optional timestamp, the
full configuration echoed as ``# cfg.<key> = <TOML literal>`` lines), a
header row naming the columns, then one record per sample, crossing, or
iteration.  Identical configs produce byte-identical files when
``--freeze-metadata`` suppresses the timestamp line; the echoed config
lines re-parse to an equal ExperimentConfig.

Exit status: 0 success, 1 check/convergence failure, 2 configuration
error, 3 runtime escape (file is still written, ending with an explicit
``# truncated`` marker record).

Multi-seed section sweeps are independent work units merged in seed
order by the single writer, which is what makes the files
order-deterministic.  ``--plot`` additionally renders a PNG figure next
to the output file; the data file never depends on it.
"""

from __future__ import annotations

import argparse
import datetime
import sys

import numpy as np

from . import __version__, analysis, carnot, hamiltonian, integrators, \
    reduction, verify
from .config import ConfigError, flat_items, load_config, with_overrides
from .integrators import FlowEscapeError, IntegratorConfig
from .shooting import ShootingProblem, shoot

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_ESCAPE = 3

_FULL_COLUMNS = ("t", "x", "y",
                 "theta_20", "theta_11", "theta_02",
                 "theta_10", "theta_01", "theta_00",
                 "p_x", "p_y",
                 "p_20", "p_11", "p_02", "p_10", "p_01", "p_00",
                 "energy")
_REDUCED_COLUMNS = ("t", "x", "y", "p_x", "p_y", "energy")


def _metadata_lines(cfg, command, freeze):
    lines = [f"# jetflow {__version__} {command}"]
    if not freeze:
        stamp = datetime.datetime.now(datetime.timezone.utc).isoformat()
        lines.append(f"# generated = {stamp}")
    lines.append("# units: dimensionless (unit-speed normalization)")
    for key, literal in flat_items(cfg):
        lines.append(f"# cfg.{key} = {literal}")
    return lines


def _format_row(values, delimiter):
    return delimiter.join(repr(float(v)) for v in values)


def _write_table(path, meta, columns, rows, delimiter, trailer=None):
    lines = list(meta)
    lines.append(delimiter.join(columns))
    lines.extend(_format_row(row, delimiter) for row in rows)
    if trailer:
        lines.append(trailer)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def _maybe_plot(args, kind, path, **data):
    if getattr(args, "plot", False):
        from . import plotting
        plotting.render(kind, path, **data)


def _load(args):
    cfg = load_config(args.config)
    return with_overrides(cfg, step=args.step, t_final=args.t_final,
                          out=args.out)


def cmd_verify(args):
    """Run the structure/consistency suites; exit 0 only if all pass."""
    structure = None
    if args.inject_fault is not None:
        try:
            i, j, k, value = args.inject_fault.split(",")
            vec = float(value) * carnot.basis_vector(int(k))
            structure = carnot.StructureConstants.canonical().replace_entry(
                int(i), int(j), vec)
        except (ValueError, IndexError):
            print("error: --inject-fault expects I,J,K,VALUE", file=sys.stderr)
            return EXIT_CONFIG
    results = verify.run_structure_suite(structure=structure)
    report = verify.format_report(results)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(report)
    sys.stdout.write(report)
    ok = all(r.passed for r in results)
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def _initial_reduced(cfg):
    if cfg.initial_reduced is not None:
        return np.array(cfg.initial_reduced)
    raise ConfigError("initial.reduced", "this subcommand needs a reduced "
                      "4-vector initial condition")


def cmd_simulate(args):
    """Integrate one trajectory and write t/state/energy samples."""
    cfg = _load(args)
    mu = np.array(cfg.mu)
    meta = _metadata_lines(cfg, "simulate", args.freeze_metadata)
    full = cfg.initial_full is not None
    columns = _FULL_COLUMNS if full else _REDUCED_COLUMNS
    trailer = None
    try:
        if full:
            traj = integrators.integrate_full(
                np.array(cfg.initial_full), cfg.integrator)
        else:
            traj = integrators.integrate_reduced(
                mu, np.array(cfg.initial_reduced), cfg.integrator)
    except FlowEscapeError as err:
        times, states = err.partial_times, err.partial_states
        if full:
            energies = np.array([hamiltonian.energy(s) for s in states])
        else:
            energies = np.array([reduction.h_mu(mu, s) for s in states])
        rows = [np.concatenate(([t], s, [e]))
                for t, s, e in zip(times, states, energies)]
        trailer = f"# truncated: flow escaped at t = {err.time!r}"
        _write_table(cfg.output_path, meta, columns, rows, cfg.delimiter,
                     trailer)
        print(f"escape at t = {err.time!r}; partial output in "
              f"{cfg.output_path}", file=sys.stderr)
        return EXIT_ESCAPE
    rows = [np.concatenate(([t], s, [e]))
            for t, s, e in zip(traj.times, traj.states, traj.energies)]
    _write_table(cfg.output_path, meta, columns, rows, cfg.delimiter)
    _maybe_plot(args, "trajectory", cfg.output_path, trajectory=traj)
    return EXIT_OK


def cmd_section(args):
    """Compute Poincare-section crossings for the configured seeds."""
    cfg = _load(args)
    if cfg.energy is None:
        raise ConfigError("analysis.energy", "required for section runs")
    if not cfg.seeds:
        raise ConfigError("analysis.seeds", "at least one seed required")
    mu = np.array(cfg.mu)
    seeds = [np.array(s) for s in cfg.seeds]
    points = analysis.poincare_section(
        mu, cfg.energy, seeds, cfg.integrator,
        max_crossings=cfg.max_crossings, tol=cfg.section_tolerance)
    meta = _metadata_lines(cfg, "section", args.freeze_metadata)
    columns = ("seed_index", "crossing_index", "t", "x", "p_x")
    rows = [(k, p.crossing_index, p.crossing_time, p.x, p.p_x)
            for k, pts in enumerate(points) for p in pts]
    _write_table(cfg.output_path, meta, columns, rows, cfg.delimiter)
    _maybe_plot(args, "section", cfg.output_path, points=points)
    return EXIT_OK


def cmd_lyapunov(args):
    """Estimate the largest Lyapunov exponent; last row is the summary."""
    cfg = _load(args)
    mu = np.array(cfg.mu)
    s0 = _initial_reduced(cfg)
    meta = _metadata_lines(cfg, "lyapunov", args.freeze_metadata)
    columns = ("t", "mle_running")
    try:
        est = analysis.lyapunov_mle(mu, s0, cfg.integrator,
                                    renorm_interval=cfg.renorm_interval)
    except FlowEscapeError as err:
        rows = [tuple(row) for row in getattr(err, "history", [])]
        trailer = f"# truncated: flow escaped at t = {err.time!r}"
        _write_table(cfg.output_path, meta, columns, rows, cfg.delimiter,
                     trailer)
        print(f"escape at t = {err.time!r}; partial output in "
              f"{cfg.output_path}", file=sys.stderr)
        return EXIT_ESCAPE
    meta.append(f"# converged = {'true' if est.converged else 'false'}")
    rows = [tuple(row) for row in est.history]
    _write_table(cfg.output_path, meta, columns, rows, cfg.delimiter)
    _maybe_plot(args, "lyapunov", cfg.output_path, estimate=est)
    return EXIT_OK


def cmd_shoot(args):
    """Solve the two-point boundary problem; one row per iteration."""
    cfg = _load(args)
    if cfg.shoot_target is None:
        raise ConfigError("shoot.target", "required for shoot runs")
    s0 = _initial_reduced(cfg)
    problem = ShootingProblem(
        mu=np.array(cfg.mu), start=s0[:2], target=np.array(cfg.shoot_target),
        horizon=cfg.shoot_horizon, initial_guess=s0[2:],
        tolerance=cfg.shoot_tolerance,
        max_iterations=cfg.shoot_max_iterations)
    result = shoot(problem, cfg.integrator)
    meta = _metadata_lines(cfg, "shoot", args.freeze_metadata)
    meta.append(f"# converged = {'true' if result.converged else 'false'}")
    columns = ("iteration", "p_x", "p_y", "residual")
    rows = [(k, row[0], row[1], row[2])
            for k, row in enumerate(result.history)]
    _write_table(cfg.output_path, meta, columns, rows, cfg.delimiter)
    _maybe_plot(args, "shoot", cfg.output_path, problem=problem,
                result=result, integrator=cfg.integrator)
    return EXIT_OK if result.converged else EXIT_CHECK_FAILED


def _add_common(sub, config_required=True):
    sub.add_argument("--config", required=config_required,
                     help="TOML experiment file")
    sub.add_argument("--out", default=None,
                     help="output path (overrides output.path)")
    sub.add_argument("--step", type=float, default=None,
                     help="override integrator.step")
    sub.add_argument("--t-final", type=float, default=None,
                     help="override integrator.t_final")
    sub.add_argument("--freeze-metadata", action="store_true",
                     help="omit the timestamp line (golden-file runs)")
    sub.add_argument("--plot", action="store_true",
                     help="also render a PNG figure next to the output file")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="jetflow",
        description="Geodesic-flow experiments on the planar 2-jet group.")
    parser.add_argument("--version", action="version",
                        version=f"jetflow {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    p_verify = subs.add_parser(
        "verify", help="run the structure/consistency check suites")
    p_verify.add_argument("--out", default=None,
                          help="also write the report to this file")
    p_verify.add_argument("--inject-fault", default=None,
                          help=argparse.SUPPRESS)

    for name, fn, doc in (
            ("simulate", cmd_simulate, "integrate one trajectory"),
            ("section", cmd_section, "Poincare section sweep"),
            ("lyapunov", cmd_lyapunov, "largest Lyapunov exponent"),
            ("shoot", cmd_shoot, "two-point geodesic boundary problem")):
        sub = subs.add_parser(name, help=doc)
        _add_common(sub)
        sub.set_defaults(func=fn)
    p_verify.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
