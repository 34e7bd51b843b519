"""The pcrsynth command line.

Exit codes: 0 success, 2 configuration error, 3 numeric failure, 4 not converged.
"""
import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np
from rich.table import Table

from . import util
from .campaign import CampaignOptions, load_report, run_campaign, summarize, verify_coefficients
from .circuit_model import DriveSpec
from .device import load_device
from .dynamics import NoiseModel, amplitude_sweep, robustness_sweep
from .effective_hamiltonian import coefficients_for, write_coefficients
from .enums import RowStatus
from .exceptions import ConfigurationError, PCRException
from .gate_logic import target_preset
from .journal import JsonLinesSink
from .optimizer import PARAMETER_NAMES, ParameterBounds, optimize_cell
from .perturbative import load_seed_table, seed_parameters
from .util import TRACE_LEVEL, DirConfig, console, log_error, pretty_log_errors, setup_logging

EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_NOT_CONVERGED = 4


def parse_amp_grid(text):
    """'20,40,60' or 'start:stop:step', in MHz -> Hz"""
    text = text.strip()
    try:
        if ":" in text:
            start, stop, step = (float(x) for x in text.split(":"))
            if step <= 0:
                raise ValueError("step must be positive")
            values = np.arange(start, stop + step / 2, step)
        else:
            values = [float(x) for x in text.split(",") if x.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"Can not parse amplitude grid {text!r}: {e}")
    if len(values) == 0:
        raise argparse.ArgumentTypeError("Empty amplitude grid")
    return tuple(float(v) * 1e6 for v in values)


def parse_int_list(text):
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"Expected comma separated integers, got {text!r}")


def parse_targets(text):
    return tuple(x.strip() for x in text.split(",") if x.strip())


def _add_device(p):
    p.add_argument("--device", type=Path, default=None, help="device JSON (default: the shipped synthetic device)")


def _add_cell_target(p):
    _add_device(p)
    p.add_argument("--target", required=True, help="GHZ, iToffoli, CCNOT or CZZ")
    p.add_argument("--preset", default=None, help="target preset (e.g. iToffoli 'appendix')")
    p.add_argument("--cell", type=int, required=True)
    p.add_argument("--seed-file", type=Path, default=None, help="seed table JSON")
    p.add_argument("--omega-mhz", type=float, default=60.0, help="reference drive amplitude")
    p.add_argument("--cutoff", type=int, default=4, help="total excitation cutoff")
    p.add_argument("--out-dir", type=Path, default=Path("pcr_out"))


def _add_params(p):
    p.add_argument(
        "--params",
        type=float,
        nargs=5,
        metavar=("W_C12_GHZ", "W_C23_GHZ", "A1", "A2", "A3"),
        default=None,
        help="optimized parameters (default: the cell's seed)",
    )


def build_parser():
    parser = argparse.ArgumentParser(
        prog="pcrsynth",
        description="Synthesize parity cross-resonance gates on three-qubit unit cells",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug output on stdout")
    parser.add_argument(
        "--trace", action="store_true", help="log every optimizer evaluation to the message log"
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    device = sub.add_parser("device", help="device file operations")
    device_sub = device.add_subparsers(dest="device_verb", required=True)
    validate = device_sub.add_parser("validate", help="load and validate a device file")
    _add_device(validate)

    cells = sub.add_parser("cells", help="unit cell operations")
    cells_sub = cells.add_subparsers(dest="cells_verb", required=True)
    listing = cells_sub.add_parser("list", help="list the unit cells")
    _add_device(listing)
    listing.add_argument("--candidates", action="store_true", help="every connected triple instead")

    opt = sub.add_parser("optimize", help="seed and optimize one cell for one target")
    _add_cell_target(opt)
    opt.add_argument("--max-iter", type=int, default=30)
    opt.add_argument("--eps", type=float, default=1e-6)

    verify = sub.add_parser("verify", help="coefficients (and fidelity) against the drive amplitude")
    _add_cell_target(verify)
    _add_params(verify)
    verify.add_argument("--amp-grid", type=parse_amp_grid, default=parse_amp_grid("0:100:10"))
    verify.add_argument("--no-noise", action="store_true")
    verify.add_argument(
        "--compare-cutoff", type=int, default=None, help="also report weight changes at this excitation cutoff"
    )

    simulate = sub.add_parser("simulate", help="amplitude sweep (and robustness) for one cell")
    _add_cell_target(simulate)
    _add_params(simulate)
    simulate.add_argument("--amp-grid", type=parse_amp_grid, default=parse_amp_grid("20:100:10"))
    simulate.add_argument("--robust-samples", type=int, default=0)
    simulate.add_argument("--seed", type=int, default=0, help="base seed of the robustness samples")
    simulate.add_argument("--no-noise", action="store_true")

    camp = sub.add_parser("campaign", help="every cell x target")
    _add_device(camp)
    camp.add_argument("--targets", type=parse_targets, default=("GHZ", "iToffoli", "CCNOT", "CZZ"))
    camp.add_argument("--cells", type=parse_int_list, default=None)
    camp.add_argument("--omega-mhz", type=float, default=60.0)
    camp.add_argument("--amp-grid", type=parse_amp_grid, default=parse_amp_grid("20:100:10"))
    camp.add_argument("--robust-samples", type=int, default=0)
    camp.add_argument("--jobs", type=int, default=None)
    camp.add_argument("--seed", type=int, default=0)
    camp.add_argument("--max-iter", type=int, default=30)
    camp.add_argument("--itoffoli-preset", default="hamiltonian")
    camp.add_argument("--out-dir", type=Path, default=Path("pcr_out"))
    camp.add_argument("--resume", action="store_true")
    camp.add_argument("--no-progress", action="store_true")

    report = sub.add_parser("report", help="summarize a finished campaign")
    report.add_argument("--out-dir", type=Path, default=Path("pcr_out"))
    return parser


def _cell_and_target(args):
    device = load_device(args.device)
    cell = device.cell(args.cell)
    target = target_preset(args.target, args.preset)
    seed_table = load_seed_table(args.seed_file)
    return cell, target, seed_table


def _params(args, cell, target, seed_table):
    if args.params is not None:
        return np.array(args.params, dtype=float)
    bounds = ParameterBounds.from_seed_table(seed_table)
    return seed_parameters(target, cell.spec, bounds, cell.index, seed_table, args.omega_mhz * 1e6)


def cmd_device_validate(args):
    device = load_device(args.device)
    console.print(
        f"{device.name}: {len(device.qubits)} qubits, {len(device.couplers)} couplers, "
        f"{len(device.cells)} valid unit cells (fingerprint {device.fingerprint['hash']})"
    )
    return 0


def cmd_cells_list(args):
    device = load_device(args.device)
    if args.candidates:
        table = Table("#", "Q1", "Q2 (middle)", "Q3")
        for ii, triple in enumerate(device.candidate_triples(), start=1):
            table.add_row(str(ii), *triple)
    else:
        table = Table("cell", "Q1", "Q2", "Q3", "C12", "C23", "f_Q (GHz)")
        for cell in device.cells:
            freqs = " ".join(f"{f / 1e9:.3f}" for f in cell.spec.qubit_freqs)
            table.add_row(str(cell.index), *cell.labels, *cell.couplers, freqs)
    console.print(table)
    return 0


def cmd_optimize(args):
    cell, target, seed_table = _cell_and_target(args)
    bounds = ParameterBounds.from_seed_table(seed_table)
    omega = args.omega_mhz * 1e6
    seed = seed_parameters(target, cell.spec, bounds, cell.index, seed_table, omega)
    stem = args.out_dir / f"cell{cell.index:03d}-{target.name.value}"
    sink = JsonLinesSink(stem.with_suffix(".trace.jsonl"))
    params, coeffs, trace = optimize_cell(
        cell.spec, target, seed, bounds, omega_hz=omega, eps=args.eps,
        max_iter=args.max_iter, cutoff=args.cutoff, on_evaluation=sink,
    )
    write_coefficients(coeffs, stem)
    (args.out_dir / f"{stem.name}.iterations.json").write_text(
        json.dumps([r.as_dict() for r in trace.records], indent=2)
    )
    table = Table("parameter", "seed", "optimized")
    for name, a, b in zip(PARAMETER_NAMES, seed, params):
        table.add_row(name, f"{a:.6f}", f"{b:.6f}")
    console.print(table)
    console.print(
        f"L_total {trace.seed_cost:.4g} -> {trace.final_cost:.4g}, "
        f"alpha_ZZX = {coeffs.get('ZZX') / 1e6:.4f} MHz, converged: {trace.converged}"
    )
    return 0 if trace.converged else EXIT_NOT_CONVERGED


def cmd_verify(args):
    cell, target, seed_table = _cell_and_target(args)
    params = _params(args, cell, target, seed_table)
    noise = None if args.no_noise else NoiseModel.from_spec(cell.spec)
    result = verify_coefficients(
        params, cell.spec, args.amp_grid, target=target, noise=noise, cutoff=args.cutoff,
        compare_cutoff=args.compare_cutoff,
    )
    stem = args.out_dir / f"cell{cell.index:03d}-{target.name.value}.verify"
    result.write(stem)
    table = Table("Omega (MHz)", "ZZX", "ZIX", "IZX", "IIX", "fidelity")
    for row in result.rows:
        fid = "-" if row["fidelity"] is None else f"{row['fidelity']:.5f}" + (" *" if row["best"] else "")
        table.add_row(
            f"{row['omega_hz'] / 1e6:.1f}",
            *(f"{row[w] / 1e6:.4f}" for w in ("ZZX", "ZIX", "IZX", "IIX")),
            fid,
        )
    console.print(table)
    if result.cutoff_changes is not None:
        worst = max(result.cutoff_changes.values(), default=0.0)
        console.print(f"Largest change cutoff {args.cutoff} -> {args.compare_cutoff}: {worst:.3%}")
    return 0


def cmd_simulate(args):
    cell, target, seed_table = _cell_and_target(args)
    params = _params(args, cell, target, seed_table)
    omega = args.omega_mhz * 1e6
    noise = None if args.no_noise else NoiseModel.from_spec(cell.spec)
    coeffs = coefficients_for(
        cell.spec.with_couplers((params[0] * 1e9, params[1] * 1e9)),
        DriveSpec(tuple(params[2:5]), omega),
        args.cutoff,
    )
    best = amplitude_sweep(target, coeffs, noise, args.amp_grid)
    out = best.as_dict()
    out["params"] = [float(x) for x in params]
    if args.robust_samples:
        envelope = robustness_sweep(
            target, cell.spec, params, args.robust_samples, noise=noise, omega_hz=omega,
            drive_amp=best.drive_amplitude, base_seed=args.seed, cutoff=args.cutoff,
        )
        out["robustness"] = envelope.as_dict()
    args.out_dir.mkdir(exist_ok=True, parents=True)
    (args.out_dir / f"cell{cell.index:03d}-{target.name.value}.simulate.json").write_text(json.dumps(out, indent=2))
    console.print(
        f"{target.name.value} cell {cell.index}: best fidelity {best.fidelity:.5f} at "
        f"{best.drive_amplitude / 1e6:.1f} MHz, duration {best.duration * 1e9:.1f} ns"
    )
    if "robustness" in out:
        r = out["robustness"]
        console.print(f"robustness: min {r['min']:.5f} median {r['median']:.5f} max {r['max']:.5f} ({r['failures']} failed)")
    return 0


def cmd_campaign(args):
    device = load_device(args.device)
    options = CampaignOptions(
        targets=args.targets,
        cells=args.cells,
        omega_hz=args.omega_mhz * 1e6,
        amp_grid=args.amp_grid,
        robust_samples=args.robust_samples,
        robust_seed=args.seed,
        jobs=args.jobs,
        max_iter=args.max_iter,
        itoffoli_preset=args.itoffoli_preset,
    )
    report = run_campaign(
        device, options=options, dir_config=DirConfig(args.out_dir), resume=args.resume,
        show_progress=not args.no_progress,
    )
    failed = len(report.by_status(RowStatus.Failed))
    console.print(f"{len(report.rows)} rows, {failed} failed. Report in {args.out_dir}")
    return report.exit_code()


def cmd_report(args):
    report = load_report(args.out_dir)
    summary = summarize(report)
    table = Table("target", "rows", "success", "F > 0.90", "F > 0.99", "median duration (ns)")
    for name, entry in summary.items():
        median = entry["median_duration_s"]
        table.add_row(
            name,
            str(entry["rows"]),
            str(entry["success"]),
            str(entry["above_0.90"]),
            str(entry["above_0.99"]),
            "-" if median is None else f"{median * 1e9:.1f}",
        )
    console.print(table)
    (Path(args.out_dir) / "summary.json").write_text(json.dumps(summary, indent=2))
    return 0


COMMANDS = {
    "device": cmd_device_validate,
    "cells": cmd_cells_list,
    "optimize": cmd_optimize,
    "verify": cmd_verify,
    "simulate": cmd_simulate,
    "campaign": cmd_campaign,
    "report": cmd_report,
}


@pretty_log_errors
def _dispatch(args):
    return COMMANDS[args.verb](args)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    dir_config = None
    if args.verb in ("optimize", "campaign"):
        dir_config = DirConfig(args.out_dir)
        dir_config.mkdirs()
    util.do_trace_log = args.trace
    setup_logging(
        dir_config,
        log_level=TRACE_LEVEL if args.trace else (logging.DEBUG if args.verbose else logging.INFO),
        stdout_level=logging.DEBUG if args.verbose else logging.WARNING,
    )
    try:
        return _dispatch(args)
    except ConfigurationError as e:
        log_error(f"Configuration error: {e}")
        return EXIT_CONFIG
    except PCRException as e:
        log_error(f"{type(e).__name__}: {e}")
        return EXIT_NUMERIC


def cli():
    sys.exit(main())
