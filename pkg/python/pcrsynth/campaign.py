"""Seed, optimize, verify and simulate every requested (unit cell, target) pair.

Rows run on a bounded pool of worker threads (the heavy lifting is LAPACK,
which releases the GIL). Every finished row goes to the journal first; the
report files are written atomically at the end.
"""
import csv
import io
import json
import queue
import threading
import time
import traceback
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np
from rich.progress import Progress

from . import __version__
from .circuit_model import DriveSpec
from .dynamics import NoiseModel, TAU_SINGLE, T_EDGE, amplitude_sweep, robustness_sweep, run_protocol
from .effective_hamiltonian import DRIVE_WORDS, STATIC_WORDS, coefficients_for, cutoff_convergence
from .enums import EdgeShape, RowStatus, TargetName
from .exceptions import ConfigurationError, PCRException
from .gate_logic import target_preset
from .journal import Journal, JsonLinesSink, row_key
from .optimizer import PARAMETER_NAMES, ParameterBounds, optimize_cell
from .perturbative import load_seed_table, seed_parameters
from .util import CPUs, DirConfig, atomic_write_text, console, log_error, log_info, time_format

DEFAULT_AMP_GRID = tuple(float(x) * 1e6 for x in range(20, 101, 10))
SUMMARY_THRESHOLDS = (0.90, 0.99)


@dataclass(frozen=True)
class CampaignOptions:
    targets: Tuple[str, ...] = ("GHZ",)
    cells: Optional[Tuple[int, ...]] = None
    omega_hz: float = 60e6
    amp_grid: Tuple[float, ...] = DEFAULT_AMP_GRID
    robust_samples: int = 0
    robust_seed: int = 0
    jobs: Optional[int] = None
    max_iter: int = 30
    eps: float = 1e-6
    cutoff: int = 4
    tau_single: float = TAU_SINGLE
    t_edge: float = T_EDGE
    edge_shape: str = "cosine"
    itoffoli_preset: str = "hamiltonian"
    with_noise: bool = True

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(TargetName.parse(t).value for t in self.targets))
        if self.cells is not None:
            object.__setattr__(self, "cells", tuple(int(c) for c in self.cells))
        object.__setattr__(self, "amp_grid", tuple(float(a) for a in self.amp_grid))
        if not self.amp_grid:
            raise ConfigurationError("amp_grid must not be empty")
        if self.robust_samples and self.robust_samples < 8:
            raise ConfigurationError("robust_samples must be 0 (off) or at least 8")
        if self.jobs is not None and self.jobs < 1:
            raise ConfigurationError("jobs must be at least 1")
        EdgeShape(self.edge_shape)

    def as_record(self):
        """json-able, without the worker count (which must not block a resume)"""
        record = asdict(self)
        record["targets"] = list(self.targets)
        record["cells"] = list(self.cells) if self.cells is not None else None
        record["amp_grid"] = list(self.amp_grid)
        del record["jobs"]
        return record

    def preset_for(self, name):
        if TargetName.parse(name) is TargetName.iToffoli:
            return self.itoffoli_preset
        return None

    def protocol_kwargs(self):
        return {"t_edge": self.t_edge, "edge_shape": EdgeShape(self.edge_shape), "tau_single": self.tau_single}


@dataclass
class CampaignReport:
    rows: List[Dict] = field(default_factory=list)
    metadata: Dict = field(default_factory=dict)

    def by_status(self, status: RowStatus):
        return [r for r in self.rows if r["status"] == status.value]

    def exit_code(self):
        """worst row status decides"""
        codes = [RowStatus(r["status"]).exit_code() for r in self.rows]
        if 3 in codes:
            return 3
        if 4 in codes:
            return 4
        return 0


@dataclass
class VerificationTable:
    """Coefficients (Hz) and protocol fidelity per drive amplitude"""

    params: List[float]
    rows: List[Dict]
    best_amplitude: Optional[float] = None
    # relative weight change against a higher excitation cutoff, at the largest amplitude
    cutoff_changes: Optional[Dict] = None

    def words(self):
        return [k for k in self.rows[0] if k not in ("omega_hz", "fidelity", "best")] if self.rows else []

    def column(self, key):
        return np.array([r[key] for r in self.rows], dtype=float)

    def linear_r2(self, word, lo=None, hi=None):
        """R^2 of a straight line fit of alpha_word against the amplitude"""
        omega = self.column("omega_hz")
        alpha = self.column(word)
        keep = np.ones(len(omega), dtype=bool)
        if lo is not None:
            keep &= omega >= lo
        if hi is not None:
            keep &= omega <= hi
        omega, alpha = omega[keep], alpha[keep]
        slope, offset = np.polyfit(omega, alpha, 1)
        residual = np.sum((alpha - (slope * omega + offset)) ** 2)
        total = np.sum((alpha - alpha.mean()) ** 2)
        return 1.0 - residual / total if total > 0 else 1.0

    def dumps_csv(self):
        out = io.StringIO()
        fieldnames = ["omega_hz"] + self.words() + ["fidelity", "best"]
        writer = csv.DictWriter(out, fieldnames=fieldnames)
        writer.writeheader()
        for row in self.rows:
            writer.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
        return out.getvalue()

    def dumps_json(self):
        return json.dumps(
            {
                "params": self.params,
                "best_amplitude_hz": self.best_amplitude,
                "cutoff_changes": self.cutoff_changes,
                "rows": self.rows,
            },
            indent=2,
        )

    def write(self, stem):
        stem = Path(stem)
        atomic_write_text(stem.parent / (stem.name + ".csv"), self.dumps_csv())
        atomic_write_text(stem.parent / (stem.name + ".json"), self.dumps_json())


def verify_coefficients(
    params,
    spec,
    omega_grid,
    target=None,
    noise=None,
    cutoff=4,
    phases=(0.0, 0.0, 0.0),
    compare_cutoff=None,
    **protocol_kwargs,
) -> VerificationTable:
    """Recompute every drive induced (and static) weight at each amplitude of omega_grid.

    With a target, the protocol is simulated at each amplitude as well and the
    best-fidelity row is marked. With compare_cutoff, the weights at the largest
    amplitude are recomputed at that cutoff and their relative changes recorded."""
    params = [float(x) for x in params]
    cell_spec = spec.with_couplers((params[0] * 1e9, params[1] * 1e9))
    rows = []
    for omega in omega_grid:
        coeffs = coefficients_for(cell_spec, DriveSpec(tuple(params[2:5]), float(omega), phases), cutoff)
        row = {"omega_hz": float(omega)}
        row.update({w: coeffs.get(w) for w in DRIVE_WORDS + STATIC_WORDS})
        row["fidelity"] = None
        if target is not None:
            try:
                row["fidelity"] = run_protocol(target, coeffs, noise=noise, **protocol_kwargs).fidelity
            except PCRException as e:
                log_info(f"No protocol at {omega / 1e6:.2f} MHz: {e}")
        row["best"] = False
        rows.append(row)
    best = None
    scored = [r for r in rows if r["fidelity"] is not None]
    if scored:
        winner = max(scored, key=lambda r: r["fidelity"])
        winner["best"] = True
        best = winner["omega_hz"]
    changes = None
    if compare_cutoff is not None and rows:
        omega = max(omega_grid, key=abs)
        changes = cutoff_convergence(
            cell_spec, DriveSpec(tuple(params[2:5]), float(omega), phases), (cutoff, compare_cutoff)
        )
    return VerificationTable(params, rows, best, changes)


def _error_text(cell, target_name, options, exc):
    lines = [
        f"Cell: {cell.index} ({'-'.join(cell.labels)})",
        f"Target: {target_name}",
        f"Qubit frequencies (Hz): {list(cell.spec.qubit_freqs)}",
        f"Coupler frequencies (Hz): {list(cell.spec.coupler_freqs)}",
        f"Options: {json.dumps(options.as_record())}",
        "",
        "".join(traceback.format_exception(type(exc), exc, exc.__traceback__)),
    ]
    return "\n".join(lines)


def run_row(cell, target_name, options, seed_table, trace_dir=None):
    """One (cell, target) pipeline. Raises on failure, the caller records it."""
    target = target_preset(target_name, options.preset_for(target_name))
    bounds = ParameterBounds.from_seed_table(seed_table)
    seed = seed_parameters(target, cell.spec, bounds, cell.index, seed_table, options.omega_hz)
    sink = None
    if trace_dir is not None:
        sink = JsonLinesSink(Path(trace_dir) / f"{row_key(cell.index, target.name.value)}.jsonl")
    params, coeffs, trace = optimize_cell(
        cell.spec,
        target,
        seed,
        bounds,
        omega_hz=options.omega_hz,
        eps=options.eps,
        max_iter=options.max_iter,
        cutoff=options.cutoff,
        on_evaluation=sink,
    )
    check = verify_coefficients(params, cell.spec, [options.omega_hz], cutoff=options.cutoff)
    noise = NoiseModel.from_spec(cell.spec) if options.with_noise else None
    sim = amplitude_sweep(target, coeffs, noise, options.amp_grid, **options.protocol_kwargs())
    row = {
        "seed": [float(x) for x in seed],
        "params": [float(x) for x in params],
        "L_seed": trace.seed_cost,
        "L_final": trace.final_cost,
        "iterations": trace.iterations,
        "evaluations": trace.evaluations,
        "converged": trace.converged,
        "verified": check.rows[0]["ZZX"] == coeffs.get("ZZX"),
        "coefficients_hz": coeffs.ansatz(),
        "fidelity": sim.fidelity,
        "best_amplitude_hz": sim.drive_amplitude,
        "tau_s": sim.tau,
        "duration_s": sim.duration,
        "curve": [list(point) for point in sim.curve],
        "diagnostics": list(coeffs.diagnostics),
    }
    if options.robust_samples:
        envelope = robustness_sweep(
            target,
            cell.spec,
            params,
            options.robust_samples,
            noise=noise,
            omega_hz=options.omega_hz,
            drive_amp=sim.drive_amplitude,
            base_seed=options.robust_seed,
            cutoff=options.cutoff,
            **options.protocol_kwargs(),
        )
        row["robustness"] = envelope.as_dict()
    row["status"] = (RowStatus.Success if trace.converged else RowStatus.NotConverged).value
    return row


def _empty_row(cell, target_name):
    return {
        "cell": cell.index,
        "qubits": list(cell.labels),
        "target": target_name,
        "status": RowStatus.Failed.value,
        "error": None,
    }


def _record_failure(dir_config, started, key, row, details):
    if dir_config.error_dir is None:
        log_error(f"{key} failed: {row['error']}")
        return
    error_file = dir_config.error_dir / started / f"{key}_exception.txt"
    try:
        error_file.parent.mkdir(exist_ok=True, parents=True)
        error_file.write_text(details)
    except OSError as e:
        log_error(f"{key} failed: {row['error']}. Writing {error_file} failed too: {e}")
        return
    log_error(f"{key} failed: {row['error']}. Details in {error_file}")


def run_campaign(device, targets=None, options: CampaignOptions = None, dir_config: DirConfig = None, resume=False, seed_table=None, show_progress=True) -> CampaignReport:
    """Every selected cell x target; failures are recorded per row, never raised."""
    if options is None:
        options = CampaignOptions(targets=tuple(targets or ()))
    elif targets is not None:
        raise ConfigurationError("Pass targets either directly or via options, not both")
    if dir_config is None:
        dir_config = DirConfig()
    dir_config.mkdirs()
    if seed_table is None:
        seed_table = load_seed_table()
    started = time.strftime(time_format)
    cells = device.select(options.cells)
    pending = [(cell, name) for cell in cells for name in options.targets]

    journal = Journal(
        (dir_config.journal_dir or dir_config.root) / "campaign.jsonl",
        {"options": options.as_record(), "device": device.fingerprint},
    )
    done = journal.open(resume=resume)
    results = dict(done)
    todo = [(c, n) for c, n in pending if row_key(c.index, n) not in done]
    log_info(f"Campaign: {len(pending)} rows, {len(todo)} to compute")

    work = queue.Queue()
    for item in todo:
        work.put(item)
    lock = threading.Lock()
    unjournaled = []
    n_workers = max(1, min(options.jobs or CPUs(), len(todo)))
    trace_dir = dir_config.root / "traces"

    with Progress(console=console, disable=not show_progress or not todo) as progress:
        task = progress.add_task("cells x targets", total=len(todo))

        def worker():
            while True:
                try:
                    cell, name = work.get_nowait()
                except queue.Empty:
                    return
                key = row_key(cell.index, name)
                row = _empty_row(cell, name)
                try:
                    row.update(run_row(cell, name, options, seed_table, trace_dir))
                except Exception as e:
                    row["error"] = f"{type(e).__name__}: {e}"
                    _record_failure(dir_config, started, key, row, _error_text(cell, name, options, e))
                try:
                    journal.append(key, row)
                except Exception as e:
                    log_error(f"{key}: not journaled ({type(e).__name__}: {e}), a resume computes it again")
                    with lock:
                        unjournaled.append(key)
                with lock:
                    results[key] = row
                    progress.advance(task)

        threads = [threading.Thread(target=worker) for _ in range(n_workers)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()

    rows = [results[row_key(c.index, n)] for c, n in pending]
    report = CampaignReport(
        rows,
        {
            "version": __version__,
            "started": started,
            "finished": time.strftime(time_format),
            "device": str(device.path),
            "device_fingerprint": device.fingerprint,
            "resumed_rows": len(pending) - len(todo),
            "unjournaled_rows": sorted(unjournaled),
        },
    )
    write_report(report, dir_config.root, options)
    return report


CSV_COLUMNS = (
    ["cell", "qubits", "target", "status", "error"]
    + list(PARAMETER_NAMES)
    + ["L_seed", "L_final", "iterations", "converged", "fidelity", "best_amplitude_hz", "tau_s", "duration_s"]
    + ["robust_min", "robust_median", "robust_max", "robust_failures"]
)


def _csv_row(row):
    flat = {k: row.get(k) for k in CSV_COLUMNS if k in row}
    flat["qubits"] = "-".join(row["qubits"])
    for name, value in zip(PARAMETER_NAMES, row.get("params") or []):
        flat[name] = value
    robust = row.get("robustness") or {}
    for key in ("min", "median", "max", "failures"):
        if key in robust:
            flat["robust_" + key] = robust[key]
    return {k: (repr(v) if isinstance(v, float) else v) for k, v in flat.items()}


def dumps_report_csv(report: CampaignReport):
    out = io.StringIO()
    writer = csv.DictWriter(out, fieldnames=CSV_COLUMNS)
    writer.writeheader()
    for row in report.rows:
        writer.writerow(_csv_row(row))
    return out.getvalue()


def write_report(report: CampaignReport, out_dir, options: CampaignOptions = None):
    """report.json + report.csv (deterministic), metadata.json (timestamps)"""
    out_dir = Path(out_dir)
    body = {"options": options.as_record() if options is not None else None, "rows": report.rows}
    atomic_write_text(out_dir / "report.json", json.dumps(body, indent=2))
    atomic_write_text(out_dir / "report.csv", dumps_report_csv(report))
    atomic_write_text(out_dir / "metadata.json", json.dumps(report.metadata, indent=2))


def load_report(out_dir) -> CampaignReport:
    out_dir = Path(out_dir)
    try:
        body = json.loads((out_dir / "report.json").read_text())
    except (OSError, ValueError) as e:
        raise ConfigurationError(f"No readable report in {out_dir}: {e}")
    metadata_file = out_dir / "metadata.json"
    metadata = json.loads(metadata_file.read_text()) if metadata_file.exists() else {}
    return CampaignReport(body["rows"], metadata)


def summarize(report: CampaignReport):
    """Per target: row count, successes, cells above each fidelity threshold, median duration"""
    result = {}
    for row in report.rows:
        entry = result.setdefault(
            row["target"],
            {"rows": 0, "success": 0, "durations": [], **{f"above_{t:.2f}": 0 for t in SUMMARY_THRESHOLDS}},
        )
        entry["rows"] += 1
        if row["status"] == RowStatus.Success.value:
            entry["success"] += 1
        fidelity = row.get("fidelity")
        if fidelity is not None:
            for t in SUMMARY_THRESHOLDS:
                if fidelity > t:
                    entry[f"above_{t:.2f}"] += 1
        if row.get("duration_s") is not None:
            entry["durations"].append(row["duration_s"])
    for entry in result.values():
        durations = entry.pop("durations")
        entry["median_duration_s"] = float(np.median(durations)) if durations else None
    return result
