"""Effective three qubit Hamiltonian by least action block diagonalization.

The computational block is ordered |Q1, Q3, Q2> (Q1 most significant), which
makes logical |q1 q2 q3> and physical |Q1 Q3 Q2> coincide.
"""
import csv
import io
import itertools
import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, Tuple

import numpy as np
import scipy.linalg

from . import boson_algebra as ba
from .circuit_model import TWO_PI, dressed_table, frame_frequency, rotating_frame_rwa, standard_basis
from .exceptions import HybridizationError, NumericError
from .util import atomic_write_text, log_warning

# physical mode indices in Pauli word order
PAULI_MODE_ORDER = (0, 2, 1)
ALL_WORDS = tuple("".join(x) for x in itertools.product("IXYZ", repeat=3))
ANSATZ_WORDS = tuple(a + b + c for a in "IZ" for b in "IZ" for c in "IXYZ")
DRIVE_WORDS = tuple(w for w in ANSATZ_WORDS if w[2] in "XY")
STATIC_WORDS = tuple(w for w in ANSATZ_WORDS if w[2] in "IZ" and w != "III")
LEAKAGE_WORDS = tuple(w for w in ALL_WORDS if w not in ANSATZ_WORDS)

HYBRIDIZATION_OVERLAP = 0.25
ADVISORY_OVERLAP = 0.5
IMAGINARY_RESIDUE = 1.0


@dataclass(frozen=True)
class BlockAssignment:
    eigen_indices: Dict[Tuple[int, ...], int]
    overlaps: Dict[Tuple[int, ...], float]
    eigenvalues: Tuple[float, ...] = ()
    diagnostics: Tuple[str, ...] = ()

    def min_overlap(self):
        return min(self.overlaps.values())


@dataclass(frozen=True)
class PauliCoefficients:
    """Pauli weights in Hz. Words are read Q1 x Q3 x Q2.

    Not every word needs to be present (the closed forms only provide the drive
    induced ones); use get() where that matters."""

    alpha: Dict[str, float]
    metadata: Dict = field(default_factory=dict)
    diagnostics: Tuple[str, ...] = ()

    def __getitem__(self, word):
        return self.alpha[word]

    def __contains__(self, word):
        return word in self.alpha

    def get(self, word, default=0.0):
        return self.alpha.get(word, default)

    def ansatz(self):
        return {w: self.alpha[w] for w in ANSATZ_WORDS if w in self.alpha}

    def leakage(self):
        return {w: self.alpha[w] for w in LEAKAGE_WORDS if w in self.alpha}

    def max_abs(self, words):
        values = [abs(self.alpha[w]) for w in words if w in self.alpha]
        return max(values) if values else 0.0

    def max_abs_y(self):
        return self.max_abs([w for w in ANSATZ_WORDS if w[2] == "Y"])

    def scaled_drive(self, ratio):
        """Drive induced words (third letter X or Y) times ratio, everything else unchanged"""
        alpha = {w: (v * ratio if w[2] in "XY" else v) for w, v in self.alpha.items()}
        meta = dict(self.metadata)
        meta["drive_scale"] = meta.get("drive_scale", 1.0) * ratio
        return PauliCoefficients(alpha, meta, self.diagnostics)

    def to_matrix(self, words=None):
        """sum_w alpha_w * w as an 8x8 matrix in Hz"""
        if words is None:
            words = self.alpha.keys()
        result = np.zeros((8, 8), dtype=complex)
        for w in words:
            if w in self.alpha:
                result += self.alpha[w] * ba.pauli_word(w)
        return result

    def rows(self):
        """One row per word, values in MHz"""
        return [
            {
                "word": w,
                "alpha_mhz": self.alpha[w] / 1e6,
                "in_ansatz": w in ANSATZ_WORDS,
            }
            for w in ALL_WORDS
            if w in self.alpha
        ]


def _greedy_assignment(overlaps):
    """Repeatedly take the largest remaining overlap.

    Scans eigenvector-major so that equal overlaps go to the lowest eigen index."""
    n_states, n_eig = overlaps.shape
    work = overlaps.T.copy()
    pairs = {}
    for _ in range(n_states):
        flat = int(np.argmax(work))
        k, s = divmod(flat, n_states)
        pairs[s] = k
        work[k, :] = -1
        work[:, s] = -1
    return [pairs[s] for s in range(n_states)]


def _inverse_sqrt(matrix):
    evals, evecs = scipy.linalg.eigh(matrix)
    if np.min(evals) <= 0:
        raise HybridizationError(
            "Projected eigenvectors are linearly dependent on the computational subspace"
        )
    return (evecs / np.sqrt(evals)) @ evecs.conj().T


def block_diagonalize(H_rot: ba.OperatorMatrix, basis: ba.ProductBasis = None):
    """Returns (H_eff, BlockAssignment); H_eff is 8x8 in the units of H_rot."""
    if basis is None:
        basis = H_rot.basis
    entries = H_rot.entries if isinstance(H_rot, ba.OperatorMatrix) else np.asarray(H_rot)
    err = ba.hermiticity_error(entries)
    if err > ba.HERMITIAN_RTOL:
        raise NumericError(f"block_diagonalize needs a hermitian matrix ({err:.2e})")
    evals, evecs = scipy.linalg.eigh((entries + entries.conj().T) / 2)
    comp = basis.computational_states(PAULI_MODE_ORDER)
    amplitudes = evecs[comp, :]
    overlaps = np.abs(amplitudes) ** 2
    chosen = _greedy_assignment(overlaps)

    occupations = [basis.states[idx] for idx in comp]
    assigned = {occ: float(overlaps[s, k]) for s, (occ, k) in enumerate(zip(occupations, chosen))}
    worst = min(assigned.values())
    if worst < HYBRIDIZATION_OVERLAP:
        raise HybridizationError(
            f"Computational state hybridized: smallest assigned overlap {worst:.3f}",
            overlaps=assigned,
        )
    diagnostics = []
    for occ, o in assigned.items():
        if o < ADVISORY_OVERLAP:
            msg = f"State {occ} assigned with overlap {o:.3f} < {ADVISORY_OVERLAP}"
            log_warning(msg)
            diagnostics.append(msg)

    A = amplitudes[:, chosen]
    W = A @ _inverse_sqrt(A.conj().T @ A)
    D = evals[chosen]
    H_eff = (W * D) @ W.conj().T
    H_eff = (H_eff + H_eff.conj().T) / 2
    assignment = BlockAssignment(
        {occ: int(k) for occ, k in zip(occupations, chosen)},
        assigned,
        tuple(float(x) for x in D),
        tuple(diagnostics),
    )
    return H_eff, assignment


def pauli_project(H_eff, metadata=None, diagnostics=()) -> PauliCoefficients:
    """alpha_w = Tr(w H_eff) / 8 for all 64 words (units of H_eff)"""
    H_eff = np.asarray(H_eff)
    if H_eff.shape != (8, 8):
        raise NumericError(f"pauli_project needs an 8x8 matrix, got {H_eff.shape}")
    err = ba.hermiticity_error(H_eff)
    if err > ba.HERMITIAN_RTOL:
        raise NumericError(f"pauli_project needs a hermitian matrix ({err:.2e})")
    alpha = {}
    for w in ALL_WORDS:
        value = np.trace(ba.pauli_word(w) @ H_eff) / 8
        if abs(value.imag) > IMAGINARY_RESIDUE:
            raise NumericError(f"Pauli coefficient {w} has imaginary part {value.imag:.3g}")
        alpha[w] = float(value.real)
    return PauliCoefficients(alpha, dict(metadata or {}), tuple(diagnostics))


def coefficients_for(spec, drive, cutoff: int = 4, table=None) -> PauliCoefficients:
    """spec + drive -> rotating frame -> block diagonalization -> Pauli weights in Hz"""
    basis = standard_basis(cutoff)
    diagnostics = list(spec.diagnostics)
    if not drive.phase_calibrated():
        msg = f"Drive phases {drive.phases} are not calibrated to 0 or pi"
        log_warning(msg)
        diagnostics.append(msg)
    drive_freq = frame_frequency(spec, drive, table)
    H_rot = rotating_frame_rwa(spec, replace(drive, drive_freq=drive_freq), basis)
    H_eff, assignment = block_diagonalize(H_rot, basis)
    diagnostics.extend(assignment.diagnostics)
    metadata = {
        "cutoff": cutoff,
        "drive_freq_hz": drive_freq,
        "reference_amplitude_hz": drive.reference_amplitude,
        "scale_factors": list(drive.scale_factors),
        "coupler_freqs_hz": list(spec.coupler_freqs),
        "min_overlap": assignment.min_overlap(),
    }
    return pauli_project(H_eff / TWO_PI, metadata, diagnostics)


CUTOFF_TOLERANCE = 0.01


def cutoff_convergence(spec, drive, cutoffs=(4, 5), words=ANSATZ_WORDS, floor_hz=1e3, table=None):
    """Relative change of each weight between the first and the last excitation cutoff.

    Weights below floor_hz at the first cutoff are left out (no meaningful ratio).
    Changes above CUTOFF_TOLERANCE are logged as a warning."""
    if len(cutoffs) < 2:
        raise ValueError("Need at least two cutoffs to compare")
    if table is None and drive.drive_freq is None:
        table = dressed_table(spec)
    low = coefficients_for(spec, drive, cutoffs[0], table=table)
    high = coefficients_for(spec, drive, cutoffs[-1], table=table)
    changes = {}
    for w in words:
        ref = abs(low.get(w))
        if ref < floor_hz or w == "III":
            continue
        changes[w] = abs(high.get(w) - low.get(w)) / ref
    worst = max(changes, key=changes.get, default=None)
    if worst is not None and changes[worst] > CUTOFF_TOLERANCE:
        log_warning(
            f"{worst} changes by {changes[worst]:.2%} between cutoff {cutoffs[0]} and {cutoffs[-1]}"
        )
    return changes


def dumps_json(coeffs: PauliCoefficients):
    return json.dumps(
        {"metadata": coeffs.metadata, "diagnostics": list(coeffs.diagnostics), "rows": coeffs.rows()},
        indent=2,
    )


def dumps_csv(coeffs: PauliCoefficients):
    out = io.StringIO()
    writer = csv.DictWriter(out, fieldnames=["word", "alpha_mhz", "in_ansatz"])
    writer.writeheader()
    for row in coeffs.rows():
        writer.writerow({**row, "alpha_mhz": repr(row["alpha_mhz"])})
    return out.getvalue()


def write_coefficients(coeffs: PauliCoefficients, stem: Path):
    """stem.json + stem.csv"""
    stem = Path(stem)
    atomic_write_text(stem.with_suffix(".json"), dumps_json(coeffs))
    atomic_write_text(stem.with_suffix(".csv"), dumps_csv(coeffs))
