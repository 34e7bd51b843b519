"""Closed form, first order in the drive, Pauli weights and seed parameters.

Symbols use the DressedTable names (apostrophe = overline). The expressions
are kept term for term so they can be audited against their source; the
Y-type ones follow the sin(phi) convention of that source, which is the
opposite sign of the rotating frame drive used by the numeric pipeline.
"""
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .circuit_model import DISPERSIVE_ADVISORY_RATIO, MIN_DETUNING_HZ, CircuitSpec, DriveSpec, dressed_table
from .effective_hamiltonian import PauliCoefficients
from .enums import TargetName
from .exceptions import ConfigurationError, ResonanceError, SeedingError
from .optimizer import ParameterBounds
from .util import log_debug, log_info

SEED_TABLE_PATH = Path(__file__).parent / "data" / "seed_table.json"

FORMULA_SYMBOLS = (
    "J_12", "J_1'2", "J_12'", "J_13", "J_13'", "J_1'3", "J_1'3'", "J_(13)'",
    "J_32", "J_3'2", "J_32'",
    "D_12", "D_1'2", "D_12'", "D_13", "D_32", "D_3'2", "D_32'",
)
PERTURBATIVE_WORDS = ("ZIX", "ZIY", "IZX", "IZY", "IIX", "IIY", "ZZX", "ZZY")


@dataclass(frozen=True)
class PerturbativeInputs:
    table: object
    drive: DriveSpec

    @classmethod
    def from_spec(cls, spec: CircuitSpec, drive: DriveSpec):
        return cls(dressed_table(spec), drive)

    def symbols(self):
        values = {name: self.table.symbol(name) for name in FORMULA_SYMBOLS}
        for name, value in values.items():
            if name.startswith("D_") and abs(value) < MIN_DETUNING_HZ:
                raise ResonanceError(f"{name} = {value:.1f} Hz is too close to zero")
        return values


def _brackets(s):
    """The drive independent brackets, keyed by (word, drive index)"""
    zix_1 = (
        s["J_1'2"] / s["D_1'2"]
        - s["J_12"] / s["D_12"]
        + s["J_13'"] * s["J_3'2"] / (s["D_13"] * s["D_3'2"])
        - s["J_(13)'"] * s["J_3'2"] / (s["D_12'"] * s["D_3'2"])
    )
    zix_3 = s["J_13'"] * s["J_12"] / (s["D_3'2"] * s["D_12"]) - s["J_1'3'"] * s[
        "J_1'2"
    ] / (s["D_3'2"] * s["D_1'2"])
    zix_2 = (
        (s["J_1'2"] / s["D_1'2"]) ** 2
        + (s["J_12'"] / s["D_12'"]) ** 2
        - 2 * s["J_12"] * s["J_12'"] / (s["D_12"] * s["D_12'"])
    )

    izx_3 = (
        s["J_3'2"] / s["D_3'2"]
        - s["J_32"] / s["D_32"]
        + s["J_13'"] * s["J_1'2"] / (s["D_12'"] * s["D_3'2"])
        - s["J_(13)'"] * s["J_1'2"] / (s["D_1'2"] * s["D_3'2"])
    )
    izx_1 = s["J_1'3"] * s["J_32"] / (s["D_1'2"] * s["D_32"]) - s["J_1'3'"] * s[
        "J_3'2"
    ] / (s["D_1'2"] * s["D_3'2"])
    izx_2 = (
        (s["J_3'2"] / s["D_3'2"]) ** 2
        + (s["J_32'"] / s["D_32'"]) ** 2
        - 2 * s["J_32"] * s["J_32'"] / (s["D_32"] * s["D_32'"])
    )

    iix_1 = s["J_1'2"] / s["D_1'2"] - s["J_(13)'"] * s["J_3'2"] / (
        s["D_1'2"] * s["D_3'2"]
    )
    iix_3 = s["J_3'2"] / s["D_3'2"] - s["J_(13)'"] * s["J_1'2"] / (
        s["D_1'2"] * s["D_3'2"]
    )

    zzx_1 = (
        s["J_32"] / s["D_32"] * s["J_13"] / s["D_12"]
        - s["J_32"] / s["D_32"] * s["J_1'3"] / s["D_1'2"]
        - s["J_3'2"] / s["D_3'2"] * s["J_13'"] / s["D_12"]
        + s["J_3'2"] / s["D_3'2"] * s["J_1'3'"] / s["D_1'2"]
    )
    zzx_3 = (
        s["J_12"] / s["D_12"] * s["J_13"] / s["D_32"]
        - s["J_12"] / s["D_12"] * s["J_13'"] / s["D_3'2"]
        - s["J_1'2"] / s["D_1'2"] * s["J_1'3"] / s["D_32'"]
        + s["J_1'2"] / s["D_1'2"] * s["J_1'3'"] / s["D_3'2"]
    )
    return {
        "ZI": (zix_1, zix_2, zix_3),
        "IZ": (izx_1, izx_2, izx_3),
        "IIX": (iix_1, iix_3),
        "ZZ": (zzx_1, zzx_3),
    }


def perturbative_coefficients(inputs: PerturbativeInputs) -> PauliCoefficients:
    """The eight drive induced weights (Hz). Static words are not provided."""
    b = _brackets(inputs.symbols())
    om1, om2, om3 = inputs.drive.amplitudes
    ph1, ph2, ph3 = inputs.drive.phases
    alpha = {}
    for letter, trig in (("X", np.cos), ("Y", np.sin)):
        c1, c2, c3 = om1 * trig(ph1), om2 * trig(ph2), om3 * trig(ph3)
        zi_1, zi_2, zi_3 = b["ZI"]
        alpha["ZI" + letter] = 0.5 * (c1 * zi_1 + c3 * zi_3) + c2 / 4 * zi_2
        iz_1, iz_2, iz_3 = b["IZ"]
        alpha["IZ" + letter] = 0.5 * (c3 * iz_3 + c1 * iz_1) + c2 / 4 * iz_2
        ii_1, ii_3 = b["IIX"]
        alpha["II" + letter] = 0.5 * (c2 - c1 * ii_1 - c3 * ii_3)
        zz_1, zz_3 = b["ZZ"]
        alpha["ZZ" + letter] = c1 / 2 * zz_1 + c3 / 2 * zz_3
    return PauliCoefficients(alpha, {"source": "perturbative"})


def per_qubit_response(table, reference_amplitude, phases=(0.0, 0.0, 0.0)):
    """Weights for A = e_1, e_2, e_3 - by linearity alpha(A) = sum_j A_j response[j]"""
    result = []
    for j in range(3):
        scale = [0.0, 0.0, 0.0]
        scale[j] = 1.0
        drive = DriveSpec(tuple(scale), reference_amplitude, phases)
        result.append(perturbative_coefficients(PerturbativeInputs(table, drive)))
    return result


def load_seed_table(path=None):
    path = Path(path) if path is not None else SEED_TABLE_PATH
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, ValueError) as e:
        raise ConfigurationError(f"Could not read seed table {path}: {e}")
    unknown = set(data) - {"description", "bounds", "seeds"}
    if unknown:
        raise ConfigurationError(f"Unknown keys in seed table {path}: {sorted(unknown)}")
    return data


def curated_seed(seed_table, target_name, cell_index):
    if seed_table is None or cell_index is None:
        return None
    for entry in seed_table.get("seeds", []):
        if (
            TargetName.parse(entry["target"]) is target_name
            and int(entry["cell"]) == int(cell_index)
        ):
            return np.array(
                list(entry["coupler_freqs_ghz"]) + list(entry["scale_factors"]), dtype=float
            )
    return None


SEED_GRID_STEP_GHZ = 0.025
SEED_SCALE_VALUES = (-1.5, -1.0, -0.5, -0.25, 0.25, 0.5, 1.0, 1.5)


def seed_parameters(
    target,
    spec: CircuitSpec,
    bounds: ParameterBounds = None,
    cell_index=None,
    seed_table=None,
    reference_amplitude=60e6,
):
    """Initial (w_C12 GHz, w_C23 GHz, A1, A2, A3).

    A curated seed for (target, cell) is returned verbatim, otherwise a coarse
    grid over the coupler frequencies picks the largest positive closed form
    alpha_ZZX whose wanted words carry the target's signs."""
    if bounds is None:
        bounds = ParameterBounds.default()
    seed = curated_seed(seed_table, target.name, cell_index)
    if seed is not None:
        log_info(f"Using curated seed for {target.name.value} cell {cell_index}")
        return seed

    lo, hi = bounds.lower, bounds.upper
    grid_12 = np.arange(lo[0], hi[0] + 1e-9, SEED_GRID_STEP_GHZ)
    grid_23 = np.arange(lo[1], hi[1] + 1e-9, SEED_GRID_STEP_GHZ)
    scales = np.array([s for s in SEED_SCALE_VALUES if lo[2] <= s <= hi[2] and lo[4] <= s <= hi[4]])
    A1, A3 = np.meshgrid(scales, scales, indexing="ij")
    diagnostics = {"not_dispersive": 0, "resonant": 0, "sign_mismatch": 0, "evaluated": 0}
    best = None
    for c12 in grid_12:
        for c23 in grid_23:
            candidate = spec.with_couplers((c12 * 1e9, c23 * 1e9))
            if candidate.diagnostics:
                diagnostics["not_dispersive"] += 1
                continue
            try:
                table = dressed_table(candidate)
                r1, _, r3 = per_qubit_response(table, reference_amplitude)
            except ResonanceError:
                diagnostics["resonant"] += 1
                continue
            diagnostics["evaluated"] += 1
            alphas = {
                w: A1 * r1.get(w) + A3 * r3.get(w) for w in ("ZZX", "ZIX", "IZX", "IIX")
            }
            ok = alphas["ZZX"] > 0
            for word, value, _ in target.wanted:
                if word in alphas and word != target.anchor:
                    ok &= np.sign(alphas[word]) == np.sign(value)
            if not ok.any():
                diagnostics["sign_mismatch"] += 1
                continue
            score = np.where(ok, alphas["ZZX"], -np.inf)
            ii, kk = np.unravel_index(np.argmax(score), score.shape)
            if best is None or score[ii, kk] > best[0]:
                best = (score[ii, kk], c12, c23, A1[ii, kk], A3[ii, kk])
    if best is None:
        raise SeedingError(
            f"No coupler setting in bounds gives a {target.name.value} compatible closed form (dispersive ratio <= {DISPERSIVE_ADVISORY_RATIO})",
            diagnostics,
        )
    _, c12, c23, a1, a3 = best
    log_debug(f"Grid seed for {target.name.value}: {best}, {diagnostics}")
    return np.array([c12, c23, a1, 0.0, a3])
