"""Three transmons + two harmonic couplers.

Mode order throughout: Q1, Q2, Q3, C12, C23 (qubit index 0..2, coupler index 0..1).
User facing frequencies are in Hz, Hamiltonian matrices in rad/s.
"""
import dataclasses
import functools
import re
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
import scipy.linalg
import scipy.optimize

from . import boson_algebra as ba
from .enums import ModeKind
from .exceptions import ConfigurationError, ResonanceError
from .util import log_debug, log_warning

TWO_PI = 2 * np.pi
QUBIT_LABELS = ("Q1", "Q2", "Q3")
COUPLER_LABELS = ("C12", "C23")
# which qubits each coupler touches
COUPLER_QUBITS = ((0, 1), (1, 2))
QUBIT_PAIRS = ((0, 1), (1, 2), (0, 2))

DISPERSIVE_ADVISORY_RATIO = 0.2
MIN_DETUNING_HZ = 1e3
DRESSED_LEVELS = 4  # E(0..3), transitions w(0..2)


def _triple(values, name):
    values = tuple(float(x) for x in values)
    if len(values) != 3:
        raise ConfigurationError(f"{name} needs 3 values, got {len(values)}")
    return values


def _pair(values, name):
    values = tuple(float(x) for x in values)
    if len(values) != 2:
        raise ConfigurationError(f"{name} needs 2 values, got {len(values)}")
    return values


@dataclass(frozen=True)
class CircuitSpec:
    """Bare circuit parameters of one unit cell, all in Hz / seconds.

    qubit_coupler_couplings[j][r] is g_{j,C_r}; direct_couplings holds
    (g_12, g_23, g_13)."""

    qubit_freqs: Tuple[float, float, float]
    anharmonicities: Tuple[float, float, float]
    coupler_freqs: Tuple[float, float]
    qubit_coupler_couplings: Tuple[Tuple[float, float], ...]
    direct_couplings: Tuple[float, float, float]
    t1: Tuple[float, float, float] = (np.inf, np.inf, np.inf)
    t2: Tuple[float, float, float] = (np.inf, np.inf, np.inf)
    labels: Tuple[str, str, str] = QUBIT_LABELS
    diagnostics: Tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        object.__setattr__(self, "qubit_freqs", _triple(self.qubit_freqs, "qubit_freqs"))
        object.__setattr__(
            self, "anharmonicities", _triple(self.anharmonicities, "anharmonicities")
        )
        object.__setattr__(
            self, "coupler_freqs", _pair(self.coupler_freqs, "coupler_freqs")
        )
        object.__setattr__(
            self, "direct_couplings", _triple(self.direct_couplings, "direct_couplings")
        )
        object.__setattr__(self, "t1", _triple(self.t1, "t1"))
        object.__setattr__(self, "t2", _triple(self.t2, "t2"))
        g = tuple(_pair(row, "qubit_coupler_couplings row") for row in self.qubit_coupler_couplings)
        if len(g) != 3:
            raise ConfigurationError("qubit_coupler_couplings needs one row per qubit")
        object.__setattr__(self, "qubit_coupler_couplings", g)
        object.__setattr__(self, "labels", tuple(str(x) for x in self.labels))
        if min(self.qubit_freqs) <= 0 or min(self.coupler_freqs) <= 0:
            raise ConfigurationError("All frequencies must be positive")
        if min(abs(x) for x in self.anharmonicities) == 0:
            raise ConfigurationError("Qubit anharmonicities must be non-zero")
        advisories = tuple(self.dispersive_advisories())
        object.__setattr__(self, "diagnostics", advisories)
        for a in advisories:
            log_debug(a)

    @classmethod
    def nearest_neighbour(
        cls,
        qubit_freqs,
        anharmonicities,
        coupler_freqs,
        g_qc=90e6,
        g_qq=9e6,
        g_13=9e6,
        **kwargs,
    ):
        """Q1-C12, Q2-C12, Q2-C23 and Q3-C23 coupled with g_qc, distant pairs zero."""
        g = ((g_qc, 0.0), (g_qc, g_qc), (0.0, g_qc))
        return cls(
            qubit_freqs,
            anharmonicities,
            coupler_freqs,
            g,
            (g_qq, g_qq, g_13),
            **kwargs,
        )

    def with_couplers(self, coupler_freqs):
        return dataclasses.replace(self, coupler_freqs=tuple(coupler_freqs))

    def with_qubit_freq(self, qubit_index, freq):
        freqs = list(self.qubit_freqs)
        freqs[qubit_index] = freq
        return dataclasses.replace(self, qubit_freqs=tuple(freqs))

    def g_qc(self, qubit, coupler):
        return self.qubit_coupler_couplings[qubit][coupler]

    def g_qq(self, i, j):
        i, j = sorted((i, j))
        return self.direct_couplings[QUBIT_PAIRS.index((i, j))]

    def dispersive_advisories(self):
        result = []
        for j in range(3):
            for r in range(2):
                g = self.g_qc(j, r)
                if g == 0:
                    continue
                detuning = abs(self.coupler_freqs[r] - self.qubit_freqs[j])
                ratio = abs(g) / detuning if detuning > 0 else np.inf
                if ratio > DISPERSIVE_ADVISORY_RATIO:
                    result.append(
                        f"{self.labels[j]}-{COUPLER_LABELS[r]}: g/|w_C - w_q| = {ratio:.3f} > {DISPERSIVE_ADVISORY_RATIO} (outside the dispersive regime)"
                    )
        return result


@dataclass(frozen=True)
class DriveSpec:
    """Drive amplitudes Omega_j = A_j * Omega (Hz), phases (rad), common drive frequency (Hz).

    drive_freq None means 'the dressed Q2 frequency' (resolved by frame_frequency)."""

    scale_factors: Tuple[float, float, float]
    reference_amplitude: float = 60e6
    phases: Tuple[float, float, float] = (0.0, 0.0, 0.0)
    drive_freq: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "scale_factors", _triple(self.scale_factors, "scale_factors"))
        object.__setattr__(self, "phases", _triple(self.phases, "phases"))
        object.__setattr__(self, "reference_amplitude", float(self.reference_amplitude))

    @classmethod
    def from_amplitudes(cls, amplitudes, phases=(0.0, 0.0, 0.0), drive_freq=None, reference_amplitude=None):
        amplitudes = _triple(amplitudes, "amplitudes")
        if reference_amplitude is None:
            reference_amplitude = max(abs(x) for x in amplitudes) or 1.0
        return cls(
            tuple(a / reference_amplitude for a in amplitudes),
            reference_amplitude,
            phases,
            drive_freq,
        )

    @property
    def amplitudes(self):
        return tuple(a * self.reference_amplitude for a in self.scale_factors)

    def with_reference_amplitude(self, omega):
        return dataclasses.replace(self, reference_amplitude=float(omega))

    def phase_calibrated(self, atol=1e-12):
        """All phases in {0, pi}?"""
        return all(
            min(abs(np.angle(np.exp(1j * p))), abs(abs(np.angle(np.exp(1j * p))) - np.pi))
            <= atol
            for p in self.phases
        )


def standard_modes(qubit_local_dim=16, coupler_local_dim=16):
    return [ba.ModeSpec(x, ModeKind.Qubit, qubit_local_dim) for x in QUBIT_LABELS] + [
        ba.ModeSpec(x, ModeKind.Coupler, coupler_local_dim) for x in COUPLER_LABELS
    ]


@functools.lru_cache(maxsize=8)
def standard_basis(max_total_excitation=4):
    return ba.build_basis(standard_modes(), max_total_excitation)


def _check_basis(basis):
    kinds = [m.kind for m in basis.modes]
    expected = [ModeKind.Qubit] * 3 + [ModeKind.Coupler] * 2
    if kinds != expected:
        raise ConfigurationError(
            "Basis mode order must be (Q1, Q2, Q3, C12, C23) - qubits first, then both couplers"
        )


@functools.lru_cache(maxsize=8)
def _ops(basis):
    lower = [ba.lowering(basis, ii) for ii in range(basis.n_modes)]
    return lower, [x.dag() for x in lower]


def _quadrature_product(bi, bi_dag, bj, bj_dag):
    """(b_i - b_i^dag)(b_j - b_j^dag) for distinct modes, normal ordered so truncation
    keeps it hermitian: b_i b_j - b_j^dag b_i - b_i^dag b_j + b_i^dag b_j^dag"""
    return bi @ bj - bj_dag @ bi - bi_dag @ bj + bi_dag @ bj_dag


def _exchange(bi, bi_dag, bj, bj_dag):
    return bi_dag @ bj + bj_dag @ bi


def _bare_diagonal(spec, basis):
    def energy(occ):
        e = 0.0
        for j in range(3):
            n = occ[j]
            e += n * spec.qubit_freqs[j] + n * (n - 1) * spec.anharmonicities[j] / 2
        for r in range(2):
            e += occ[3 + r] * spec.coupler_freqs[r]
        return TWO_PI * e

    return ba.diagonal_op(basis, energy)


def build_system_hamiltonian(spec: CircuitSpec, basis: ba.ProductBasis) -> ba.OperatorMatrix:
    """Lab frame circuit Hamiltonian with the full (non-RWA) couplings.

    The direct qubit-qubit term enters with the sign that gives it the exchange
    part +g_ij (b_i^dag b_j + h.c.); the coupler terms give -g (b^dag a + h.c.).
    This is the sign structure under which direct and coupler-mediated exchange
    partially cancel, as the effective coupling formula assumes."""
    _check_basis(basis)
    lower, raise_ = _ops(basis)
    H = _bare_diagonal(spec, basis)
    for j in range(3):
        for r in range(2):
            g = spec.g_qc(j, r)
            if g:
                H = H + TWO_PI * g * _quadrature_product(
                    lower[j], raise_[j], lower[3 + r], raise_[3 + r]
                )
    for (i, j), g in zip(QUBIT_PAIRS, spec.direct_couplings):
        if g:
            H = H - TWO_PI * g * _quadrature_product(lower[i], raise_[i], lower[j], raise_[j])
    return H


def build_rwa_system_hamiltonian(spec: CircuitSpec, basis: ba.ProductBasis) -> ba.OperatorMatrix:
    """build_system_hamiltonian with only the excitation conserving coupling terms"""
    _check_basis(basis)
    lower, raise_ = _ops(basis)
    H = _bare_diagonal(spec, basis)
    for j in range(3):
        for r in range(2):
            g = spec.g_qc(j, r)
            if g:
                H = H - TWO_PI * g * _exchange(lower[j], raise_[j], lower[3 + r], raise_[3 + r])
    for (i, j), g in zip(QUBIT_PAIRS, spec.direct_couplings):
        if g:
            H = H + TWO_PI * g * _exchange(lower[i], raise_[i], lower[j], raise_[j])
    return H


def build_drive_hamiltonian(drive: DriveSpec, basis: ba.ProductBasis, t: float) -> ba.OperatorMatrix:
    """Lab frame H_dr(t) = sum_j Omega_j cos(w_dr t + phi_j)(b_j + b_j^dag)"""
    _check_basis(basis)
    if drive.drive_freq is None:
        raise ConfigurationError("The lab frame drive needs an explicit drive_freq")
    lower, raise_ = _ops(basis)
    H = ba.OperatorMatrix(basis, np.zeros((basis.dim, basis.dim), dtype=complex))
    for j, (omega, phi) in enumerate(zip(drive.amplitudes, drive.phases)):
        if omega:
            H = H + TWO_PI * omega * np.cos(TWO_PI * drive.drive_freq * t + phi) * (
                lower[j] + raise_[j]
            )
    return H


def frame_frequency(spec: CircuitSpec, drive: DriveSpec, table=None) -> float:
    """drive.drive_freq, or the dressed Q2 transition when it is left open"""
    if drive.drive_freq is not None:
        return drive.drive_freq
    if table is None:
        table = dressed_table(spec)
    return float(table.transitions[1, 0])


def rotating_frame_rwa(
    spec: CircuitSpec, drive: DriveSpec, basis: ba.ProductBasis, table=None
) -> ba.OperatorMatrix:
    """Time independent Hamiltonian in the frame rotating at w_dr for every mode.

    H_rot = H_sys^RWA - w_dr N + sum_j (Omega_j/2)(e^{i phi_j} b_j + e^{-i phi_j} b_j^dag)

    w_dr comes from frame_frequency."""
    _check_basis(basis)
    drive_freq = frame_frequency(spec, drive, table)
    lower, raise_ = _ops(basis)
    H = build_rwa_system_hamiltonian(spec, basis)
    H = H - TWO_PI * drive_freq * ba.total_number_op(basis)
    for j, (omega, phi) in enumerate(zip(drive.amplitudes, drive.phases)):
        if omega:
            H = H + (TWO_PI * omega / 2) * (
                np.exp(1j * phi) * lower[j] + np.exp(-1j * phi) * raise_[j]
            )
    return H


_SYMBOL_RE = re.compile(r"^(?:\((\d)(\d)\)('*)|(\d)('*)(\d)('*))$")


@dataclass(frozen=True)
class DressedTable:
    """Closed form dressed quantities, all in Hz.

    energies[j, n] = E_j(n), transitions[j, n] = E_j(n+1) - E_j(n),
    coupler_detunings[r, j, n] = w_Cr - w_j - n delta_j (nan where C_r does not touch Q_j).

    Symbols follow an overline convention written with apostrophes:
    'J_1\\'2' is J with qubit 1 one level up, 'J_12\\'' with qubit 2 one level up,
    'J_(13)\\'' the grouped overline, 'D_1\\'\\'2' the detuning using w_1(2)."""

    spec: CircuitSpec
    energies: np.ndarray
    transitions: np.ndarray
    coupler_detunings: np.ndarray

    def coupling(self, i, j, m, n):
        """Effective exchange between Q_i in level m and Q_j in level n (0-based indices)"""
        spec = self.spec
        J = spec.g_qq(i, j)
        for r in range(2):
            gi = spec.g_qc(i, r)
            gj = spec.g_qc(j, r)
            if gi and gj:
                J -= gi * gj / 2 * (
                    1 / self.coupler_detunings[r, i, m] + 1 / self.coupler_detunings[r, j, n]
                )
        return J

    def detuning(self, i, level_i, j, level_j):
        return self.transitions[i, level_i] - self.transitions[j, level_j]

    @staticmethod
    def parse_symbol(name):
        """'J_1\\'2' -> ('J', i, level_i, j, level_j) with 0-based qubit indices"""
        kind, _, rest = name.partition("_")
        if kind not in ("J", "D"):
            raise KeyError(name)
        match = _SYMBOL_RE.match(rest)
        if not match:
            raise KeyError(name)
        if match.group(1):
            if kind != "J" or len(match.group(3)) != 1:
                raise KeyError(name)
            i, j = int(match.group(1)), int(match.group(2))
            li = lj = 2
        else:
            i, j = int(match.group(4)), int(match.group(6))
            li, lj = len(match.group(5)), len(match.group(7))
        if not (1 <= i <= 3 and 1 <= j <= 3) or i == j:
            raise KeyError(name)
        return kind, i - 1, li, j - 1, lj

    def symbol(self, name):
        kind, i, li, j, lj = self.parse_symbol(name)
        if kind == "J":
            return self.coupling(i, j, li, lj)
        return self.detuning(i, li, j, lj)

    def as_dict(self):
        return {
            "energies_hz": self.energies.tolist(),
            "transitions_hz": self.transitions.tolist(),
        }


def dressed_table(spec: CircuitSpec) -> DressedTable:
    coupler_detunings = np.full((2, 3, DRESSED_LEVELS), np.nan)
    for r in range(2):
        for j in range(3):
            if spec.g_qc(j, r) == 0:
                continue
            for n in range(DRESSED_LEVELS):
                d = spec.coupler_freqs[r] - spec.qubit_freqs[j] - n * spec.anharmonicities[j]
                if n < DRESSED_LEVELS - 1 and abs(d) < MIN_DETUNING_HZ:
                    raise ResonanceError(
                        f"{COUPLER_LABELS[r]} is resonant with {spec.labels[j]} level {n}->{n + 1} (|detuning| = {abs(d):.1f} Hz)"
                    )
                coupler_detunings[r, j, n] = d
    energies = np.zeros((3, DRESSED_LEVELS))
    for j in range(3):
        for n in range(DRESSED_LEVELS):
            e = n * spec.qubit_freqs[j] + n * (n - 1) * spec.anharmonicities[j] / 2
            if n > 0:
                for r in range(2):
                    g = spec.g_qc(j, r)
                    if g:
                        e -= g**2 * n / coupler_detunings[r, j, n - 1]
            energies[j, n] = e
    transitions = np.diff(energies, axis=1)
    return DressedTable(spec, energies, transitions, coupler_detunings)


def numeric_exchange_coupling(spec: CircuitSpec, i: int, j: int, max_total_excitation=3, window=100e6):
    """Half the minimal splitting of the dressed |1_i> / |1_j> levels of the full H_sys,
    sweeping the bare frequency of Q_i through the resonance with Q_j.

    Returns (half_gap_hz, qubit_i_freq_at_crossing_hz)."""
    basis = standard_basis(max_total_excitation)
    occ_i = [0] * 5
    occ_i[i] = 1
    occ_j = [0] * 5
    occ_j[j] = 1
    idx = [basis.index_of(occ_i), basis.index_of(occ_j)]

    def gap(freq):
        H = build_system_hamiltonian(spec.with_qubit_freq(i, freq), basis).entries
        evals, evecs = scipy.linalg.eigh(H)
        weight = np.sum(np.abs(evecs[idx, :]) ** 2, axis=0)
        top = np.argsort(weight)[-2:]
        return abs(evals[top[0]] - evals[top[1]]) / TWO_PI

    center = spec.qubit_freqs[j]
    res = scipy.optimize.minimize_scalar(
        gap,
        bounds=(center - window, center + window),
        method="bounded",
        options={"xatol": 1.0},
    )
    if not res.success:  # pragma: no cover
        log_warning(f"avoided crossing search did not converge: {res.message}")
    return res.fun / 2, res.x
