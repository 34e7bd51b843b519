"""Pulse level simulation of the synthesized gates on the 8 dim effective model.

Density matrices are vectorized column-stacked, vec(A rho B) = (B^T kron A) vec(rho).
Hamiltonians are in rad/s, times in seconds, Pauli weights and amplitudes in Hz.
"""
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
import scipy.integrate
import scipy.linalg
from scipy.special import erf

from . import gate_logic as gl
from .boson_algebra import pauli_word
from .circuit_model import DriveSpec
from .effective_hamiltonian import ANSATZ_WORDS, PAULI_MODE_ORDER, coefficients_for
from .enums import EdgeShape, SegmentKind, TargetName
from .exceptions import ConfigurationError, NumericError, PCRException, SweepFailed
from .util import log_debug, log_info, log_warning

DIM = 8
TAU_SINGLE = 30e-9
T_EDGE = 10e-9
MIN_ZZX_HZ = 1.0
TRACE_TOLERANCE = 1e-9
TRACE_LOSS_LIMIT = 1e-6
POSITIVITY_FLOOR = -1e-9
ODE_RTOL = 1e-10
ODE_ATOL = 1e-12

SIGMA_MINUS = np.array([[0, 1], [0, 0]], dtype=complex)
NUMBER = np.array([[0, 0], [0, 1]], dtype=complex)


@dataclass(frozen=True)
class NoiseModel:
    """Per qubit T1/T2 in seconds, physical order (Q1, Q2, Q3). inf disables a channel."""

    t1: Tuple[float, float, float] = (np.inf, np.inf, np.inf)
    t2: Tuple[float, float, float] = (np.inf, np.inf, np.inf)

    def __post_init__(self):
        t1 = tuple(float(x) for x in self.t1)
        t2 = tuple(float(x) for x in self.t2)
        if len(t1) != 3 or len(t2) != 3:
            raise ConfigurationError("NoiseModel needs three T1 and three T2 values")
        for ii, (a, b) in enumerate(zip(t1, t2)):
            if a <= 0 or b <= 0:
                raise ConfigurationError(f"Coherence times must be positive (Q{ii + 1})")
            if b > 2 * a:
                raise ConfigurationError(f"T2 > 2 T1 for Q{ii + 1}: {b} > 2 * {a}")
        object.__setattr__(self, "t1", t1)
        object.__setattr__(self, "t2", t2)

    @classmethod
    def from_spec(cls, spec):
        return cls(spec.t1, spec.t2)

    @classmethod
    def uniform(cls, t1, t2):
        return cls((t1,) * 3, (t2,) * 3)

    @property
    def is_noiseless(self):
        return all(np.isinf(x) for x in self.t1 + self.t2)

    def dephasing_rates(self):
        """1/T_phi = 1/T2 - 1/(2 T1) per physical qubit"""
        return tuple(max(1 / b - 1 / (2 * a), 0.0) for a, b in zip(self.t1, self.t2))

    def collapse_operators(self):
        """sqrt(1/T1) sigma^- and sqrt(2/T_phi) n on the logical ordering of the 8 dim space"""
        ops = []
        rates_phi = self.dephasing_rates()
        for logical, physical in enumerate(PAULI_MODE_ORDER, start=1):
            if np.isfinite(self.t1[physical]):
                ops.append(np.sqrt(1 / self.t1[physical]) * gl.on_qubit(SIGMA_MINUS, logical))
            if rates_phi[physical] > 0:
                ops.append(np.sqrt(2 * rates_phi[physical]) * gl.on_qubit(NUMBER, logical))
        return ops


def liouvillian(H, collapse_ops):
    d = len(H)
    eye = np.eye(d)
    L = -1j * (np.kron(eye, H) - np.kron(H.T, eye))
    for c in collapse_ops:
        cdc = c.conj().T @ c
        L += np.kron(c.conj(), c) - 0.5 * np.kron(eye, cdc) - 0.5 * np.kron(cdc.T, eye)
    return L


def vec(rho):
    return np.asarray(rho).reshape(-1, order="F")


def unvec(v, d=DIM):
    return np.asarray(v).reshape((d, d), order="F")


def unitary_superoperator(U):
    return np.kron(U.conj(), U)


def check_density_matrix(rho, where="", trace_limit=TRACE_LOSS_LIMIT):
    """Unit trace and no eigenvalue below POSITIVITY_FLOOR, else NumericError"""
    trace = np.trace(rho).real
    if abs(trace - 1) > trace_limit:
        raise NumericError(f"Trace lost {where}: Tr(rho) = {trace:.12f}")
    herm = (rho + rho.conj().T) / 2
    lowest = np.linalg.eigvalsh(herm).min()
    if lowest < POSITIVITY_FLOOR:
        raise NumericError(f"Density matrix not positive {where}: smallest eigenvalue {lowest:.3e}")
    return trace


@dataclass
class LindbladTrajectory:
    times: np.ndarray
    states: List[np.ndarray]
    nfev: int = 0

    @property
    def final(self):
        return self.states[-1]


def evolve_lindblad(H_of_t, noise, rho0, t_grid, rtol=ODE_RTOL, atol=ODE_ATOL):
    """Integrate the master equation over t_grid (adaptive DOP853).

    H_of_t(t) returns the Hamiltonian (rad/s); noise is a NoiseModel (or an
    explicit list of collapse operators)."""
    rho0 = np.asarray(rho0, dtype=complex)
    d = len(rho0)
    if noise is None:
        collapse = []
    elif isinstance(noise, NoiseModel):
        collapse = noise.collapse_operators()
    else:
        collapse = [np.asarray(c, dtype=complex) for c in noise]
    dissipators = [(c, c.conj().T, c.conj().T @ c) for c in collapse]
    t_grid = np.asarray(t_grid, dtype=float)

    def rhs(t, y):
        rho = y.reshape((d, d), order="F")
        H = H_of_t(t)
        drho = -1j * (H @ rho - rho @ H)
        for c, cd, cdc in dissipators:
            drho += c @ rho @ cd - 0.5 * (cdc @ rho + rho @ cdc)
        return drho.reshape(-1, order="F")

    if len(t_grid) < 2 or t_grid[-1] == t_grid[0]:
        check_density_matrix(rho0, "at the start", TRACE_TOLERANCE)
        return LindbladTrajectory(t_grid, [rho0.copy() for _ in t_grid])
    sol = scipy.integrate.solve_ivp(
        rhs,
        (t_grid[0], t_grid[-1]),
        vec(rho0),
        method="DOP853",
        t_eval=t_grid,
        rtol=rtol,
        atol=atol,
    )
    if not sol.success:
        raise NumericError(
            f"Lindblad integration failed: {sol.message} (nfev={sol.nfev}, t reached {sol.t[-1] if len(sol.t) else t_grid[0]:.3e})"
        )
    states = [unvec(sol.y[:, ii], d) for ii in range(sol.y.shape[1])]
    for t, rho in zip(sol.t, states):
        check_density_matrix(rho, f"at t={t:.3e} (nfev={sol.nfev})", TRACE_TOLERANCE)
    return LindbladTrajectory(sol.t, states, sol.nfev)


# envelopes ------------------------------------------------------------------


def _edge_area_fraction(shape: EdgeShape):
    """Integral of one edge of length e, divided by e"""
    if shape is EdgeShape.Cosine:
        return 0.5
    sigma_frac = 0.25
    c = np.exp(-1 / (2 * sigma_frac**2))
    gauss = sigma_frac * np.sqrt(np.pi / 2) * erf(1 / (sigma_frac * np.sqrt(2)))
    return (gauss - c) / (1 - c)


@dataclass(frozen=True)
class PulseEnvelope:
    """Flat top pulse of total duration tau with rise and fall edges of length edge"""

    tau: float
    edge: float
    shape: EdgeShape = EdgeShape.Cosine

    def __post_init__(self):
        object.__setattr__(self, "shape", EdgeShape(self.shape))
        if self.edge < 0 or self.tau < 2 * self.edge:
            raise ConfigurationError(f"Pulse of {self.tau} s can not hold two {self.edge} s edges")

    @classmethod
    def for_area(cls, area, t_edge=T_EDGE, shape=EdgeShape.Cosine):
        """Shortest envelope with the requested integral (edges shrink for tiny areas)"""
        shape = EdgeShape(shape)
        k = _edge_area_fraction(shape)
        edge = min(t_edge, area / (2 * k))
        flat = max(area - 2 * k * edge, 0.0)
        return cls(flat + 2 * edge, edge, shape)

    @property
    def flat(self):
        return self.tau - 2 * self.edge

    def area(self):
        return self.flat + 2 * self.edge * _edge_area_fraction(self.shape)

    def _edge_value(self, s):
        """rising edge at s in [0, edge]"""
        if self.shape is EdgeShape.Cosine:
            return 0.5 * (1 - np.cos(np.pi * s / self.edge))
        sigma = self.edge / 4
        c = np.exp(-(self.edge**2) / (2 * sigma**2))
        return (np.exp(-((s - self.edge) ** 2) / (2 * sigma**2)) - c) / (1 - c)

    def __call__(self, t):
        if t <= 0 or t >= self.tau:
            return 0.0
        if t < self.edge:
            return float(self._edge_value(t))
        if t > self.tau - self.edge:
            return float(self._edge_value(self.tau - t))
        return 1.0


@dataclass(frozen=True)
class Segment:
    kind: SegmentKind
    duration: float
    label: str = ""
    gate: Optional[np.ndarray] = None
    envelope: Optional[PulseEnvelope] = None


@dataclass
class PulseSchedule:
    segments: List[Segment] = field(default_factory=list)

    @property
    def duration(self):
        return sum(s.duration for s in self.segments)

    def gate(self, label, unitary, idle=TAU_SINGLE):
        """instantaneous gate followed by a decoherence-only idle"""
        self.segments.append(Segment(SegmentKind.SingleQubitGate, 0.0, label, gate=unitary))
        if idle > 0:
            self.segments.append(Segment(SegmentKind.Idle, idle, "idle"))

    def pulse(self, envelope):
        self.segments.append(Segment(SegmentKind.PCRPulse, envelope.tau, "pcr", envelope=envelope))


@dataclass
class SimulationResult:
    target: TargetName
    final_state: np.ndarray
    fidelity: float
    duration: float
    tau: float
    drive_amplitude: Optional[float]
    schedule: PulseSchedule
    propagator: Optional[np.ndarray] = None
    curve: Optional[List[Tuple[float, Optional[float]]]] = None
    phase_flipped: bool = False

    def as_dict(self):
        return {
            "target": self.target.value,
            "fidelity": self.fidelity,
            "duration_s": self.duration,
            "tau_s": self.tau,
            "drive_amplitude_hz": self.drive_amplitude,
            "phase_flipped": self.phase_flipped,
            "curve": self.curve,
        }


# fidelity metrics -----------------------------------------------------------


def average_gate_fidelity(U_ref, U):
    d = len(U)
    return float((abs(np.trace(U_ref.conj().T @ U)) ** 2 + d) / (d * (d + 1)))


def probe_states():
    """8 computational, 8 products of |+>,|+i>, GHZ+-, GHZ with i phase, W"""
    plus = np.array([1, 1], dtype=complex) / np.sqrt(2)
    plus_i = np.array([1, 1j], dtype=complex) / np.sqrt(2)
    states = [gl.basis_state([(k >> 2) & 1, (k >> 1) & 1, k & 1]) for k in range(8)]
    for k in range(8):
        factors = [plus_i if (k >> (2 - q)) & 1 else plus for q in range(3)]
        states.append(np.kron(np.kron(factors[0], factors[1]), factors[2]))
    s = 1 / np.sqrt(2)
    for phase in (1, -1, 1j):
        psi = np.zeros(8, dtype=complex)
        psi[0], psi[7] = s, s * phase
        states.append(psi)
    w = np.zeros(8, dtype=complex)
    w[[1, 2, 4]] = 1 / np.sqrt(3)
    states.append(w)
    return states


# protocol -------------------------------------------------------------------


ROTATION_ANGLE = {
    TargetName.GHZ: np.pi / 2,
    TargetName.iToffoli: np.pi / 4,
    TargetName.CCNOT: np.pi / 4,
    TargetName.CZZ: np.pi / 2,
}


def split_hamiltonian(coeffs):
    """(H_static, H_drive) in rad/s from the ansatz words (III dropped)"""
    H_static = np.zeros((DIM, DIM), dtype=complex)
    H_drive = np.zeros((DIM, DIM), dtype=complex)
    for w in ANSATZ_WORDS:
        if w == "III" or w not in coeffs:
            continue
        term = 2 * np.pi * coeffs[w] * pauli_word(w)
        if w[2] in "XY":
            H_drive += term
        else:
            H_static += term
    return H_static, H_drive


def required_area(theta, alpha_zzx):
    """seconds of full amplitude needed for U_ZZX(theta)"""
    if abs(alpha_zzx) < MIN_ZZX_HZ:
        raise NumericError(f"alpha_ZZX = {alpha_zzx:.3g} Hz is too small to reach a rotation")
    return theta / (4 * np.pi * abs(alpha_zzx))


def _calibrated_control_rotation(target, coeffs, envelope):
    """Z rotations on the controls that bring ZII and IZI to their CCNOT values"""
    ideal = gl.CCNOT_WEIGHTS
    result = np.eye(DIM, dtype=complex)
    for word in target.compensated:
        actual = 2 * np.pi * coeffs.get(word) * envelope.tau
        missing = ideal.get(word, 0.0) - actual
        result = result @ scipy.linalg.expm(-1j * missing * pauli_word(word))
    return result


def build_schedule(target, coeffs, envelope, tau_single=TAU_SINGLE):
    s = PulseSchedule()
    H1 = gl.on_qubit(gl.HADAMARD, 1)
    H2 = gl.on_qubit(gl.HADAMARD, 2)
    H3 = gl.on_qubit(gl.HADAMARD, 3)
    name = target.name
    if name is TargetName.GHZ:
        s.gate("H1 H2", H1 @ H2, tau_single)
        s.pulse(envelope)
        s.gate("S3 H1 H2", gl.on_qubit(gl.S_GATE, 3) @ H1 @ H2, tau_single)
    elif name is TargetName.iToffoli:
        s.pulse(envelope)
    elif name is TargetName.CCNOT:
        s.pulse(envelope)
        s.gate("Rz controls", _calibrated_control_rotation(target, coeffs, envelope), tau_single)
    elif name is TargetName.CZZ:
        s.gate("H3", H3, tau_single)
        s.pulse(envelope)
        s.gate("S1dg H3", gl.on_qubit(gl.S_DAG, 1) @ H3, tau_single)
    else:  # pragma: no cover
        raise ConfigurationError(f"No protocol for {name}")
    return s


def _commute(A, B):
    scale = max(np.linalg.norm(A) * np.linalg.norm(B), 1.0)
    return np.linalg.norm(A @ B - B @ A) <= 1e-12 * scale


def _pulse_unitary(H_static, H_drive, envelope):
    if _commute(H_static, H_drive):
        return scipy.linalg.expm(-1j * (H_static * envelope.tau + H_drive * envelope.area()))
    U = np.eye(DIM, dtype=complex)
    pieces = [
        (0.0, envelope.edge),
        (envelope.edge, envelope.tau - envelope.edge),
        (envelope.tau - envelope.edge, envelope.tau),
    ]
    for ii, (t0, t1) in enumerate(pieces):
        if t1 <= t0:
            continue
        if ii == 1:
            U = scipy.linalg.expm(-1j * (H_static + H_drive) * (t1 - t0)) @ U
            continue

        def rhs(t, y):
            M = y.reshape((DIM, DIM))
            return (-1j * (H_static + envelope(t) * H_drive) @ M).reshape(-1)

        sol = scipy.integrate.solve_ivp(
            rhs, (t0, t1), np.eye(DIM, dtype=complex).reshape(-1),
            method="DOP853", rtol=1e-10, atol=1e-12,
        )
        if not sol.success:
            raise NumericError(f"Pulse edge integration failed: {sol.message} (nfev={sol.nfev})")
        U = sol.y[:, -1].reshape((DIM, DIM)) @ U
    return U


def _pulse_superoperator(H_static, H_drive, envelope, collapse):
    S = np.eye(DIM * DIM, dtype=complex)
    pieces = [
        (0.0, envelope.edge),
        (envelope.edge, envelope.tau - envelope.edge),
        (envelope.tau - envelope.edge, envelope.tau),
    ]
    L_static = liouvillian(H_static, collapse)
    L_drive = liouvillian(H_drive, [])
    for ii, (t0, t1) in enumerate(pieces):
        if t1 <= t0:
            continue
        if ii == 1:
            S = scipy.linalg.expm((L_static + L_drive) * (t1 - t0)) @ S
            continue

        def rhs(t, y):
            M = y.reshape((DIM * DIM, DIM * DIM))
            return ((L_static + envelope(t) * L_drive) @ M).reshape(-1)

        sol = scipy.integrate.solve_ivp(
            rhs, (t0, t1), np.eye(DIM * DIM, dtype=complex).reshape(-1),
            method="DOP853", rtol=ODE_RTOL, atol=ODE_ATOL,
        )
        if not sol.success:
            raise NumericError(f"Pulse edge integration failed: {sol.message} (nfev={sol.nfev})")
        S = sol.y[:, -1].reshape((DIM * DIM, DIM * DIM)) @ S
    return S


def run_protocol(
    target,
    coeffs,
    tau: float = None,
    noise: NoiseModel = None,
    drive_amp: float = None,
    t_edge: float = T_EDGE,
    edge_shape=EdgeShape.Cosine,
    tau_single: float = TAU_SINGLE,
) -> SimulationResult:
    """Simulate the target's gate sequence around one PCR pulse.

    coeffs were extracted at metadata['reference_amplitude_hz']; drive_amp
    rescales the drive induced words linearly. tau (full pulse length) defaults
    to the one giving the target's ZZX rotation."""
    reference = coeffs.metadata.get("reference_amplitude_hz")
    if drive_amp is not None and reference:
        coeffs = coeffs.scaled_drive(drive_amp / reference)
    phase_flipped = coeffs.get(target.anchor) < 0
    if phase_flipped:
        # a pi shift of every drive phase flips all drive induced words together
        log_info(
            f"{target.name.value}: alpha_{target.anchor} = {coeffs.get(target.anchor) / 1e6:.4f} MHz "
            "has the wrong sign, shifting the drive phases by pi"
        )
        coeffs = coeffs.scaled_drive(-1.0)
    theta = ROTATION_ANGLE[target.name]
    if tau is None:
        envelope = PulseEnvelope.for_area(required_area(theta, coeffs.get("ZZX")), t_edge, edge_shape)
    else:
        envelope = PulseEnvelope(tau, min(t_edge, tau / 2), EdgeShape(edge_shape))
    schedule = build_schedule(target, coeffs, envelope, tau_single)
    H_static, H_drive = split_hamiltonian(coeffs)
    psi0 = gl.basis_state([0, 0, 0])

    if noise is None or noise.is_noiseless:
        U = np.eye(DIM, dtype=complex)
        for seg in schedule.segments:
            if seg.kind is SegmentKind.SingleQubitGate:
                U = seg.gate @ U
            elif seg.kind is SegmentKind.PCRPulse:
                U = _pulse_unitary(H_static, H_drive, seg.envelope) @ U
        psi = U @ psi0
        rho = np.outer(psi, psi.conj())
        if target.name is TargetName.GHZ:
            ideal = gl.ghz_state()
            fidelity = float(abs(np.vdot(ideal, psi)) ** 2)
        else:
            fidelity = average_gate_fidelity(gl.reference_unitary(target.name), U)
        propagator = U
    else:
        collapse = noise.collapse_operators()
        L_idle = liouvillian(np.zeros((DIM, DIM)), collapse)
        S = np.eye(DIM * DIM, dtype=complex)
        for seg in schedule.segments:
            if seg.kind is SegmentKind.SingleQubitGate:
                S = unitary_superoperator(seg.gate) @ S
            elif seg.kind is SegmentKind.Idle:
                S = scipy.linalg.expm(L_idle * seg.duration) @ S
            else:
                S = _pulse_superoperator(H_static, H_drive, seg.envelope, collapse) @ S
        rho = unvec(S @ vec(np.outer(psi0, psi0.conj())))
        check_density_matrix(rho, "after the protocol")
        if target.name is TargetName.GHZ:
            ideal = gl.ghz_state()
            fidelity = float(np.real(ideal.conj() @ rho @ ideal))
        else:
            U_ref = gl.reference_unitary(target.name)
            values = []
            for probe in probe_states():
                out = unvec(S @ vec(np.outer(probe, probe.conj())))
                check_density_matrix(out, "for a probe state")
                expected = U_ref @ probe
                values.append(np.real(expected.conj() @ out @ expected))
            fidelity = float(np.mean(values))
        propagator = S
    log_debug(f"{target.name.value}: tau={envelope.tau * 1e9:.2f} ns, fidelity={fidelity:.6f}")
    return SimulationResult(
        target.name,
        rho,
        fidelity,
        schedule.duration,
        envelope.tau,
        drive_amp if drive_amp is not None else reference,
        schedule,
        propagator,
        phase_flipped=phase_flipped,
    )


def amplitude_sweep(target, coeffs, noise, amp_grid, **kwargs) -> SimulationResult:
    """run_protocol per drive amplitude, best result with the fidelity curve attached"""
    amp_grid = list(amp_grid)
    if not amp_grid:
        raise ConfigurationError("amplitude_sweep needs at least one amplitude")
    best = None
    curve = []
    errors = []
    for amp in amp_grid:
        try:
            result = run_protocol(target, coeffs, noise=noise, drive_amp=amp, **kwargs)
        except PCRException as e:
            log_debug(f"amplitude {amp:.4g} Hz failed: {e}")
            errors.append(e)
            curve.append((float(amp), None))
            continue
        curve.append((float(amp), result.fidelity))
        if best is None or result.fidelity > best.fidelity:
            best = result
    if best is None:
        raise SweepFailed(f"All {len(amp_grid)} amplitudes failed", errors)
    best.curve = curve
    return best


@dataclass
class RobustnessEnvelope:
    nominal: float
    fidelities: List[float]
    failures: int
    errors: List[str] = field(default_factory=list)

    @property
    def minimum(self):
        return float(np.min(self.fidelities)) if self.fidelities else float("nan")

    @property
    def median(self):
        return float(np.median(self.fidelities)) if self.fidelities else float("nan")

    @property
    def maximum(self):
        return float(np.max(self.fidelities)) if self.fidelities else float("nan")

    def as_dict(self):
        return {
            "nominal": self.nominal,
            "min": self.minimum,
            "median": self.median,
            "max": self.maximum,
            "failures": self.failures,
            "samples": len(self.fidelities) + self.failures,
        }


def robustness_sweep(
    target,
    spec,
    params,
    n_samples=32,
    noise=None,
    omega_hz=60e6,
    drive_amp=None,
    base_seed=0,
    cutoff=4,
    drive_spread=0.02,
    coupler_spread_hz=5e6,
    **kwargs,
) -> RobustnessEnvelope:
    """Rerun the protocol at randomly perturbed parameters, keeping the nominal tau and amplitude.

    Sample i uses numpy's default_rng(base_seed + i): A_j -> A_j (1 + U(-2%, 2%)),
    w_C -> w_C + U(-5, 5) MHz."""
    if n_samples < 8:
        raise ConfigurationError("robustness_sweep needs at least 8 samples")
    params = np.asarray(params, dtype=float)
    couplers = params[:2] * 1e9
    scales = params[2:5]

    def protocol(c, a, tau=None):
        coeffs = coefficients_for(spec.with_couplers(tuple(c)), DriveSpec(tuple(a), omega_hz), cutoff)
        return run_protocol(target, coeffs, tau=tau, noise=noise, drive_amp=drive_amp, **kwargs)

    nominal = protocol(couplers, scales)
    fidelities, errors = [], []
    for ii in range(n_samples):
        rng = np.random.default_rng(base_seed + ii)
        u = rng.uniform(-drive_spread, drive_spread, 3)
        shift = rng.uniform(-coupler_spread_hz, coupler_spread_hz, 2)
        try:
            fidelities.append(protocol(couplers + shift, scales * (1 + u), tau=nominal.tau).fidelity)
        except PCRException as e:
            errors.append(f"{type(e).__name__}: {e}")
    if errors:
        log_warning(f"{len(errors)} of {n_samples} robustness samples failed")
    result = RobustnessEnvelope(nominal.fidelity, fidelities, len(errors), errors)
    log_info(f"robustness {target.name.value}: {result.as_dict()}")
    return result


def ghz_drift_curve(alpha_zzz, times, alpha_twobody=(0.0, 0.0, 0.0)):
    """[(t, fidelity without correction, fidelity with the Z correction)]"""
    ideal = gl.ghz_state()
    rows = []
    for t in times:
        state, theta = gl.static_ghz_drift(alpha_zzz, alpha_twobody, t)
        corrected = gl.drift_correction(theta) @ state
        rows.append(
            (
                float(t),
                float(abs(np.vdot(ideal, state)) ** 2),
                float(abs(np.vdot(ideal, corrected)) ** 2),
            )
        )
    return rows
