"""Ideal three qubit gates, preparation sequences and synthesis targets.

Matrices act on the logical ordering |q1 q2 q3> (q1 most significant).
Logical qubits map to the physical cell as 1 -> Q1, 2 -> Q3, 3 -> Q2, so a
Pauli word 'ABC' here is the physical word A(Q1) B(Q3) C(Q2) as well.
"""
from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np
import scipy.linalg

from .boson_algebra import PAULI, pauli_word
from .enums import TargetName
from .exceptions import ConfigurationError

ALPHA_OPT_HZ = 0.5e6
LOGICAL_TO_PHYSICAL = {1: "Q1", 2: "Q3", 3: "Q2"}

HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
S_GATE = np.diag([1, 1j]).astype(complex)
S_DAG = S_GATE.conj().T
X_GATE = PAULI["X"]
Z_GATE = PAULI["Z"]


def rz(theta):
    return np.diag([np.exp(-1j * theta / 2), np.exp(1j * theta / 2)])


def on_qubit(gate, qubit, n_qubits=3):
    """Embed a 2x2 gate on logical qubit (1-based)"""
    if not 1 <= qubit <= n_qubits:
        raise ConfigurationError(f"No logical qubit {qubit} in a {n_qubits} qubit register")
    result = np.ones((1, 1), dtype=complex)
    for q in range(1, n_qubits + 1):
        result = np.kron(result, gate if q == qubit else np.eye(2))
    return result


def pauli_sum(weights: Dict[str, float]):
    n = len(next(iter(weights)))
    result = np.zeros((2**n, 2**n), dtype=complex)
    for word, w in weights.items():
        result += w * pauli_word(word)
    return result


def u_pauli(word, theta):
    """exp(-i theta/2 P) = cos(theta/2) I - i sin(theta/2) P"""
    P = pauli_word(word)
    return np.cos(theta / 2) * np.eye(len(P)) - 1j * np.sin(theta / 2) * P


def u_zzx(theta):
    return u_pauli("ZZX", theta)


def u_izx(theta):
    return u_pauli("IZX", theta)


def u_zx(theta):
    """two qubit cross resonance rotation"""
    return u_pauli("ZX", theta)


def basis_state(bits):
    psi = np.zeros(2 ** len(bits), dtype=complex)
    psi[int("".join(str(b) for b in bits), 2)] = 1
    return psi


def ghz_state(n_qubits=3):
    psi = np.zeros(2**n_qubits, dtype=complex)
    psi[0] = psi[-1] = 1 / np.sqrt(2)
    return psi


def ghz_sequence():
    """S3 H2 H1 U_ZZX(pi/2) H1 H2 (rightmost first)"""
    H12 = on_qubit(HADAMARD, 1) @ on_qubit(HADAMARD, 2)
    return on_qubit(S_GATE, 3) @ H12 @ u_zzx(np.pi / 2) @ H12


def bell_sequence():
    """S2 H1 U_ZX(pi/2) H1"""
    H1 = on_qubit(HADAMARD, 1, 2)
    return on_qubit(S_GATE, 2, 2) @ H1 @ u_zx(np.pi / 2) @ H1


CCNOT_WEIGHTS = {
    w: s * np.pi / 8
    for w, s in [
        ("IZI", 1), ("ZII", 1), ("IIX", 1), ("ZZX", 1),
        ("ZZI", -1), ("IZX", -1), ("ZIX", -1), ("III", -1),
    ]
}
ITOFFOLI_WEIGHTS = {
    w: s * np.pi / 8 for w, s in [("IIX", 1), ("ZZX", 1), ("IZX", -1), ("ZIX", -1)]
}
CZZ_WEIGHTS = {"IZZ": -np.pi / 4, "ZZZ": np.pi / 4}


def ccnot_hamiltonian():
    return pauli_sum(CCNOT_WEIGHTS)


def ccnot_projector_form():
    I2 = np.eye(2)
    return -np.pi / 8 * np.kron(np.kron(I2 - Z_GATE, I2 - Z_GATE), I2 - X_GATE)


def itoffoli_hamiltonian():
    return pauli_sum(ITOFFOLI_WEIGHTS)


def czz_hamiltonian():
    return pauli_sum(CZZ_WEIGHTS)


def m_coefficient(q1, q2):
    """evaluated literally - equals 4 q1 q2"""
    return 1 + (-1) ** (q1 + q2) - (-1) ** q1 - (-1) ** q2


def _controlled_flip(phase):
    U = np.zeros((8, 8), dtype=complex)
    for idx in range(8):
        q1, q2 = idx >> 2, (idx >> 1) & 1
        if q1 and q2:
            U[idx ^ 1, idx] = phase
        else:
            U[idx, idx] = 1
    return U


def ccnot_unitary():
    return _controlled_flip(1)


def itoffoli_unitary():
    return _controlled_flip(-1j)


def czz_unitary():
    """diag e^{i q1 (-1)^(q2+q3) pi/2} = exp(-i H_CZZ)"""
    phases = []
    for idx in range(8):
        q1, q2, q3 = idx >> 2, (idx >> 1) & 1, idx & 1
        phases.append(np.exp(1j * q1 * (-1) ** (q2 + q3) * np.pi / 2))
    return np.diag(phases)


def parity_check_unitary():
    """CZ_12 CZ_13 - what the CZZ protocol (trailing S1^dag included) implements"""
    return on_qubit(S_DAG, 1) @ czz_unitary()


def czz_decomposition():
    """H3 U_ZZX(pi/2) U_IZX(-pi/2) H3 - the pulse carries alpha_ZZX = -alpha_IZX > 0"""
    H3 = on_qubit(HADAMARD, 3)
    return H3 @ u_zzx(np.pi / 2) @ u_izx(-np.pi / 2) @ H3


def ideal_unitary(hamiltonian):
    return scipy.linalg.expm(-1j * hamiltonian)


def global_phase_distance(U, V):
    """min over phi of ||U - e^{i phi} V||_F"""
    overlap = np.trace(V.conj().T @ U)
    phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
    return float(np.linalg.norm(U - phase * V))


STATIC_DRIFT_WORDS = ("ZZI", "ZIZ", "IZZ", "ZZZ")


def static_ghz_drift(alpha_zzz, alpha_twobody, tau_p):
    """Evolve the ideal GHZ state under the static ZZ-type terms (Hz) for tau_p seconds.

    Returns (state, theta): applying rz-like exp(+i theta Z) to any one qubit
    undoes the relative phase."""
    weights = dict(zip(STATIC_DRIFT_WORDS[:3], alpha_twobody))
    weights["ZZZ"] = alpha_zzz
    H = 2 * np.pi * pauli_sum(weights)
    state = scipy.linalg.expm(-1j * H * tau_p) @ ghz_state()
    theta = 2 * np.pi * alpha_zzz * tau_p
    return state, theta


def drift_correction(theta, qubit=1):
    return on_qubit(np.diag([np.exp(1j * theta), np.exp(-1j * theta)]), qubit)


@dataclass(frozen=True)
class Relation:
    """Words equal up to the given signs: s_k alpha_k = s_0 alpha_0 (first entry is the pivot)"""

    members: Tuple[Tuple[str, int], ...]

    @property
    def words(self):
        return tuple(w for w, _ in self.members)


ANSATZ_NON_IDENTITY = tuple(
    a + b + c for a in "IZ" for b in "IZ" for c in "IXYZ" if a + b + c != "III"
)


@dataclass(frozen=True)
class GateTarget:
    """What the effective Hamiltonian should look like for one gate.

    The anchor word is pinned at +alpha_opt, relations tie further words to
    it (or to each other) up to sign, compensated words are fixed by local
    rotations afterwards and are ignored, everything else in the ansatz is
    unwanted."""

    name: TargetName
    preset: str
    relations: Tuple[Relation, ...]
    theta: float
    anchor: str = "ZZX"
    alpha_opt: float = ALPHA_OPT_HZ
    compensated: Tuple[str, ...] = ()
    logical_to_physical: Tuple[Tuple[int, str], ...] = tuple(LOGICAL_TO_PHYSICAL.items())

    def __post_init__(self):
        self._check_relations()
        overlap = set(self.wanted_words()) & set(self.unwanted)
        if overlap:  # pragma: no cover
            raise ConfigurationError(f"Words both wanted and unwanted: {sorted(overlap)}")

    def _check_relations(self):
        """Assign +-1 to every word so each relation holds - fails on contradictions"""
        signs = {self.anchor: 1}
        pending = list(self.relations)
        while pending:
            progressed = False
            for rel in list(pending):
                known = [(w, s) for w, s in rel.members if w in signs]
                if not known and len(pending) > 1:
                    continue
                if known:
                    ref_word, ref_sign = known[0]
                    group_sign = signs[ref_word] * ref_sign
                else:
                    group_sign = 1
                for w, s in rel.members:
                    implied = group_sign * s
                    if signs.setdefault(w, implied) != implied:
                        raise ConfigurationError(
                            f"Target {self.name.value}/{self.preset}: contradictory signs for {w}"
                        )
                pending.remove(rel)
                progressed = True
            if not progressed:  # disconnected groups, fix the first freely
                rel = pending[0]
                signs.setdefault(rel.members[0][0], rel.members[0][1])
        object.__setattr__(self, "_signs", signs)

    def wanted_words(self):
        words = [self.anchor]
        for rel in self.relations:
            words.extend(w for w in rel.words if w not in words)
        return tuple(words)

    @property
    def unwanted(self):
        skip = set(self.wanted_words()) | set(self.compensated)
        return tuple(w for w in ANSATZ_NON_IDENTITY if w not in skip)

    @property
    def wanted(self):
        """(word, value in Hz it takes in the ideal pattern, relation index or None for the anchor)"""
        result = [(self.anchor, self.alpha_opt, None)]
        for ii, rel in enumerate(self.relations):
            for w, _ in rel.members:
                if w != self.anchor:
                    result.append((w, self._signs[w] * self.alpha_opt, ii))
        return result

    def sign_of(self, word):
        return self._signs.get(word)

    def ideal_pattern(self):
        """Pauli weights (Hz) realising the target exactly"""
        return {w: v for w, v, _ in self.wanted}

    def signs_consistent(self, alpha: Dict[str, float]):
        """Do all provided wanted words carry their pattern sign (anchor positive)?"""
        for word, value, _ in self.wanted:
            if word in alpha and np.sign(alpha[word]) != np.sign(value):
                return False
        return True

    def logical_qubit(self, physical_label):
        for logical, physical in self.logical_to_physical:
            if physical == physical_label:
                return logical
        raise KeyError(physical_label)


def _rel(*members):
    return Relation(tuple(members))


TARGET_PRESETS = {
    (TargetName.GHZ, "exclusive"): dict(relations=(), theta=np.pi / 2),
    (TargetName.GHZ, "parity-assisted"): dict(
        relations=(_rel(("ZIX", 1), ("IZX", 1), ("IIX", -1)),), theta=np.pi / 2
    ),
    (TargetName.iToffoli, "hamiltonian"): dict(
        relations=(_rel(("ZZX", 1), ("IIX", 1), ("ZIX", -1), ("IZX", -1)),),
        theta=np.pi / 4,
    ),
    (TargetName.iToffoli, "appendix"): dict(
        relations=(_rel(("ZZX", 1), ("IZX", -1), ("ZIX", -1), ("IIX", -1)),),
        theta=np.pi / 4,
    ),
    (TargetName.CCNOT, "default"): dict(
        relations=(_rel(("ZZX", 1), ("IZX", -1), ("ZIX", -1), ("ZZI", -1), ("IIX", 1)),),
        theta=np.pi / 4,
        compensated=("ZII", "IZI"),
    ),
    (TargetName.CZZ, "default"): dict(
        relations=(_rel(("ZZX", 1), ("IZX", -1)),), theta=np.pi / 2
    ),
}
DEFAULT_PRESETS = {
    TargetName.GHZ: "exclusive",
    TargetName.iToffoli: "hamiltonian",
    TargetName.CCNOT: "default",
    TargetName.CZZ: "default",
}


def target_preset(name, preset=None, alpha_opt=ALPHA_OPT_HZ) -> GateTarget:
    name = TargetName.parse(name)
    if preset is None:
        preset = DEFAULT_PRESETS[name]
    try:
        kwargs = TARGET_PRESETS[name, preset]
    except KeyError:
        known = [p for (n, p) in TARGET_PRESETS if n is name]
        raise ConfigurationError(
            f"Unknown preset {preset!r} for {name.value}, expected one of {known}"
        )
    return GateTarget(name, preset, alpha_opt=alpha_opt, **kwargs)


def reference_unitary(name):
    """The gate a protocol for this target should implement (GHZ: the preparation sequence)"""
    name = TargetName.parse(name)
    if name is TargetName.GHZ:
        return ghz_sequence()
    elif name is TargetName.iToffoli:
        return itoffoli_unitary()
    elif name is TargetName.CCNOT:
        return ccnot_unitary()
    else:
        return parity_check_unitary()
