"""Truncated bosonic mode algebra.

Operators are dense matrices on the product basis of all occupation
tuples whose total excitation stays below a global cutoff (with an optional
per-mode level cap). States are ordered lexicographically by their occupation
tuple.

Hamiltonian-role matrices are in rad/s, propagators are dimensionless.
"""
import itertools
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Sequence, Tuple, Union

import numpy as np
import scipy.linalg

from .enums import ModeKind
from .exceptions import ConfigurationError, NumericError

HERMITIAN_RTOL = 1e-12

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True)
class ModeSpec:
    label: str
    kind: ModeKind
    local_dim: int = 16

    def __post_init__(self):
        if not isinstance(self.kind, ModeKind):
            object.__setattr__(self, "kind", ModeKind(self.kind))
        if int(self.local_dim) != self.local_dim or self.local_dim < 1:
            raise ConfigurationError(
                f"Mode {self.label}: local_dim must be a positive integer, was {self.local_dim}"
            )
        if self.local_dim < self.kind.min_local_dim():
            raise ConfigurationError(
                f"Mode {self.label}: a {self.kind.value} needs local_dim >= {self.kind.min_local_dim()}"
            )


@dataclass(frozen=True, eq=False)
class ProductBasis:
    modes: Tuple[ModeSpec, ...]
    max_total_excitation: int
    states: Tuple[Tuple[int, ...], ...]
    _index: Dict[Tuple[int, ...], int] = field(repr=False, compare=False)

    @property
    def dim(self):
        return len(self.states)

    @property
    def n_modes(self):
        return len(self.modes)

    def index_of(self, occupation: Sequence[int]) -> int:
        try:
            return self._index[tuple(occupation)]
        except KeyError:
            raise KeyError(f"{tuple(occupation)} is not part of this basis")

    def __contains__(self, occupation):
        return tuple(occupation) in self._index

    def qubit_indices(self) -> List[int]:
        return [ii for ii, m in enumerate(self.modes) if m.kind is ModeKind.Qubit]

    def mode_index(self, label) -> int:
        for ii, m in enumerate(self.modes):
            if m.label == label:
                return ii
        raise ConfigurationError(f"No mode labeled {label!r}")

    def computational_states(self, qubit_order: Sequence[int] = None):
        """The 2^n_qubits states with qubits in {0,1} and every other mode empty.

        Ordered as binary numbers over qubit_order (first entry most significant)
        - which defaults to the basis' qubit order."""
        if qubit_order is None:
            qubit_order = self.qubit_indices()
        result = []
        for bits in itertools.product((0, 1), repeat=len(qubit_order)):
            occ = [0] * self.n_modes
            for mode_idx, b in zip(qubit_order, bits):
                occ[mode_idx] = b
            result.append(self.index_of(occ))
        return result


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    basis: ProductBasis
    entries: np.ndarray

    def __post_init__(self):
        entries = np.asarray(self.entries)
        if entries.shape != (self.basis.dim, self.basis.dim):
            raise ConfigurationError(
                f"Operator shape {entries.shape} does not match basis dimension {self.basis.dim}"
            )
        object.__setattr__(self, "entries", entries)

    def dag(self):
        return OperatorMatrix(self.basis, self.entries.conj().T)

    def _other(self, other):
        if isinstance(other, OperatorMatrix):
            if other.basis is not self.basis:
                raise ConfigurationError("Operators live on different bases")
            return other.entries
        return other

    def __add__(self, other):
        return OperatorMatrix(self.basis, self.entries + self._other(other))

    def __sub__(self, other):
        return OperatorMatrix(self.basis, self.entries - self._other(other))

    def __neg__(self):
        return OperatorMatrix(self.basis, -self.entries)

    def __mul__(self, scalar):
        return OperatorMatrix(self.basis, self.entries * scalar)

    __rmul__ = __mul__

    def __matmul__(self, other):
        return OperatorMatrix(self.basis, self.entries @ self._other(other))

    def hermiticity_error(self):
        return hermiticity_error(self.entries)

    def is_hermitian(self, rtol=HERMITIAN_RTOL):
        return self.hermiticity_error() <= rtol


def hermiticity_error(matrix) -> float:
    """Relative Frobenius norm of the anti-hermitian part"""
    matrix = np.asarray(matrix)
    norm = np.linalg.norm(matrix)
    if norm == 0:
        return 0.0
    return float(np.linalg.norm(matrix - matrix.conj().T) / norm)


def build_basis(modes: Sequence[ModeSpec], max_total_excitation: int) -> ProductBasis:
    if not modes:
        raise ConfigurationError("A basis needs at least one mode")
    if max_total_excitation < 0:
        raise ConfigurationError("max_total_excitation must be >= 0")
    modes = tuple(modes)
    caps = [min(m.local_dim, max_total_excitation + 1) for m in modes]
    # itertools.product is lexicographic
    states = tuple(
        occ
        for occ in itertools.product(*[range(c) for c in caps])
        if sum(occ) <= max_total_excitation
    )
    index = {occ: ii for ii, occ in enumerate(states)}
    return ProductBasis(modes, int(max_total_excitation), states, index)


def _check_mode_index(basis, mode_index):
    if not isinstance(mode_index, (int, np.integer)) or not (
        0 <= mode_index < basis.n_modes
    ):
        raise ConfigurationError(
            f"Invalid mode index {mode_index} for a basis with {basis.n_modes} modes"
        )


def lowering(basis: ProductBasis, mode_index: int) -> OperatorMatrix:
    """b_j with <..n_j-1..|b_j|..n_j..> = sqrt(n_j).

    Lowering never leaves the basis - raising (its adjoint) drops whatever would."""
    _check_mode_index(basis, mode_index)
    entries = np.zeros((basis.dim, basis.dim), dtype=complex)
    for col, occ in enumerate(basis.states):
        n = occ[mode_index]
        if n > 0:
            lowered = occ[:mode_index] + (n - 1,) + occ[mode_index + 1 :]
            entries[basis.index_of(lowered), col] = np.sqrt(n)
    return OperatorMatrix(basis, entries)


def raising(basis: ProductBasis, mode_index: int) -> OperatorMatrix:
    return lowering(basis, mode_index).dag()


def number_op(basis: ProductBasis, mode_index: int) -> OperatorMatrix:
    _check_mode_index(basis, mode_index)
    diag = np.array([occ[mode_index] for occ in basis.states], dtype=complex)
    return OperatorMatrix(basis, np.diag(diag))


def total_number_op(basis: ProductBasis) -> OperatorMatrix:
    diag = np.array([sum(occ) for occ in basis.states], dtype=complex)
    return OperatorMatrix(basis, np.diag(diag))


def diagonal_op(basis: ProductBasis, func) -> OperatorMatrix:
    """Diagonal operator with entries func(occupation tuple)"""
    diag = np.array([func(occ) for occ in basis.states], dtype=complex)
    return OperatorMatrix(basis, np.diag(diag))


def embed_product(
    basis: ProductBasis,
    factors: Union[Mapping[int, np.ndarray], Sequence[np.ndarray]],
) -> OperatorMatrix:
    """Embed a tensor product of 2x2 factors acting on levels {0,1} of the qubit modes.

    factors maps mode index -> 2x2 matrix (or is a sequence aligned with the
    qubit modes of the basis). Qubits without a factor get the identity.
    The result vanishes outside the computational subspace
    (so the all-identity product is its projector)."""
    qubits = basis.qubit_indices()
    if not isinstance(factors, Mapping):
        factors = list(factors)
        if len(factors) != len(qubits):
            raise ConfigurationError(
                f"Expected {len(qubits)} factors (one per qubit mode), got {len(factors)}"
            )
        factors = dict(zip(qubits, factors))
    resolved = {}
    for mode_index, f in factors.items():
        _check_mode_index(basis, mode_index)
        if basis.modes[mode_index].kind is not ModeKind.Qubit:
            raise ConfigurationError(
                f"Mode {basis.modes[mode_index].label} is a coupler - only qubit modes take factors"
            )
        if isinstance(f, str):
            f = PAULI[f]
        f = np.asarray(f, dtype=complex)
        if f.shape != (2, 2):
            raise ConfigurationError(f"Factor for mode {mode_index} is not 2x2")
        resolved[mode_index] = f
    for q in qubits:
        resolved.setdefault(q, PAULI["I"])

    comp = basis.computational_states(qubits)
    # bits of computational state k over the qubit modes, most significant first
    bit_table = [
        tuple(basis.states[idx][q] for q in qubits) for idx in comp
    ]
    small = np.ones((len(comp), len(comp)), dtype=complex)
    for pos, q in enumerate(qubits):
        f = resolved[q]
        bits = np.array([b[pos] for b in bit_table])
        small *= f[np.ix_(bits, bits)]
    entries = np.zeros((basis.dim, basis.dim), dtype=complex)
    entries[np.ix_(comp, comp)] = small
    return OperatorMatrix(basis, entries)


def matrix_exponential(H, t: float):
    """exp(-iHt) for hermitian H, by eigendecomposition.

    Accepts OperatorMatrix or a plain array and returns the same kind."""
    entries = H.entries if isinstance(H, OperatorMatrix) else np.asarray(H)
    err = hermiticity_error(entries)
    if err > HERMITIAN_RTOL:
        raise NumericError(
            f"matrix_exponential needs a hermitian matrix (relative anti-hermitian part {err:.2e})"
        )
    hermitian = (entries + entries.conj().T) / 2
    evals, evecs = scipy.linalg.eigh(hermitian)
    U = (evecs * np.exp(-1j * evals * t)) @ evecs.conj().T
    if isinstance(H, OperatorMatrix):
        return OperatorMatrix(H.basis, U)
    return U


def pauli_word(word: str) -> np.ndarray:
    """kron of single qubit Paulis, leftmost letter = most significant qubit"""
    result = np.ones((1, 1), dtype=complex)
    for letter in word:
        result = np.kron(result, PAULI[letter])
    return result
