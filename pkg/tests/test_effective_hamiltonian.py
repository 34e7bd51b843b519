import json

import numpy as np
import pytest

from pcrsynth import boson_algebra as ba
from pcrsynth.circuit_model import CircuitSpec, DriveSpec, standard_basis
from pcrsynth.effective_hamiltonian import (
    ALL_WORDS,
    ANSATZ_WORDS,
    DRIVE_WORDS,
    LEAKAGE_WORDS,
    PAULI_MODE_ORDER,
    STATIC_WORDS,
    PauliCoefficients,
    block_diagonalize,
    coefficients_for,
    cutoff_convergence,
    pauli_project,
    write_coefficients,
)
from pcrsynth.exceptions import HybridizationError, NumericError
from pcrsynth.testing.fixtures import dispersive_circuit


class TestWords:
    def test_word_sets(self):
        assert len(ALL_WORDS) == 64
        assert len(ANSATZ_WORDS) == 16
        assert len(DRIVE_WORDS) == 8
        assert len(STATIC_WORDS) == 7
        assert len(LEAKAGE_WORDS) == 48
        assert "III" in ANSATZ_WORDS
        assert "III" not in STATIC_WORDS
        assert set(DRIVE_WORDS) | set(STATIC_WORDS) | {"III"} == set(ANSATZ_WORDS)
        assert all(w[0] in "IZ" and w[1] in "IZ" for w in ANSATZ_WORDS)


class TestPauliProject:
    def test_exact_on_pauli_sums(self):
        weights = {"ZZX": 0.5, "IZX": -0.25, "ZII": 3.0, "XYZ": 0.125, "III": 1.0}
        H = sum(v * ba.pauli_word(w) for w, v in weights.items())
        coeffs = pauli_project(H)
        for w in ALL_WORDS:
            assert coeffs[w] == pytest.approx(weights.get(w, 0.0), abs=1e-14)
        assert coeffs.leakage() == {w: coeffs[w] for w in LEAKAGE_WORDS}
        assert coeffs.ansatz()["ZZX"] == pytest.approx(0.5)
        assert np.allclose(coeffs.to_matrix(), H)

    def test_rejects_bad_input(self):
        with pytest.raises(NumericError):
            pauli_project(np.eye(4))
        M = np.zeros((8, 8), dtype=complex)
        M[0, 1] = 1
        with pytest.raises(NumericError):
            pauli_project(M)


class TestPauliCoefficients:
    def test_scaled_drive(self):
        c = PauliCoefficients({"ZZX": 1.0, "ZZI": 2.0, "IIY": 3.0}, {"reference_amplitude_hz": 60e6})
        scaled = c.scaled_drive(2.0)
        assert scaled["ZZX"] == 2.0
        assert scaled["ZZI"] == 2.0
        assert scaled["IIY"] == 6.0
        assert scaled.metadata["drive_scale"] == 2.0
        assert scaled.metadata["reference_amplitude_hz"] == 60e6
        assert c.metadata.get("drive_scale") is None

    def test_get_and_max_abs_y(self):
        c = PauliCoefficients({"ZZX": 1.0, "ZIY": -5.0, "IIY": 2.0})
        assert c.get("IZX") == 0.0
        assert "IZX" not in c
        assert c.max_abs_y() == 5.0

    def test_rows_and_files(self, dir_per_test):
        c = PauliCoefficients({"ZZX": 0.5e6, "XII": 1e3}, {"cutoff": 4})
        rows = c.rows()
        assert [r["word"] for r in rows] == ["XII", "ZZX"]
        assert rows[1]["alpha_mhz"] == pytest.approx(0.5)
        assert rows[1]["in_ansatz"]
        assert not rows[0]["in_ansatz"]
        write_coefficients(c, dir_per_test / "cell")
        data = json.loads((dir_per_test / "cell.json").read_text())
        assert data["metadata"] == {"cutoff": 4}
        assert len(data["rows"]) == 2
        csv_lines = (dir_per_test / "cell.csv").read_text().strip().splitlines()
        assert csv_lines[0] == "word,alpha_mhz,in_ansatz"
        assert len(csv_lines) == 3


def _diagonal_hamiltonian(basis, energy):
    return np.diag([float(energy(occ)) for occ in basis.states]).astype(complex)


class TestBlockDiagonalize:
    def test_diagonal_hamiltonian(self):
        basis = standard_basis(2)
        # distinct energies, computational states read |Q1 Q3 Q2>
        H = _diagonal_hamiltonian(basis, lambda occ: 100 * occ[0] + 10 * occ[2] + 1 * occ[1] + 1000 * sum(occ[3:]))
        H_eff, assignment = block_diagonalize(H, basis)
        assert assignment.min_overlap() == pytest.approx(1.0)
        assert np.allclose(np.diag(H_eff).real, [0, 1, 10, 11, 100, 101, 110, 111])

    def test_hybridized_state_is_refused(self):
        basis = standard_basis(2)
        comp = set(basis.computational_states(PAULI_MODE_ORDER))
        others = [ii for ii in range(basis.dim) if ii not in comp]
        H = np.diag(1000.0 * np.arange(basis.dim)).astype(complex)
        # |000> in the middle of a uniform 9 site chain of degenerate levels
        chain = others[:4] + [basis.index_of((0, 0, 0, 0, 0))] + others[4:8]
        for site in chain:
            H[site, site] = -1e6
        for a, b in zip(chain, chain[1:]):
            H[a, b] = H[b, a] = 1.0
        with pytest.raises(HybridizationError) as e:
            block_diagonalize(H, basis)
        assert e.value.overlaps[(0, 0, 0, 0, 0)] == pytest.approx(0.2)

    def test_non_hermitian(self):
        basis = standard_basis(2)
        H = np.zeros((basis.dim, basis.dim), dtype=complex)
        H[0, 1] = 1.0
        with pytest.raises(NumericError):
            block_diagonalize(H, basis)


class TestCoefficientsFor:
    def test_uncoupled_circuit(self):
        spec = CircuitSpec.nearest_neighbour(
            (4.70e9, 4.95e9, 5.20e9),
            (-300e6, -300e6, -300e6),
            (6.013e9, 6.371e9),
            g_qc=0.0,
            g_qq=0.0,
            g_13=0.0,
        )
        coeffs = coefficients_for(spec, DriveSpec((0.0, 0.0, 0.0), 60e6))
        w1, w2, w3 = spec.qubit_freqs
        # frame rotates at Q2; n = (1 - Z) / 2
        assert coeffs["ZII"] == pytest.approx(-(w1 - w2) / 2, abs=1e-2)
        assert coeffs["IZI"] == pytest.approx(-(w3 - w2) / 2, abs=1e-2)
        for w in ALL_WORDS:
            if w not in ("III", "ZII", "IZI"):
                assert abs(coeffs[w]) < 1e-2
        assert coeffs.metadata["drive_freq_hz"] == pytest.approx(w2)
        assert coeffs.metadata["min_overlap"] == pytest.approx(1.0)

    def test_dispersive_cell(self):
        spec = dispersive_circuit()
        coeffs = coefficients_for(spec, DriveSpec((1.0, 0.0, 1.0), 20e6))
        assert coeffs.metadata["reference_amplitude_hz"] == 20e6
        assert coeffs.metadata["cutoff"] == 4
        # real hamiltonian, calibrated phases: no Y words
        assert coeffs.max_abs_y() < 1e-3
        assert abs(coeffs["ZZX"]) > 1.0
        # the off resonant drive on Q1 stays visible as a word outside the ansatz
        assert coeffs.leakage()["XII"] == pytest.approx(10e6, rel=0.05)

    def test_uncalibrated_phase_is_reported(self):
        spec = dispersive_circuit()
        coeffs = coefficients_for(spec, DriveSpec((1.0, 0.0, 1.0), 20e6, phases=(0.4, 0.0, 0.0)))
        assert any("not calibrated" in d for d in coeffs.diagnostics)
        assert coeffs.max_abs_y() > 1.0


class TestCutoffConvergence:
    def test_first_order_words_on_dispersive_cell(self):
        changes = cutoff_convergence(dispersive_circuit(), DriveSpec((1.0, 0.0, 1.0), 20e6), words=DRIVE_WORDS)
        for w in ("ZIX", "IZX"):
            assert changes[w] < 0.01
        # Y words vanish at calibrated phases and are left out
        assert not any(w[2] == "Y" for w in changes)

    def test_ghz_optimum_of_cell_two(self, synthetic_device):
        spec = synthetic_device.cell(2).spec.with_couplers((5.321e9, 5.725e9))
        changes = cutoff_convergence(spec, DriveSpec((0.060, -0.007, 1.500), 60e6), words=("ZZX",))
        assert changes["ZZX"] < 0.01

    def test_needs_two_cutoffs(self):
        with pytest.raises(ValueError):
            cutoff_convergence(dispersive_circuit(), DriveSpec((1.0, 0.0, 1.0), 20e6), cutoffs=(4,))
